//! Hyperspectral cubes stored band-interleaved-by-pixel.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    height: usize,
    width: usize,
    wavelengths: Vec<f32>,
    data: Vec<f32>,
}

impl Cube {
    /// `data` holds `height * width` pixels of `wavelengths.len()` bands each,
    /// row-major over pixels.
    pub fn new(height: usize, width: usize, wavelengths: Vec<f32>, data: Vec<f32>) -> Result<Self> {
        let bands = wavelengths.len();
        if bands == 0 {
            return Err(Error::Data("cube has no bands".into()));
        }
        if let Some(i) = wavelengths.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Data(format!("cube wavelengths not strictly increasing at band {}", i + 1)));
        }
        if !wavelengths[0].is_finite() || !wavelengths[bands - 1].is_finite() {
            return Err(Error::Data("cube wavelengths must be finite".into()));
        }
        let expected = height
            .checked_mul(width)
            .and_then(|p| p.checked_mul(bands))
            .ok_or_else(|| Error::Data(format!("cube {height}x{width}x{bands} is too large")))?;
        if data.len() != expected {
            return Err(Error::Data(format!(
                "cube {height}x{width}x{bands} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            wavelengths,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, wavelengths: Vec<f32>) -> Result<Self> {
        let n = height * width * wavelengths.len();
        Self::new(height, width, wavelengths, alloc::vec![0.0; n])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bands(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn wavelengths(&self) -> &[f32] {
        &self.wavelengths
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> &[f32] {
        let b = self.bands();
        let i = (row * self.width + col) * b;
        &self.data[i..i + b]
    }

    pub fn pixel_mut(&mut self, row: usize, col: usize) -> &mut [f32] {
        let b = self.bands();
        let i = (row * self.width + col) * b;
        &mut self.data[i..i + b]
    }

    /// Contiguous spectra of rows `rows.start..rows.end`.
    pub fn rows(&self, rows: core::ops::Range<usize>) -> &[f32] {
        let stride = self.width * self.bands();
        &self.data[rows.start * stride..rows.end * stride]
    }
}
