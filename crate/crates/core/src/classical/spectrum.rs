use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Reflectance values on a strictly increasing wavelength grid (micrometers).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    wavelengths: Vec<f64>,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(wavelengths: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != values.len() {
            return Err(Error::Spectrum(format!(
                "{} wavelengths but {} values",
                wavelengths.len(),
                values.len()
            )));
        }
        if let Some(i) = wavelengths.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Spectrum(format!(
                "wavelengths not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = wavelengths
            .iter()
            .chain(&values)
            .position(|v| !v.is_finite())
        {
            return Err(Error::Spectrum(format!("non-finite entry at position {i}")));
        }
        Ok(Self {
            wavelengths,
            values,
        })
    }

    /// Same grid, new values. The caller guarantees equal length.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.wavelengths.len());
        Self {
            wavelengths: self.wavelengths.clone(),
            values,
        }
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `n` evenly spaced wavelengths from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}
