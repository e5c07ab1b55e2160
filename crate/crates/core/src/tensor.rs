use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A `channels x length` activation, row-major (channel-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor1D<T> {
    channels: usize,
    length: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor1D<T> {
    pub fn zeros(channels: usize, length: usize) -> Self {
        Self {
            channels,
            length,
            data: vec![T::zero(); channels * length],
        }
    }

    pub fn from_vec(channels: usize, length: usize, data: Vec<T>) -> Result<Self> {
        if channels == 0 || length == 0 {
            return Err(Error::config("tensor dimensions must be positive"));
        }
        if data.len() != channels * length {
            return Err(Error::shape(
                "Tensor1D::from_vec",
                "data length",
                channels * length,
                data.len(),
            ));
        }
        Ok(Self {
            channels,
            length,
            data,
        })
    }

    /// Single-channel tensor from a spectrum-like slice of f64.
    pub fn from_f64(values: &[f64]) -> Self {
        Self {
            channels: 1,
            length: values.len(),
            data: values.iter().map(|&v| T::lit(v)).collect(),
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[T] {
        &self.data[c * self.length..(c + 1) * self.length]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [T] {
        let len = self.length;
        &mut self.data[c * len..(c + 1) * len]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.as_f64()).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.channels == other.channels && self.length == other.length
    }
}
