//! Spectral preprocessing kernels and models.
//!
//! Everything in this crate is allocation-only (`alloc`, no `std`): the 1D
//! tensor kernels with their hand-written backward passes, the UNet grid,
//! the classical preprocessing chain (spike removal, Savitzky-Golay
//! smoothing, continuum removal), the synthetic mixture generator and the
//! Adam trainer. File formats, threading and the command line live in the
//! `specunet` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classical;
pub mod cube;
pub mod error;
pub mod gradcheck;
pub mod ops;
pub mod rng;
pub mod scalar;
pub mod synth;
pub mod tensor;
pub mod train;
pub mod unet;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use tensor::Tensor1D;
