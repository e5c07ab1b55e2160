use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

/// Stacks channels, `a` first.
pub fn concat_channels<T: Scalar>(a: &Tensor1D<T>, b: &Tensor1D<T>) -> Result<Tensor1D<T>> {
    if a.len() != b.len() {
        return Err(Error::shape("concat_channels", "length", a.len(), b.len()));
    }
    let mut data = Vec::with_capacity(a.data().len() + b.data().len());
    data.extend_from_slice(a.data());
    data.extend_from_slice(b.data());
    Tensor1D::from_vec(a.channels() + b.channels(), a.len(), data)
}

/// Inverse of [`concat_channels`]; also its backward pass.
pub fn split_channels<T: Scalar>(t: &Tensor1D<T>, first: usize) -> Result<(Tensor1D<T>, Tensor1D<T>)> {
    if first == 0 || first >= t.channels() {
        return Err(Error::shape(
            "split_channels",
            "split point",
            t.channels(),
            first,
        ));
    }
    let cut = first * t.len();
    let a = Tensor1D::from_vec(first, t.len(), t.data()[..cut].to_vec())?;
    let b = Tensor1D::from_vec(t.channels() - first, t.len(), t.data()[cut..].to_vec())?;
    Ok((a, b))
}
