use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

pub fn relu<T: Scalar>(input: &Tensor1D<T>) -> Tensor1D<T> {
    let mut out = input.clone();
    for v in out.data_mut() {
        if !(*v > T::zero()) {
            *v = T::zero();
        }
    }
    out
}

/// Gradient passes only where the input was strictly positive.
pub fn relu_backward<T: Scalar>(input: &Tensor1D<T>, grad_out: &Tensor1D<T>) -> Result<Tensor1D<T>> {
    if !input.same_shape(grad_out) {
        return Err(Error::shape(
            "relu_backward",
            "elements",
            input.data().len(),
            grad_out.data().len(),
        ));
    }
    let mut d = grad_out.clone();
    for (g, &x) in d.data_mut().iter_mut().zip(input.data()) {
        if !(x > T::zero()) {
            *g = T::zero();
        }
    }
    Ok(d)
}
