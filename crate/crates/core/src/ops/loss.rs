use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

fn check(pred: &Tensor1D<impl Scalar>, target: &Tensor1D<impl Scalar>) -> Result<()> {
    if pred.channels() != target.channels() || pred.len() != target.len() {
        return Err(Error::shape(
            "mse_loss",
            "elements",
            target.data().len(),
            pred.data().len(),
        ));
    }
    Ok(())
}

/// `(1/n) sum (y - y_hat)^2`.
pub fn mse_loss<T: Scalar>(pred: &Tensor1D<T>, target: &Tensor1D<T>) -> Result<T> {
    check(pred, target)?;
    let n = T::lit(pred.data().len() as f64);
    let sum: T = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum();
    Ok(sum / n)
}

/// `(2/n) (y_hat - y)`.
pub fn mse_loss_backward<T: Scalar>(pred: &Tensor1D<T>, target: &Tensor1D<T>) -> Result<Tensor1D<T>> {
    check(pred, target)?;
    scaled_residual(pred, target, T::lit(2.0 / pred.data().len() as f64))
}

fn scaled_residual<T: Scalar>(pred: &Tensor1D<T>, target: &Tensor1D<T>, k: T) -> Result<Tensor1D<T>> {
    let data = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| k * (p - t))
        .collect();
    Tensor1D::from_vec(pred.channels(), pred.len(), data)
}

/// Mean squared error over every element of a batch.
pub fn mse_loss_batch<T: Scalar>(pred: &[Tensor1D<T>], target: &[Tensor1D<T>]) -> Result<T> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::shape("mse_loss_batch", "batch size", target.len(), pred.len()));
    }
    let mut total = T::zero();
    for (p, t) in pred.iter().zip(target) {
        total += mse_loss(p, t)?;
    }
    Ok(total / T::lit(pred.len() as f64))
}

pub fn mse_loss_batch_backward<T: Scalar>(
    pred: &[Tensor1D<T>],
    target: &[Tensor1D<T>],
) -> Result<Vec<Tensor1D<T>>> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::shape("mse_loss_batch", "batch size", target.len(), pred.len()));
    }
    let b = pred.len() as f64;
    pred.iter()
        .zip(target)
        .map(|(p, t)| {
            check(p, t)?;
            scaled_residual(p, t, T::lit(2.0 / (b * p.data().len() as f64)))
        })
        .collect()
}
