use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Divide the moments by `1 - beta^t`. Off reproduces the uncorrected
    /// update `theta -= lr * m / (sqrt(v) + eps)`.
    pub bias_correction: bool,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            bias_correction: true,
        }
    }
}

impl AdamHyper {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && self.lr.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid Adam hyperparameters {self:?}")))
        }
    }
}

/// First and second moments for every parameter buffer, plus the step count.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub hyper: AdamHyper,
    pub m: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
    pub t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(hyper: AdamHyper, shapes: impl IntoIterator<Item = usize>) -> Self {
        let m: Vec<Vec<T>> = shapes.into_iter().map(|n| vec![T::zero(); n]).collect();
        Self {
            hyper,
            v: m.clone(),
            m,
            t: 0,
        }
    }

    pub fn for_params(hyper: AdamHyper, params: &[&[T]]) -> Self {
        Self::new(hyper, params.iter().map(|p| p.len()))
    }
}

/// One Adam update. Shapes and finiteness are checked before anything is
/// modified, so a rejected step leaves state and parameters untouched.
pub fn adam_step<T: Scalar>(state: &mut AdamState<T>, params: &mut [&mut [T]], grads: &[&[T]]) -> Result<()> {
    if params.len() != state.m.len() || grads.len() != state.m.len() {
        return Err(Error::shape("adam_step", "buffers", state.m.len(), grads.len()));
    }
    for (i, ((p, g), m)) in params.iter().zip(grads).zip(&state.m).enumerate() {
        if p.len() != m.len() || g.len() != m.len() {
            return Err(Error::shape("adam_step", "buffer length", m.len(), g.len()));
        }
        if let Some(j) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "gradient",
                location: format!("buffer {i}, element {j}"),
            });
        }
    }
    let h = state.hyper;
    state.t += 1;
    let (b1, b2) = (T::lit(h.beta1), T::lit(h.beta2));
    let (one_b1, one_b2) = (T::lit(1.0 - h.beta1), T::lit(1.0 - h.beta2));
    let (c1, c2) = if h.bias_correction {
        let t = state.t as i32;
        (
            T::lit(1.0 / (1.0 - h.beta1.powi(t))),
            T::lit(1.0 / (1.0 - h.beta2.powi(t))),
        )
    } else {
        (T::one(), T::one())
    };
    let (lr, eps) = (T::lit(h.lr), T::lit(h.eps));
    for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        for (((p, &g), m), v) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
            *m = b1 * *m + one_b1 * g;
            *v = b2 * *v + one_b2 * g * g;
            let m_hat = *m * c1;
            let v_hat = *v * c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
