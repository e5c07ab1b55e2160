use alloc::format;
use alloc::vec::Vec;

use super::config::PipelineConfig;
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// `(v - min) / (max - min)`. A constant input maps to zeros and returns
/// `true` (degenerate).
pub fn minmax_scale(values: &[f64]) -> (Vec<f64>, bool) {
    let mut v = values.to_vec();
    let degenerate = minmax_scale_in_place(&mut v);
    (v, degenerate)
}

pub fn minmax_scale_in_place<T: crate::Scalar>(values: &mut [T]) -> bool {
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for &v in values.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = hi - lo;
    if !(span > T::zero()) {
        values.iter_mut().for_each(|v| *v = T::zero());
        return true;
    }
    for v in values.iter_mut() {
        *v = (*v - lo) / span;
    }
    false
}

/// Keeps bands inside `[range_lo, range_hi]` and min-max scales them.
pub fn select_and_scale(s: &Spectrum, cfg: &PipelineConfig) -> Result<(Spectrum, bool)> {
    let (mut wl, mut vals) = (Vec::new(), Vec::new());
    for (&w, &v) in s.wavelengths().iter().zip(s.values()) {
        if w >= cfg.range_lo && w <= cfg.range_hi {
            wl.push(w);
            vals.push(v);
        }
    }
    if wl.len() < 2 {
        return Err(Error::Spectrum(format!(
            "only {} samples inside [{}, {}]",
            wl.len(),
            cfg.range_lo,
            cfg.range_hi
        )));
    }
    let degenerate = minmax_scale_in_place(&mut vals);
    Ok((Spectrum::new(wl, vals)?, degenerate))
}
