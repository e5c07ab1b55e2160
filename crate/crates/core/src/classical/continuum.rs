use alloc::vec::Vec;

use super::config::ContinuumMode;
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Vertex indices of the upper convex hull of `(x, y)` (monotone chain,
/// `x` strictly increasing). Both endpoints are always vertices; collinear
/// points are dropped.
pub fn upper_hull(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// The upper hull evaluated at every sample, never below the sample itself.
pub fn upper_hull_values(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    let hull = upper_hull(x, y);
    for seg in hull.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let slope = (y[b] - y[a]) / (x[b] - x[a]);
        for i in a + 1..b {
            let h = y[a] + slope * (x[i] - x[a]);
            out[i] = h.max(y[i]);
        }
    }
    out
}

/// Divides by (or subtracts) the upper convex hull.
///
/// In quotient mode, spectra with a non-positive minimum are shifted by +1
/// before division; strictly positive spectra are divided directly, which
/// makes the operation idempotent.
pub fn remove_continuum(s: &Spectrum, mode: ContinuumMode) -> Result<Spectrum> {
    Ok(s.with_values(remove_continuum_values(s.wavelengths(), s.values(), mode)?))
}

pub(crate) fn remove_continuum_values(x: &[f64], y: &[f64], mode: ContinuumMode) -> Result<Vec<f64>> {
    if y.len() < 2 {
        return Err(Error::Spectrum(alloc::format!(
            "continuum removal needs at least 2 points, got {}",
            y.len()
        )));
    }
    let hull = upper_hull_values(x, y);
    Ok(match mode {
        ContinuumMode::Quotient => {
            let min = y.iter().copied().fold(f64::INFINITY, f64::min);
            let shift = if min > 0.0 { 0.0 } else { 1.0 - min.min(0.0) };
            y.iter()
                .zip(&hull)
                .map(|(&v, &h)| ((v + shift) / (h + shift)).min(1.0))
                .collect()
        }
        ContinuumMode::Subtract => y.iter().zip(&hull).map(|(&v, &h)| (v - h).min(0.0)).collect(),
    })
}
