use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Savitzky-Golay smoother with precomputed weights.
///
/// Interior points use the centered least-squares weights. The first and
/// last `window / 2` points are evaluated from the polynomial fitted to the
/// first (last) full window, so polynomials of degree `<= order` are
/// reproduced everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SavitzkyGolay {
    window: usize,
    order: usize,
    center: Vec<f64>,
    /// `edges[i]`: weights over the first window evaluated at position `i`.
    edges: Vec<Vec<f64>>,
}

/// Solves the small dense system `a x = b` by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}

fn powers(t: f64, order: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(order + 1);
    let mut acc = 1.0;
    for _ in 0..=order {
        p.push(acc);
        acc *= t;
    }
    p
}

/// Least-squares weights over sample offsets `ts` for the value at `t0`.
fn fit_weights(ts: &[f64], t0: f64, order: usize) -> Result<Vec<f64>> {
    let m = order + 1;
    let rows: Vec<Vec<f64>> = ts.iter().map(|&t| powers(t, order)).collect();
    let mut gram = vec![0.0; m * m];
    for r in &rows {
        for i in 0..m {
            for j in 0..m {
                gram[i * m + j] += r[i] * r[j];
            }
        }
    }
    let z = solve(gram, powers(t0, order), m)
        .ok_or_else(|| Error::config("singular Savitzky-Golay system"))?;
    Ok(rows
        .iter()
        .map(|r| r.iter().zip(&z).map(|(a, b)| a * b).sum())
        .collect())
}

impl SavitzkyGolay {
    pub fn new(window: usize, order: usize) -> Result<Self> {
        if window < 3 || window % 2 == 0 {
            return Err(Error::config(format!(
                "smoothing window must be odd and at least 3, got {window}"
            )));
        }
        if order >= window {
            return Err(Error::config(format!(
                "polyorder {order} must be below window {window}"
            )));
        }
        let half = (window / 2) as f64;
        let ts: Vec<f64> = (0..window).map(|j| j as f64 - half).collect();
        let center = fit_weights(&ts, 0.0, order)?;
        let edges = (0..window / 2)
            .map(|i| fit_weights(&ts, ts[i], order))
            .collect::<Result<_>>()?;
        Ok(Self {
            window,
            order,
            center,
            edges,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn center_weights(&self) -> &[f64] {
        &self.center
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = x.len();
        let w = self.window;
        if n < w {
            return Err(Error::Spectrum(format!(
                "smoothing window {w} larger than spectrum of {n} bands"
            )));
        }
        let half = w / 2;
        let mut out = vec![0.0; n];
        for i in half..n - half {
            out[i] = self.center.iter().zip(&x[i - half..]).map(|(c, v)| c * v).sum();
        }
        let tail = &x[n - w..];
        for (i, wts) in self.edges.iter().enumerate() {
            out[i] = wts.iter().zip(x).map(|(c, v)| c * v).sum();
            // mirrored offsets: reversed weights over the last window
            out[n - 1 - i] = wts.iter().rev().zip(tail).map(|(c, v)| c * v).sum();
        }
        Ok(out)
    }
}

pub fn smooth(s: &Spectrum, window: usize, order: usize) -> Result<Spectrum> {
    let sg = SavitzkyGolay::new(window, order)?;
    Ok(s.with_values(sg.apply(s.values())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn window_three_order_one_is_moving_average() {
        let sg = SavitzkyGolay::new(3, 1).unwrap();
        for c in sg.center_weights() {
            assert!((c - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn classic_five_point_quadratic() {
        // tabulated (-3, 12, 17, 12, -3) / 35
        let sg = SavitzkyGolay::new(5, 2).unwrap();
        let expect = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|v| v / 35.0);
        for (c, e) in sg.center_weights().iter().zip(expect) {
            assert!((c - e).abs() < 1e-14);
        }
    }

    #[test]
    fn reproduces_low_degree_polynomials() {
        let sg = SavitzkyGolay::new(9, 2).unwrap();
        let x: Vec<f64> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.1;
                0.3 - 1.2 * t + 0.7 * t * t
            })
            .collect();
        let y = sg.apply(&x).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn reduces_noise_on_sine() {
        let sg = SavitzkyGolay::new(9, 2).unwrap();
        let mut r = rng::seeded(3);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let clean: Vec<f64> = (0..240).map(|i| (i as f64 * 0.05).sin()).collect();
        let trials = 200;
        let (mut before, mut after) = (0.0, 0.0);
        for _ in 0..trials {
            let noisy: Vec<f64> = clean.iter().map(|c| c + noise.sample(&mut r)).collect();
            let y = sg.apply(&noisy).unwrap();
            before += noisy.iter().zip(&clean).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            after += y.iter().zip(&clean).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        }
        assert!(after < before * 0.6, "{after} vs {before}");
    }

    #[test]
    fn order_must_be_below_window() {
        assert!(SavitzkyGolay::new(5, 5).is_err());
        assert!(SavitzkyGolay::new(4, 1).is_err());
        assert!(SavitzkyGolay::new(5, 2).unwrap().apply(&[0.0; 4]).is_err());
    }
}
