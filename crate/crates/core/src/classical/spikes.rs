use alloc::format;
use alloc::vec::Vec;

use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Scales a MAD to a Gaussian standard deviation.
pub const MAD_TO_SIGMA: f64 = 1.4826;

fn median(buf: &mut [f64]) -> f64 {
    buf.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = buf.len();
    if n % 2 == 1 {
        buf[n / 2]
    } else {
        0.5 * (buf[n / 2 - 1] + buf[n / 2])
    }
}

/// Rolling-median spike filter on raw values.
///
/// A point is replaced by its window median when it deviates from it by more
/// than `threshold * 1.4826 * MAD`. Windows shrink at the edges; medians are
/// always taken over the original values.
pub fn despike_values(values: &[f64], window: usize, threshold: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if window > n {
        return Err(Error::Spectrum(format!(
            "spike window {window} larger than spectrum of {n} bands"
        )));
    }
    let half = window / 2;
    let mut out = values.to_vec();
    let mut buf = Vec::with_capacity(window);
    let mut dev = Vec::with_capacity(window);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        buf.clear();
        buf.extend_from_slice(&values[lo..hi]);
        let med = median(&mut buf);
        dev.clear();
        dev.extend(values[lo..hi].iter().map(|v| (v - med).abs()));
        let mad = median(&mut dev);
        if (values[i] - med).abs() > threshold * MAD_TO_SIGMA * mad {
            out[i] = med;
        }
    }
    Ok(out)
}

pub fn remove_spikes(s: &Spectrum, window: usize, threshold: f64) -> Result<Spectrum> {
    Ok(s.with_values(despike_values(s.values(), window, threshold)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.0 + i as f64 * 0.01).collect()
    }

    #[test]
    fn smooth_spectrum_untouched() {
        let wl = grid(60);
        let vals: Vec<f64> = wl.iter().map(|w| 0.5 + 0.2 * (3.0 * w).sin()).collect();
        let s = Spectrum::new(wl, vals.clone()).unwrap();
        assert_eq!(remove_spikes(&s, 7, 5.0).unwrap().values(), vals.as_slice());
    }

    #[test]
    fn single_spike_replaced() {
        let mut vals = vec![0.5; 30];
        vals[12] = 5.0;
        let s = Spectrum::new(grid(30), vals).unwrap();
        let out = remove_spikes(&s, 7, 5.0).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn adjacent_spikes_replaced() {
        let mut vals = vec![0.5; 30];
        vals[12] = 5.0;
        vals[13] = 4.0;
        let s = Spectrum::new(grid(30), vals).unwrap();
        let out = remove_spikes(&s, 7, 5.0).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn window_larger_than_spectrum() {
        let s = Spectrum::new(grid(5), vec![0.0; 5]).unwrap();
        assert!(remove_spikes(&s, 7, 5.0).is_err());
    }
}
