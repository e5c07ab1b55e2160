use crate::error::{Error, Result};
use crate::ops::mse_loss;
use crate::scalar::Scalar;
use crate::synth::TrainingSample;
use crate::tensor::Tensor1D;
use crate::unet::Model;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    /// Mean per-spectrum Pearson correlation against the targets.
    pub pearson_r: f64,
    /// Spectra where r was undefined (constant output or target) and
    /// counted as 0.
    pub undefined_r: usize,
    pub count: usize,
}

/// Pearson correlation, or `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len().min(b.len()) as f64;
    if n < 2.0 {
        return None;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some((sab / num_traits::Float::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

/// Inference-mode metrics over a sample set.
pub fn evaluate<T: Scalar>(model: &Model<T>, samples: &[TrainingSample]) -> Result<Metrics> {
    if samples.is_empty() {
        return Err(Error::Data("cannot evaluate on an empty set".into()));
    }
    let (mut mse, mut r, mut undefined) = (0.0, 0.0, 0);
    for s in samples {
        let x = Tensor1D::<T>::from_f64(&s.input);
        let y = Tensor1D::<T>::from_f64(&s.target);
        let out = model.infer_one(&x)?;
        mse += mse_loss(&out, &y)?.as_f64();
        match pearson(&out.to_f64(), &s.target) {
            Some(v) => r += v,
            None => undefined += 1,
        }
    }
    let n = samples.len() as f64;
    Ok(Metrics {
        mse: mse / n,
        pearson_r: r / n,
        undefined_r: undefined,
        count: samples.len(),
    })
}
