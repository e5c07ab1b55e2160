use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

/// Weight of the previous running statistic in the EMA update.
pub const BN_MOMENTUM: f64 = 0.9;
pub const BN_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormParams<T> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
    pub running_mean: Vec<T>,
    /// Strictly positive.
    pub running_var: Vec<T>,
}

impl<T: Scalar> BatchNormParams<T> {
    pub fn new(channels: usize) -> Self {
        Self {
            gamma: vec![T::one(); channels],
            beta: vec![T::zero(); channels],
            running_mean: vec![T::zero(); channels],
            running_var: vec![T::one(); channels],
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }
}

/// Running statistics produced by a train-mode pass; the caller decides
/// whether to commit them.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningStats<T> {
    pub mean: Vec<T>,
    pub var: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct BatchNormCache<T> {
    normalized: Vec<Tensor1D<T>>,
    inv_std: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormGrads<T> {
    pub d_gamma: Vec<T>,
    pub d_beta: Vec<T>,
    pub d_input: Vec<Tensor1D<T>>,
}

fn check_batch<T: Scalar>(batch: &[Tensor1D<T>], channels: usize, ctx: &'static str) -> Result<()> {
    let first = batch.first().ok_or(Error::config("empty batch"))?;
    for t in batch {
        if t.channels() != channels {
            return Err(Error::shape(ctx, "channels", channels, t.channels()));
        }
        if t.len() != first.len() {
            return Err(Error::shape(ctx, "length", first.len(), t.len()));
        }
    }
    Ok(())
}

/// Normalizes each channel over (batch x length) with the batch statistics.
pub fn batchnorm_train<T: Scalar>(
    batch: &[Tensor1D<T>],
    params: &BatchNormParams<T>,
) -> Result<(Vec<Tensor1D<T>>, BatchNormCache<T>, RunningStats<T>)> {
    let channels = params.channels();
    check_batch(batch, channels, "batchnorm_train")?;
    if batch.len() < 2 {
        return Err(Error::config(
            "batchnorm in train mode needs a batch of at least 2",
        ));
    }
    let len = batch[0].len();
    let count = T::lit((batch.len() * len) as f64);
    let eps = T::lit(BN_EPSILON);
    let momentum = T::lit(BN_MOMENTUM);
    let mut normalized: Vec<Tensor1D<T>> = batch.iter().map(|t| Tensor1D::zeros(channels, t.len())).collect();
    let mut out: Vec<Tensor1D<T>> = normalized.clone();
    let mut inv_std = vec![T::zero(); channels];
    let mut stats = RunningStats {
        mean: vec![T::zero(); channels],
        var: vec![T::zero(); channels],
    };
    for c in 0..channels {
        let sum: T = batch.iter().map(|t| t.channel(c).iter().copied().sum::<T>()).sum();
        let mean = sum / count;
        let sq: T = batch
            .iter()
            .map(|t| t.channel(c).iter().map(|&v| (v - mean) * (v - mean)).sum::<T>())
            .sum();
        let var = sq / count;
        let istd = T::one() / (var + eps).sqrt();
        inv_std[c] = istd;
        for ((t, n), o) in batch.iter().zip(normalized.iter_mut()).zip(out.iter_mut()) {
            for ((&v, nv), ov) in t
                .channel(c)
                .iter()
                .zip(n.channel_mut(c).iter_mut())
                .zip(o.channel_mut(c).iter_mut())
            {
                *nv = (v - mean) * istd;
                *ov = params.gamma[c] * *nv + params.beta[c];
            }
        }
        let unbiased = sq / (count - T::one());
        stats.mean[c] = momentum * params.running_mean[c] + (T::one() - momentum) * mean;
        stats.var[c] = momentum * params.running_var[c] + (T::one() - momentum) * unbiased;
    }
    Ok((out, BatchNormCache { normalized, inv_std }, stats))
}

/// Inference-mode normalization with the running statistics.
pub fn batchnorm_infer<T: Scalar>(
    input: &Tensor1D<T>,
    params: &BatchNormParams<T>,
) -> Result<Tensor1D<T>> {
    let channels = params.channels();
    if input.channels() != channels {
        return Err(Error::shape(
            "batchnorm_infer",
            "channels",
            channels,
            input.channels(),
        ));
    }
    let eps = T::lit(BN_EPSILON);
    let mut out = Tensor1D::zeros(channels, input.len());
    for c in 0..channels {
        let scale = params.gamma[c] / (params.running_var[c] + eps).sqrt();
        let shift = params.beta[c] - params.running_mean[c] * scale;
        for (o, &v) in out.channel_mut(c).iter_mut().zip(input.channel(c)) {
            *o = v * scale + shift;
        }
    }
    Ok(out)
}

/// Full batch-statistics chain rule.
pub fn batchnorm_backward<T: Scalar>(
    cache: &BatchNormCache<T>,
    params: &BatchNormParams<T>,
    grad_out: &[Tensor1D<T>],
) -> Result<BatchNormGrads<T>> {
    let channels = params.channels();
    if grad_out.len() != cache.normalized.len() {
        return Err(Error::shape(
            "batchnorm_backward",
            "batch size",
            cache.normalized.len(),
            grad_out.len(),
        ));
    }
    check_batch(grad_out, channels, "batchnorm_backward")?;
    if grad_out[0].len() != cache.normalized[0].len() {
        return Err(Error::shape(
            "batchnorm_backward",
            "length",
            cache.normalized[0].len(),
            grad_out[0].len(),
        ));
    }
    let count = T::lit((grad_out.len() * grad_out[0].len()) as f64);
    let mut d_gamma = vec![T::zero(); channels];
    let mut d_beta = vec![T::zero(); channels];
    let mut d_input: Vec<Tensor1D<T>> = grad_out
        .iter()
        .map(|t| Tensor1D::zeros(channels, t.len()))
        .collect();
    for c in 0..channels {
        let mut sum_dy = T::zero();
        let mut sum_dy_xhat = T::zero();
        for (g, n) in grad_out.iter().zip(&cache.normalized) {
            for (&dy, &xh) in g.channel(c).iter().zip(n.channel(c)) {
                sum_dy += dy;
                sum_dy_xhat += dy * xh;
            }
        }
        d_beta[c] = sum_dy;
        d_gamma[c] = sum_dy_xhat;
        let k = params.gamma[c] * cache.inv_std[c] / count;
        for ((g, n), dx) in grad_out.iter().zip(&cache.normalized).zip(d_input.iter_mut()) {
            for ((&dy, &xh), d) in g
                .channel(c)
                .iter()
                .zip(n.channel(c))
                .zip(dx.channel_mut(c).iter_mut())
            {
                *d = k * (count * dy - sum_dy - xh * sum_dy_xhat);
            }
        }
    }
    Ok(BatchNormGrads {
        d_gamma,
        d_beta,
        d_input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn random_batch(seed: u64, b: usize, c: usize, l: usize) -> Vec<Tensor1D<f64>> {
        let mut r = rng::seeded(seed);
        (0..b)
            .map(|_| {
                Tensor1D::from_vec(c, l, (0..c * l).map(|_| r.random_range(-3.0..5.0)).collect())
                    .unwrap()
            })
            .collect()
    }

    fn channel_moments(batch: &[Tensor1D<f64>], c: usize) -> (f64, f64) {
        let vals: Vec<f64> = batch.iter().flat_map(|t| t.channel(c).to_vec()).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var)
    }

    #[test]
    fn normalizes_per_channel() {
        let batch = random_batch(1, 4, 3, 16);
        let (out, _, _) = batchnorm_train(&batch, &BatchNormParams::new(3)).unwrap();
        for c in 0..3 {
            let (m, v) = channel_moments(&out, c);
            assert!(m.abs() <= 1e-6);
            assert!((v - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn affine_post_map() {
        let batch = random_batch(2, 4, 2, 32);
        let (normed, _, _) = batchnorm_train(&batch, &BatchNormParams::new(2)).unwrap();
        let mut p = BatchNormParams::new(2);
        p.gamma = vec![2.0, 2.0];
        p.beta = vec![3.0, 3.0];
        let (out, _, _) = batchnorm_train(&normed, &p).unwrap();
        for c in 0..2 {
            let (m, v) = channel_moments(&out, c);
            assert!((m - 3.0).abs() < 1e-4);
            assert!((v.sqrt() - 2.0).abs() < 1e-4);
        }
    }

    #[test]
    fn batch_of_one_rejected_in_train_mode() {
        let batch = random_batch(3, 1, 2, 8);
        assert!(batchnorm_train(&batch, &BatchNormParams::new(2)).is_err());
        assert!(batchnorm_infer(&batch[0], &BatchNormParams::new(2)).is_ok());
    }

    #[test]
    fn running_stats_follow_ema() {
        let batch = random_batch(4, 3, 1, 10);
        let (m, v) = channel_moments(&batch, 0);
        let n = 30.0;
        let (_, _, stats) = batchnorm_train(&batch, &BatchNormParams::new(1)).unwrap();
        assert!((stats.mean[0] - 0.1 * m).abs() < 1e-12);
        assert!((stats.var[0] - (0.9 + 0.1 * v * n / (n - 1.0))).abs() < 1e-12);
        assert!(stats.var[0] > 0.0);
    }
}
