use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

/// Geometry of a 1D convolution: odd kernel, stride 1 or 2, zero padding
/// of `(k - 1) / 2` on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSpec {
    kernel_size: usize,
    stride: usize,
    in_channels: usize,
    out_channels: usize,
}

impl ConvSpec {
    pub fn new(
        kernel_size: usize,
        stride: usize,
        in_channels: usize,
        out_channels: usize,
    ) -> Result<Self> {
        if kernel_size == 0 || kernel_size % 2 == 0 {
            return Err(Error::config(alloc::format!(
                "kernel size must be odd and positive, got {kernel_size}"
            )));
        }
        if stride != 1 && stride != 2 {
            return Err(Error::config(alloc::format!(
                "stride must be 1 or 2, got {stride}"
            )));
        }
        if in_channels == 0 || out_channels == 0 {
            return Err(Error::config("channel counts must be positive"));
        }
        Ok(Self {
            kernel_size,
            stride,
            in_channels,
            out_channels,
        })
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn padding(&self) -> usize {
        (self.kernel_size - 1) / 2
    }

    /// `ceil(len / stride)`.
    pub fn conv_output_len(&self, len: usize) -> usize {
        len.div_ceil(self.stride)
    }

    /// Transposed-convolution output: `stride * len`.
    pub fn transpose_output_len(&self, len: usize) -> usize {
        len * self.stride
    }

    pub fn weight_len(&self) -> usize {
        self.kernel_size * self.in_channels * self.out_channels
    }
}

/// Weights and bias of a conv or conv-transpose layer.
///
/// Convolution weights are laid out `out x in x k`; transposed-convolution
/// weights `in x out x k`, so that a conv and a conv-transpose that are
/// adjoint to each other share one weight buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvParams<T> {
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> ConvParams<T> {
    pub fn zeros(spec: &ConvSpec) -> Self {
        Self {
            weight: vec![T::zero(); spec.weight_len()],
            bias: vec![T::zero(); spec.out_channels()],
        }
    }

    fn check(&self, spec: &ConvSpec, context: &'static str) -> Result<()> {
        if self.weight.len() != spec.weight_len() {
            return Err(Error::shape(
                context,
                "weight length",
                spec.weight_len(),
                self.weight.len(),
            ));
        }
        if self.bias.len() != spec.out_channels() {
            return Err(Error::shape(
                context,
                "bias length",
                spec.out_channels(),
                self.bias.len(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvGrads<T> {
    pub d_weight: Vec<T>,
    pub d_bias: Vec<T>,
    pub d_input: Tensor1D<T>,
}

/// Indices `i < count` for which `stride * i + offset` falls in `0..target`.
fn valid_taps(offset: isize, stride: usize, count: usize, target: usize) -> Range<usize> {
    let s = stride as isize;
    let lo = if offset < 0 {
        ((-offset) + s - 1) / s
    } else {
        0
    };
    let room = target as isize - offset;
    let hi = if room <= 0 { 0 } else { (room + s - 1) / s };
    let hi = (hi as usize).min(count);
    let lo = (lo as usize).min(hi);
    lo..hi
}

fn check_input<T: Scalar>(input: &Tensor1D<T>, channels: usize, ctx: &'static str) -> Result<()> {
    if input.channels() != channels {
        return Err(Error::shape(ctx, "input channels", channels, input.channels()));
    }
    Ok(())
}

/// Zero-padded cross-correlation:
/// `y[o][i] = b[o] + sum_{c,j} w[o][c][j] * x[c][s*i + j - pad]`.
pub fn conv1d<T: Scalar>(
    input: &Tensor1D<T>,
    spec: &ConvSpec,
    params: &ConvParams<T>,
) -> Result<Tensor1D<T>> {
    check_input(input, spec.in_channels, "conv1d")?;
    params.check(spec, "conv1d")?;
    let len = input.len();
    let out_len = spec.conv_output_len(len);
    let k = spec.kernel_size;
    let s = spec.stride;
    let pad = spec.padding() as isize;
    let mut out = Tensor1D::zeros(spec.out_channels, out_len);
    for o in 0..spec.out_channels {
        let y = out.channel_mut(o);
        y.fill(params.bias[o]);
        for c in 0..spec.in_channels {
            let x = input.channel(c);
            let w = &params.weight[(o * spec.in_channels + c) * k..][..k];
            for (j, &wj) in w.iter().enumerate() {
                let off = j as isize - pad;
                let r = valid_taps(off, s, out_len, len);
                if r.is_empty() {
                    continue;
                }
                let start = ((s * r.start) as isize + off) as usize;
                if s == 1 {
                    for (yi, &xi) in y[r.clone()].iter_mut().zip(&x[start..]) {
                        *yi += wj * xi;
                    }
                } else {
                    for (yi, &xi) in y[r.clone()].iter_mut().zip(x[start..].iter().step_by(s)) {
                        *yi += wj * xi;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Adjoint of [`conv1d`] with respect to weights, bias and input.
pub fn conv1d_backward<T: Scalar>(
    input: &Tensor1D<T>,
    spec: &ConvSpec,
    params: &ConvParams<T>,
    grad_out: &Tensor1D<T>,
) -> Result<ConvGrads<T>> {
    check_input(input, spec.in_channels, "conv1d_backward")?;
    params.check(spec, "conv1d_backward")?;
    let len = input.len();
    let out_len = spec.conv_output_len(len);
    if grad_out.channels() != spec.out_channels {
        return Err(Error::shape(
            "conv1d_backward",
            "grad channels",
            spec.out_channels,
            grad_out.channels(),
        ));
    }
    if grad_out.len() != out_len {
        return Err(Error::shape(
            "conv1d_backward",
            "grad length",
            out_len,
            grad_out.len(),
        ));
    }
    let k = spec.kernel_size;
    let s = spec.stride;
    let pad = spec.padding() as isize;
    let mut d_weight = vec![T::zero(); spec.weight_len()];
    let mut d_bias = vec![T::zero(); spec.out_channels];
    let mut d_input = Tensor1D::zeros(spec.in_channels, len);
    for o in 0..spec.out_channels {
        let dy = grad_out.channel(o);
        d_bias[o] = dy.iter().copied().sum();
        for c in 0..spec.in_channels {
            let x = input.channel(c);
            let base = (o * spec.in_channels + c) * k;
            for j in 0..k {
                let off = j as isize - pad;
                let r = valid_taps(off, s, out_len, len);
                if r.is_empty() {
                    continue;
                }
                let start = ((s * r.start) as isize + off) as usize;
                let wj = params.weight[base + j];
                let mut acc = T::zero();
                let dx = d_input.channel_mut(c);
                if s == 1 {
                    for ((&g, &xi), dxi) in dy[r.clone()]
                        .iter()
                        .zip(&x[start..])
                        .zip(dx[start..].iter_mut())
                    {
                        acc += g * xi;
                        *dxi += wj * g;
                    }
                } else {
                    for ((&g, &xi), dxi) in dy[r.clone()]
                        .iter()
                        .zip(x[start..].iter().step_by(s))
                        .zip(dx[start..].iter_mut().step_by(s))
                    {
                        acc += g * xi;
                        *dxi += wj * g;
                    }
                }
                d_weight[base + j] = acc;
            }
        }
    }
    Ok(ConvGrads {
        d_weight,
        d_bias,
        d_input,
    })
}

/// Transposed convolution, the linear adjoint of [`conv1d`] with the same
/// geometry (plus bias). Output length is `stride * input length`.
pub fn conv_transpose1d<T: Scalar>(
    input: &Tensor1D<T>,
    spec: &ConvSpec,
    params: &ConvParams<T>,
) -> Result<Tensor1D<T>> {
    check_input(input, spec.in_channels, "conv_transpose1d")?;
    params.check(spec, "conv_transpose1d")?;
    let len = input.len();
    let out_len = spec.transpose_output_len(len);
    let k = spec.kernel_size;
    let s = spec.stride;
    let pad = spec.padding() as isize;
    let mut out = Tensor1D::zeros(spec.out_channels, out_len);
    for o in 0..spec.out_channels {
        out.channel_mut(o).fill(params.bias[o]);
    }
    for c in 0..spec.in_channels {
        let x = input.channel(c);
        for o in 0..spec.out_channels {
            let w = &params.weight[(c * spec.out_channels + o) * k..][..k];
            let y = out.channel_mut(o);
            for (j, &wj) in w.iter().enumerate() {
                let off = j as isize - pad;
                let r = valid_taps(off, s, len, out_len);
                if r.is_empty() {
                    continue;
                }
                let start = ((s * r.start) as isize + off) as usize;
                for (yi, &xi) in y[start..].iter_mut().step_by(s).zip(&x[r]) {
                    *yi += wj * xi;
                }
            }
        }
    }
    Ok(out)
}

/// Adjoint of [`conv_transpose1d`].
pub fn conv_transpose1d_backward<T: Scalar>(
    input: &Tensor1D<T>,
    spec: &ConvSpec,
    params: &ConvParams<T>,
    grad_out: &Tensor1D<T>,
) -> Result<ConvGrads<T>> {
    check_input(input, spec.in_channels, "conv_transpose1d_backward")?;
    params.check(spec, "conv_transpose1d_backward")?;
    let len = input.len();
    let out_len = spec.transpose_output_len(len);
    if grad_out.channels() != spec.out_channels {
        return Err(Error::shape(
            "conv_transpose1d_backward",
            "grad channels",
            spec.out_channels,
            grad_out.channels(),
        ));
    }
    if grad_out.len() != out_len {
        return Err(Error::shape(
            "conv_transpose1d_backward",
            "grad length",
            out_len,
            grad_out.len(),
        ));
    }
    let k = spec.kernel_size;
    let s = spec.stride;
    let pad = spec.padding() as isize;
    let mut d_weight = vec![T::zero(); spec.weight_len()];
    let mut d_bias = vec![T::zero(); spec.out_channels];
    let mut d_input = Tensor1D::zeros(spec.in_channels, len);
    for o in 0..spec.out_channels {
        d_bias[o] = grad_out.channel(o).iter().copied().sum();
    }
    for c in 0..spec.in_channels {
        let x = input.channel(c);
        for o in 0..spec.out_channels {
            let dy = grad_out.channel(o);
            let base = (c * spec.out_channels + o) * k;
            for j in 0..k {
                let off = j as isize - pad;
                let r = valid_taps(off, s, len, out_len);
                if r.is_empty() {
                    continue;
                }
                let start = ((s * r.start) as isize + off) as usize;
                let wj = params.weight[base + j];
                let mut acc = T::zero();
                let dx = &mut d_input.channel_mut(c)[r.clone()];
                for ((&g, &xi), dxi) in dy[start..]
                    .iter()
                    .step_by(s)
                    .zip(&x[r.clone()])
                    .zip(dx.iter_mut())
                {
                    acc += g * xi;
                    *dxi += wj * g;
                }
                d_weight[base + j] = acc;
            }
        }
    }
    Ok(ConvGrads {
        d_weight,
        d_bias,
        d_input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    /// Direct nested-loop cross-correlation, no range arithmetic.
    fn naive_conv(x: &[Vec<f64>], w: &[f64], b: &[f64], k: usize, s: usize, cout: usize) -> Vec<Vec<f64>> {
        let cin = x.len();
        let len = x[0].len();
        let pad = (k - 1) / 2;
        let out_len = (len + s - 1) / s;
        let mut y = vec![vec![0.0; out_len]; cout];
        for o in 0..cout {
            for i in 0..out_len {
                let mut acc = b[o];
                for c in 0..cin {
                    for j in 0..k {
                        let p = (s * i + j) as isize - pad as isize;
                        if p >= 0 && (p as usize) < len {
                            acc += w[(o * cin + c) * k + j] * x[c][p as usize];
                        }
                    }
                }
                y[o][i] = acc;
            }
        }
        y
    }

    fn ramp(n: usize) -> Tensor1D<f64> {
        Tensor1D::from_f64(&(1..=n).map(|v| v as f64).collect::<Vec<_>>())
    }

    #[test]
    fn identity_kernel() {
        let spec = ConvSpec::new(1, 1, 1, 1).unwrap();
        let params = ConvParams {
            weight: vec![1.0],
            bias: vec![0.0],
        };
        let y = conv1d(&ramp(5), &spec, &params).unwrap();
        assert_eq!(y.data(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn difference_kernel_matches_hand_value() {
        let spec = ConvSpec::new(3, 1, 1, 1).unwrap();
        let params = ConvParams {
            weight: vec![1.0, 0.0, -1.0],
            bias: vec![0.0],
        };
        let y = conv1d(&ramp(5), &spec, &params).unwrap();
        assert_eq!(y.data(), &[-2.0, -2.0, -2.0, -2.0, 4.0]);
    }

    #[test]
    fn stride_two_halves_length() {
        let spec = ConvSpec::new(3, 2, 1, 2).unwrap();
        let params = ConvParams::zeros(&spec);
        let y = conv1d(&Tensor1D::<f64>::zeros(1, 240), &spec, &params).unwrap();
        assert_eq!(y.len(), 120);
        let y = conv1d(&Tensor1D::<f64>::zeros(1, 7), &spec, &params).unwrap();
        assert_eq!(y.len(), 4);
    }

    #[test]
    fn transpose_doubles_length_and_broadcasts_bias() {
        let spec = ConvSpec::new(3, 2, 2, 3).unwrap();
        let mut params = ConvParams::<f64>::zeros(&spec);
        params.weight.iter_mut().for_each(|w| *w = 0.7);
        params.bias = vec![0.1, -0.2, 0.3];
        let y = conv_transpose1d(&Tensor1D::zeros(2, 15), &spec, &params).unwrap();
        assert_eq!(y.len(), 30);
        for o in 0..3 {
            assert!(y.channel(o).iter().all(|&v| v == params.bias[o]));
        }
    }

    #[test]
    fn even_kernel_rejected() {
        assert!(matches!(ConvSpec::new(4, 1, 1, 1), Err(Error::Config(_))));
        assert!(matches!(ConvSpec::new(3, 3, 1, 1), Err(Error::Config(_))));
    }

    #[test]
    fn channel_mismatch_names_dimension() {
        let spec = ConvSpec::new(3, 1, 2, 1).unwrap();
        let err = conv1d(&Tensor1D::<f64>::zeros(3, 8), &spec, &ConvParams::zeros(&spec)).unwrap_err();
        assert_eq!(
            err,
            Error::Shape {
                context: "conv1d",
                dimension: "input channels",
                expected: 2,
                actual: 3
            }
        );
    }

    #[test]
    fn matches_naive_loops() {
        let mut r = rng::seeded(11);
        for _ in 0..50 {
            let k = [1, 3, 5, 7][r.random_range(0..4)];
            let s = r.random_range(1..=2);
            let cin = r.random_range(1..4);
            let cout = r.random_range(1..4);
            let len = r.random_range(1..20);
            let spec = ConvSpec::new(k, s, cin, cout).unwrap();
            let x: Vec<Vec<f64>> = (0..cin)
                .map(|_| (0..len).map(|_| r.random_range(-1.0..1.0)).collect())
                .collect();
            let w: Vec<f64> = (0..spec.weight_len()).map(|_| r.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..cout).map(|_| r.random_range(-1.0..1.0)).collect();
            let expect = naive_conv(&x, &w, &b, k, s, cout);
            let input = Tensor1D::from_vec(cin, len, x.concat()).unwrap();
            let got = conv1d(&input, &spec, &ConvParams { weight: w, bias: b }).unwrap();
            for o in 0..cout {
                for (a, e) in got.channel(o).iter().zip(&expect[o]) {
                    assert!((a - e).abs() < 1e-12);
                }
            }
        }
    }
}
