//! Central finite-difference verification of the backward passes.
//!
//! Each target exposes a scalar objective `<r, f(x)>` for a fixed random
//! projection `r`, its analytic gradient, and coordinate access to every
//! parameter and input. Coordinates whose perturbation flips a ReLU sign or
//! a max-pool argmax are skipped, since the objective is not differentiable
//! across those kinks.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::ops::{self, BatchNormParams, ConvParams, ConvSpec};
use crate::rng::{self, Rng};
use crate::tensor::Tensor1D;
use crate::unet::{ArchitectureConfig, Model};

/// A differentiable function under test, in 64-bit precision.
pub trait GradCheckTarget {
    fn num_coords(&self) -> usize;
    fn coord(&self, i: usize) -> f64;
    fn set_coord(&mut self, i: usize, v: f64);
    /// Objective value and a signature of the non-smooth activation pattern.
    fn objective(&self) -> Result<(f64, u64)>;
    /// Analytic gradient, indexed like the coordinates.
    fn gradient(&self) -> Result<Vec<f64>>;
    fn describe(&self, i: usize) -> String;
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub worst: Option<String>,
    pub checked: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// Relative step; the step for coordinate `x` is `STEP * max(1, |x|)`.
pub const STEP: f64 = 1e-5;

/// Compares analytic and central-difference gradients over every coordinate.
///
/// The error of coordinate `i` is `|a - n| / max(|a|, |n|, 1e-3 * max_j |a_j|)`,
/// so entries far below the gradient's overall scale are judged against that
/// scale rather than against their own (noise-level) magnitude.
pub fn grad_check(target: &mut impl GradCheckTarget, tolerance: f64) -> Result<GradCheckReport> {
    let analytic = target.gradient()?;
    if analytic.len() != target.num_coords() {
        return Err(Error::shape(
            "grad_check",
            "gradient length",
            target.num_coords(),
            analytic.len(),
        ));
    }
    if let Some(i) = analytic.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFinite {
            context: "analytic gradient",
            location: target.describe(i),
        });
    }
    let (_, base_sig) = target.objective()?;
    let scale = analytic.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let floor = (1e-3 * scale).max(1e-12);
    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        worst: None,
        checked: 0,
        skipped: 0,
        pass: false,
    };
    for i in 0..target.num_coords() {
        let x = target.coord(i);
        let h = STEP * x.abs().max(1.0);
        target.set_coord(i, x + h);
        let (fp, sp) = target.objective()?;
        target.set_coord(i, x - h);
        let (fm, sm) = target.objective()?;
        target.set_coord(i, x);
        if sp != base_sig || sm != base_sig {
            report.skipped += 1;
            continue;
        }
        let numeric = (fp - fm) / (2.0 * h);
        let a = analytic[i];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        report.checked += 1;
        if !(err <= report.max_rel_err) {
            report.max_rel_err = err;
            report.worst = Some(target.describe(i));
        }
    }
    report.pass = report.checked > 0 && report.max_rel_err < tolerance;
    Ok(report)
}

fn randn_tensor(rng: &mut Rng, channels: usize, len: usize, lo: f64, hi: f64) -> Tensor1D<f64> {
    let data = (0..channels * len).map(|_| rng.random_range(lo..hi)).collect();
    Tensor1D::from_vec(channels, len, data).expect("positive dims")
}

fn random_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Coordinate view over a list of flat buffers.
fn locate(lens: &[usize], mut i: usize) -> (usize, usize) {
    for (k, &n) in lens.iter().enumerate() {
        if i < n {
            return (k, i);
        }
        i -= n;
    }
    panic!("coordinate out of range")
}

/// conv1d or conv_transpose1d.
#[derive(Debug, Clone)]
pub struct ConvCheck {
    pub input: Tensor1D<f64>,
    pub spec: ConvSpec,
    pub params: ConvParams<f64>,
    pub upstream: Tensor1D<f64>,
    pub transpose: bool,
}

impl ConvCheck {
    pub fn new(
        rng: &mut Rng,
        spec: ConvSpec,
        len: usize,
        transpose: bool,
    ) -> Self {
        let input = randn_tensor(rng, spec.in_channels(), len, -1.0, 1.0);
        let params = ConvParams {
            weight: random_vec(rng, spec.weight_len()),
            bias: random_vec(rng, spec.out_channels()),
        };
        let out_len = if transpose {
            spec.transpose_output_len(len)
        } else {
            spec.conv_output_len(len)
        };
        let upstream = randn_tensor(rng, spec.out_channels(), out_len, -1.0, 1.0);
        Self {
            input,
            spec,
            params,
            upstream,
            transpose,
        }
    }

    /// Random small geometry.
    pub fn random(seed: u64, transpose: bool) -> Self {
        let mut rng = rng::seeded(seed);
        let k = [1, 3, 5][rng.random_range(0..3)];
        let s = rng.random_range(1..=2);
        let spec = ConvSpec::new(k, s, rng.random_range(1..4), rng.random_range(1..4)).expect("valid");
        let len = rng.random_range(2..12);
        Self::new(&mut rng, spec, len, transpose)
    }

    fn lens(&self) -> [usize; 3] {
        [self.params.weight.len(), self.params.bias.len(), self.input.data().len()]
    }
}

impl GradCheckTarget for ConvCheck {
    fn num_coords(&self) -> usize {
        self.lens().iter().sum()
    }

    fn coord(&self, i: usize) -> f64 {
        match locate(&self.lens(), i) {
            (0, j) => self.params.weight[j],
            (1, j) => self.params.bias[j],
            (_, j) => self.input.data()[j],
        }
    }

    fn set_coord(&mut self, i: usize, v: f64) {
        match locate(&self.lens(), i) {
            (0, j) => self.params.weight[j] = v,
            (1, j) => self.params.bias[j] = v,
            (_, j) => self.input.data_mut()[j] = v,
        }
    }

    fn objective(&self) -> Result<(f64, u64)> {
        let y = if self.transpose {
            ops::conv_transpose1d(&self.input, &self.spec, &self.params)?
        } else {
            ops::conv1d(&self.input, &self.spec, &self.params)?
        };
        Ok((y.dot(&self.upstream), 0))
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let g = if self.transpose {
            ops::conv_transpose1d_backward(&self.input, &self.spec, &self.params, &self.upstream)?
        } else {
            ops::conv1d_backward(&self.input, &self.spec, &self.params, &self.upstream)?
        };
        let mut out = g.d_weight;
        out.extend_from_slice(&g.d_bias);
        out.extend_from_slice(g.d_input.data());
        Ok(out)
    }

    fn describe(&self, i: usize) -> String {
        let name = ["weight", "bias", "input"];
        let (k, j) = locate(&self.lens(), i);
        format!("{}[{j}]", name[k])
    }
}

/// Train-mode batchnorm over a batch.
#[derive(Debug, Clone)]
pub struct BatchNormCheck {
    pub batch: Vec<Tensor1D<f64>>,
    pub params: BatchNormParams<f64>,
    pub upstream: Vec<Tensor1D<f64>>,
}

impl BatchNormCheck {
    pub fn new(seed: u64, batch: usize, channels: usize, len: usize) -> Self {
        let mut rng = rng::seeded(seed);
        let data = (0..batch).map(|_| randn_tensor(&mut rng, channels, len, -2.0, 2.0)).collect();
        let mut params = BatchNormParams::new(channels);
        params.gamma = (0..channels).map(|_| rng.random_range(0.5..2.0)).collect();
        params.beta = random_vec(&mut rng, channels);
        let upstream = (0..batch).map(|_| randn_tensor(&mut rng, channels, len, -1.0, 1.0)).collect();
        Self {
            batch: data,
            params,
            upstream,
        }
    }

    fn lens(&self) -> Vec<usize> {
        let mut l = vec![self.params.gamma.len(), self.params.beta.len()];
        l.extend(self.batch.iter().map(|t| t.data().len()));
        l
    }
}

impl GradCheckTarget for BatchNormCheck {
    fn num_coords(&self) -> usize {
        self.lens().iter().sum()
    }

    fn coord(&self, i: usize) -> f64 {
        match locate(&self.lens(), i) {
            (0, j) => self.params.gamma[j],
            (1, j) => self.params.beta[j],
            (k, j) => self.batch[k - 2].data()[j],
        }
    }

    fn set_coord(&mut self, i: usize, v: f64) {
        match locate(&self.lens(), i) {
            (0, j) => self.params.gamma[j] = v,
            (1, j) => self.params.beta[j] = v,
            (k, j) => self.batch[k - 2].data_mut()[j] = v,
        }
    }

    fn objective(&self) -> Result<(f64, u64)> {
        let (y, _, _) = ops::batchnorm_train(&self.batch, &self.params)?;
        Ok((y.iter().zip(&self.upstream).map(|(a, b)| a.dot(b)).sum(), 0))
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let (_, cache, _) = ops::batchnorm_train(&self.batch, &self.params)?;
        let g = ops::batchnorm_backward(&cache, &self.params, &self.upstream)?;
        let mut out = g.d_gamma;
        out.extend_from_slice(&g.d_beta);
        for t in &g.d_input {
            out.extend_from_slice(t.data());
        }
        Ok(out)
    }

    fn describe(&self, i: usize) -> String {
        match locate(&self.lens(), i) {
            (0, j) => format!("gamma[{j}]"),
            (1, j) => format!("beta[{j}]"),
            (k, j) => format!("input[{}][{j}]", k - 2),
        }
    }
}

/// Element-wise layers: ReLU and max pooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pointwise {
    Relu,
    MaxPool,
}

#[derive(Debug, Clone)]
pub struct PointwiseCheck {
    pub kind: Pointwise,
    pub input: Tensor1D<f64>,
    pub upstream: Tensor1D<f64>,
}

impl PointwiseCheck {
    /// Inputs have magnitude in `[0.1, 1]` so they stay clear of the kink.
    pub fn random(seed: u64, kind: Pointwise) -> Self {
        let mut rng = rng::seeded(seed);
        let channels = rng.random_range(1..4);
        let len = 2 * rng.random_range(1..8);
        let data = (0..channels * len)
            .map(|_| {
                let m = rng.random_range(0.1..1.0);
                if rng.random_bool(0.5) { m } else { -m }
            })
            .collect();
        let input = Tensor1D::from_vec(channels, len, data).expect("dims");
        let out_len = if kind == Pointwise::MaxPool { len / 2 } else { len };
        let upstream = randn_tensor(&mut rng, channels, out_len, -1.0, 1.0);
        Self {
            kind,
            input,
            upstream,
        }
    }
}

impl GradCheckTarget for PointwiseCheck {
    fn num_coords(&self) -> usize {
        self.input.data().len()
    }

    fn coord(&self, i: usize) -> f64 {
        self.input.data()[i]
    }

    fn set_coord(&mut self, i: usize, v: f64) {
        self.input.data_mut()[i] = v;
    }

    fn objective(&self) -> Result<(f64, u64)> {
        match self.kind {
            Pointwise::Relu => {
                let y = ops::relu(&self.input);
                let sig = self
                    .input
                    .data()
                    .iter()
                    .fold(0u64, |h, &v| h.wrapping_mul(31).wrapping_add((v > 0.0) as u64 + 1));
                Ok((y.dot(&self.upstream), sig))
            }
            Pointwise::MaxPool => {
                let p = ops::maxpool1d(&self.input)?;
                let sig = p.argmax.iter().fold(0u64, |h, &a| h.wrapping_mul(1_000_003).wrapping_add(a as u64));
                Ok((p.output.dot(&self.upstream), sig))
            }
        }
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let d = match self.kind {
            Pointwise::Relu => ops::relu_backward(&self.input, &self.upstream)?,
            Pointwise::MaxPool => ops::maxpool1d_backward(&ops::maxpool1d(&self.input)?, &self.upstream)?,
        };
        Ok(d.into_vec())
    }

    fn describe(&self, i: usize) -> String {
        format!("input[{i}]")
    }
}

/// Channel concatenation of two tensors.
#[derive(Debug, Clone)]
pub struct ConcatCheck {
    pub a: Tensor1D<f64>,
    pub b: Tensor1D<f64>,
    pub upstream: Tensor1D<f64>,
}

impl ConcatCheck {
    pub fn random(seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let len = rng.random_range(1..10);
        let ca = rng.random_range(1..4);
        let cb = rng.random_range(1..4);
        Self {
            a: randn_tensor(&mut rng, ca, len, -1.0, 1.0),
            b: randn_tensor(&mut rng, cb, len, -1.0, 1.0),
            upstream: randn_tensor(&mut rng, ca + cb, len, -1.0, 1.0),
        }
    }
}

impl GradCheckTarget for ConcatCheck {
    fn num_coords(&self) -> usize {
        self.a.data().len() + self.b.data().len()
    }

    fn coord(&self, i: usize) -> f64 {
        let n = self.a.data().len();
        if i < n { self.a.data()[i] } else { self.b.data()[i - n] }
    }

    fn set_coord(&mut self, i: usize, v: f64) {
        let n = self.a.data().len();
        if i < n {
            self.a.data_mut()[i] = v;
        } else {
            self.b.data_mut()[i - n] = v;
        }
    }

    fn objective(&self) -> Result<(f64, u64)> {
        Ok((ops::concat_channels(&self.a, &self.b)?.dot(&self.upstream), 0))
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let (ga, gb) = ops::split_channels(&self.upstream, self.a.channels())?;
        let mut out = ga.into_vec();
        out.extend(gb.into_vec());
        Ok(out)
    }

    fn describe(&self, i: usize) -> String {
        let n = self.a.data().len();
        if i < n { format!("a[{i}]") } else { format!("b[{}]", i - n) }
    }
}

/// MSE with respect to the prediction.
#[derive(Debug, Clone)]
pub struct MseCheck {
    pub pred: Tensor1D<f64>,
    pub target: Tensor1D<f64>,
}

impl MseCheck {
    pub fn random(seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let len = rng.random_range(1..32);
        Self {
            pred: randn_tensor(&mut rng, 1, len, -1.0, 1.0),
            target: randn_tensor(&mut rng, 1, len, -1.0, 1.0),
        }
    }
}

impl GradCheckTarget for MseCheck {
    fn num_coords(&self) -> usize {
        self.pred.data().len()
    }

    fn coord(&self, i: usize) -> f64 {
        self.pred.data()[i]
    }

    fn set_coord(&mut self, i: usize, v: f64) {
        self.pred.data_mut()[i] = v;
    }

    fn objective(&self) -> Result<(f64, u64)> {
        Ok((ops::mse_loss(&self.pred, &self.target)?, 0))
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        Ok(ops::mse_loss_backward(&self.pred, &self.target)?.into_vec())
    }

    fn describe(&self, i: usize) -> String {
        format!("pred[{i}]")
    }
}

/// A whole UNet in train mode: every trainable parameter and the input batch.
#[derive(Debug, Clone)]
pub struct ModelCheck {
    pub model: Model<f64>,
    pub batch: Vec<Tensor1D<f64>>,
    pub upstream: Vec<Tensor1D<f64>>,
}

impl ModelCheck {
    /// Random input batch and projection for `config`; biases and
    /// batchnorm affine parameters are randomized too so that every
    /// parameter carries a non-trivial gradient.
    pub fn new(config: &ArchitectureConfig, batch: usize, seed: u64) -> Result<Self> {
        let mut model = Model::<f64>::build(config, seed)?;
        let mut rng = rng::stream(seed, 1);
        for p in model.params_mut() {
            if p.iter().all(|&v| v == 0.0) {
                for v in p.iter_mut() {
                    *v = rng.random_range(-0.5..0.5);
                }
            } else if p.iter().all(|&v| v == 1.0) {
                for v in p.iter_mut() {
                    *v = rng.random_range(0.5..1.5);
                }
            }
        }
        let bands = config.bands;
        let batch_data = (0..batch).map(|_| randn_tensor(&mut rng, 1, bands, 0.0, 1.0)).collect();
        let upstream = (0..batch).map(|_| randn_tensor(&mut rng, 1, bands, -1.0, 1.0)).collect();
        Ok(Self {
            model,
            batch: batch_data,
            upstream,
        })
    }

    fn lens(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.model.params().iter().map(|p| p.len()).collect();
        l.extend(self.batch.iter().map(|t| t.data().len()));
        l
    }
}

impl GradCheckTarget for ModelCheck {
    fn num_coords(&self) -> usize {
        self.lens().iter().sum()
    }

    fn coord(&self, i: usize) -> f64 {
        let params = self.model.params();
        let (k, j) = locate(&self.lens(), i);
        if k < params.len() {
            params[k][j]
        } else {
            self.batch[k - params.len()].data()[j]
        }
    }

    fn set_coord(&mut self, i: usize, v: f64) {
        let lens = self.lens();
        let (k, j) = locate(&lens, i);
        let np = lens.len() - self.batch.len();
        if k < np {
            self.model.params_mut()[k][j] = v;
        } else {
            self.batch[k - np].data_mut()[j] = v;
        }
    }

    fn objective(&self) -> Result<(f64, u64)> {
        let (y, cache) = self.model.forward_train(&self.batch)?;
        let f = y.iter().zip(&self.upstream).map(|(a, b)| a.dot(b)).sum();
        Ok((f, cache.activation_signature()))
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let (_, cache) = self.model.forward_train(&self.batch)?;
        let g = self.model.backward(&cache, &self.upstream)?;
        let mut out: Vec<f64> = g.tensors().concat();
        for t in &g.d_input {
            out.extend_from_slice(t.data());
        }
        Ok(out)
    }

    fn describe(&self, i: usize) -> String {
        let lens = self.lens();
        let (k, j) = locate(&lens, i);
        let np = lens.len() - self.batch.len();
        if k < np {
            format!("parameter tensor {k}[{j}]")
        } else {
            format!("input[{}][{j}]", k - np)
        }
    }
}

/// Tolerance for single-layer checks.
pub const LAYER_TOLERANCE: f64 = 1e-5;
/// Tolerance for whole-network checks; errors compound through depth.
pub const MODEL_TOLERANCE: f64 = 1e-4;

/// Aggregate over the random trials of one operation.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub name: String,
    pub trials: usize,
    pub max_rel_err: f64,
    pub worst: Option<String>,
    pub tolerance: f64,
    pub checked: usize,
    pub skipped: usize,
    pub pass: bool,
}

fn run_trials<G: GradCheckTarget>(
    name: &str,
    trials: usize,
    tolerance: f64,
    mut make: impl FnMut(usize) -> Result<G>,
) -> Result<SuiteRow> {
    let mut row = SuiteRow {
        name: String::from(name),
        trials,
        max_rel_err: 0.0,
        worst: None,
        tolerance,
        checked: 0,
        skipped: 0,
        pass: true,
    };
    for t in 0..trials {
        let mut target = make(t)?;
        let r = grad_check(&mut target, tolerance)?;
        row.checked += r.checked;
        row.skipped += r.skipped;
        row.pass &= r.pass;
        if r.max_rel_err >= row.max_rel_err {
            row.max_rel_err = r.max_rel_err;
            row.worst = r.worst.map(|w| format!("trial {t}: {w}"));
        }
    }
    Ok(row)
}

/// `trials` random draws of every layer operation.
pub fn layer_suite(trials: usize, seed: u64) -> Result<Vec<SuiteRow>> {
    let tol = LAYER_TOLERANCE;
    let s = |t: usize, op: u64| seed.wrapping_mul(1000).wrapping_add(op * 100_000 + t as u64);
    Ok(vec![
        run_trials("conv1d", trials, tol, |t| Ok(ConvCheck::random(s(t, 1), false)))?,
        run_trials("conv_transpose1d", trials, tol, |t| Ok(ConvCheck::random(s(t, 2), true)))?,
        run_trials("batchnorm1d", trials, tol, |t| {
            let mut r = rng::seeded(s(t, 3));
            let (b, c, l) = (r.random_range(2..5), r.random_range(1..4), r.random_range(2..9));
            Ok(BatchNormCheck::new(s(t, 3), b, c, l))
        })?,
        run_trials("relu", trials, tol, |t| Ok(PointwiseCheck::random(s(t, 4), Pointwise::Relu)))?,
        run_trials("maxpool1d", trials, tol, |t| Ok(PointwiseCheck::random(s(t, 5), Pointwise::MaxPool)))?,
        run_trials("concat", trials, tol, |t| Ok(ConcatCheck::random(s(t, 6))))?,
        run_trials("mse_loss", trials, tol, |t| Ok(MseCheck::random(s(t, 7))))?,
    ])
}

/// Toy network for depth `depth`: base width 2 and `2^(depth+2)` bands.
pub fn toy_config(depth: usize, variant: crate::unet::EncoderVariant) -> ArchitectureConfig {
    ArchitectureConfig::new(depth, variant)
        .with_base_channels(2)
        .with_bands(1 << (depth + 2))
}

/// `trials_per_depth` whole-network checks at every depth, cycling through
/// the encoder variants.
pub fn model_suite(trials_per_depth: usize, seed: u64) -> Result<Vec<SuiteRow>> {
    use crate::unet::{EncoderVariant, MAX_DEPTH};
    (0..=MAX_DEPTH)
        .map(|depth| {
            let name = format!("unet depth {depth}");
            run_trials(&name, trials_per_depth, MODEL_TOLERANCE, |t| {
                let variant = EncoderVariant::ALL[t % 3];
                let trial_seed = seed.wrapping_add((depth * 1000 + t) as u64);
                ModelCheck::new(&toy_config(depth, variant), 2, trial_seed)
            })
        })
        .collect()
}
