//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report reads top to
//! bottom. Pass criterion numbers as arguments to run a subset. Failures
//! only set the exit status when `SPECUNET_ACCEPTANCE_STRICT=1`, so the
//! remaining test targets of a workspace run still execute.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use specunet::bench::bench;
use specunet::checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint};
use specunet::cube_io::{decode_cube, encode_cube, read_cube, write_cube};
use specunet::processing::preprocess_cube;
use specunet::synth_cube::synthetic_cube;
use specunet_core::classical::{remove_continuum, upper_hull, upper_hull_values, ClassicalPipeline, ContinuumMode, PipelineConfig, Spectrum};
use specunet_core::gradcheck::{layer_suite, model_suite, LAYER_TOLERANCE, MODEL_TOLERANCE};
use specunet_core::ops::{conv1d, conv_transpose1d, ConvParams, ConvSpec};
use specunet_core::rng;
use specunet_core::synth::{draw_proportions, gen_synthetic_library, NoiseSchedule, SampleGenerator};
use specunet_core::tensor::Tensor1D;
use specunet_core::train::{evaluate, to_batch, train, AdamHyper, TrainConfig, Trainer};
use specunet_core::unet::{ablation_grid, count_flops, ArchitectureConfig, BlockKind, EncoderVariant, Layer, Model};
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria = [
        Criterion { id: 1, name: "gradient correctness", budget: secs(120), run: gradients },
        Criterion { id: 2, name: "conv adjoint identity", budget: secs(30), run: adjoint },
        Criterion { id: 3, name: "shape law", budget: secs(10), run: shape_law },
        Criterion { id: 4, name: "FLOPs counter", budget: secs(30), run: flops },
        Criterion { id: 5, name: "continuum removal oracle", budget: secs(30), run: continuum },
        Criterion { id: 6, name: "mixture statistics", budget: secs(60), run: mixtures },
        Criterion { id: 7, name: "overfit convergence", budget: secs(300), run: overfit },
        Criterion { id: 8, name: "desk-scale end-to-end", budget: secs(1800), run: end_to_end },
        Criterion { id: 9, name: "cube speed and determinism", budget: secs(600), run: speed },
        Criterion { id: 10, name: "serialization", budget: secs(10), run: serialization },
    ];
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let t = Instant::now();
        let result = (c.run)();
        let elapsed = t.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {} s budget", c.budget.as_secs())),
            Err(d) => (false, d),
        };
        failed += !ok as usize;
        println!(
            "criterion {:>2} {:<28} {}  [{:.1} s]  {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            detail
        );
    }
    if failed == 0 {
        return ExitCode::SUCCESS;
    }
    println!("{failed} criterion(s) failed");
    if std::env::var_os("SPECUNET_ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ------------------------------------------------------------------------

fn gradients() -> Outcome {
    let layers = layer_suite(100, 2024).map_err(|e| e.to_string())?;
    let models = model_suite(100, 2024).map_err(|e| e.to_string())?;
    for r in &layers {
        ensure(r.pass && r.max_rel_err < LAYER_TOLERANCE && r.trials == 100, || {
            format!("{} max rel err {:.3e} ({:?})", r.name, r.max_rel_err, r.worst)
        })?;
    }
    for r in &models {
        ensure(r.pass && r.max_rel_err < MODEL_TOLERANCE, || {
            format!("{} max rel err {:.3e} ({:?})", r.name, r.max_rel_err, r.worst)
        })?;
    }
    let worst_layer = layers.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    let worst_model = models.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    let checked: usize = layers.iter().chain(&models).map(|r| r.checked).sum();
    let skipped: usize = layers.iter().chain(&models).map(|r| r.skipped).sum();
    Ok(format!(
        "{} ops x 100 trials, max rel err {worst_layer:.2e}; 4 depths x 100 networks, max {worst_model:.2e}; {checked} coords, {skipped} kink-skipped",
        layers.len()
    ))
}

// 2 ------------------------------------------------------------------------

fn adjoint() -> Outcome {
    let mut r = rng::seeded(5150);
    let mut worst = 0.0f64;
    for draw in 0..200 {
        let k = [1, 3, 5, 7][r.random_range(0..4)];
        let s = r.random_range(1..=2);
        let (cin, cout) = (r.random_range(1..5), r.random_range(1..5));
        let m = r.random_range(1..30);
        let len = s * m;
        let conv = ConvSpec::new(k, s, cin, cout).unwrap();
        let tconv = ConvSpec::new(k, s, cout, cin).unwrap();
        let weight: Vec<f64> = (0..conv.weight_len()).map(|_| r.random_range(-1.0..1.0)).collect();
        let p = ConvParams { weight: weight.clone(), bias: vec![0.0; cout] };
        let pt = ConvParams { weight, bias: vec![0.0; cin] };
        let x = random_tensor(&mut r, cin, len);
        let y = random_tensor(&mut r, cout, m);
        let ax = conv1d(&x, &conv, &p).unwrap();
        let aty = conv_transpose1d(&y, &tconv, &pt).unwrap();
        ensure(ax.len() == m && aty.len() == len, || format!("draw {draw}: length law broken"))?;
        let lhs = ax.dot(&y);
        let rhs = x.dot(&aty);
        let err = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        worst = worst.max(err);
        ensure(err <= 1e-10, || {
            format!("draw {draw} (k={k} s={s} {cin}->{cout} len {len}): <Ax,y>={lhs} <x,A'y>={rhs}")
        })?;
    }
    Ok(format!("200 draws, worst relative gap {worst:.2e}"))
}

fn random_tensor(r: &mut rng::Rng, c: usize, l: usize) -> Tensor1D<f64> {
    Tensor1D::from_vec(c, l, (0..c * l).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap()
}

// 3 ------------------------------------------------------------------------

fn shape_law() -> Outcome {
    let mut r = rng::seeded(3);
    let x = Tensor1D::<f32>::from_f64(&(0..240).map(|_| r.random::<f64>()).collect::<Vec<_>>());
    for cfg in ablation_grid() {
        let m = Model::<f32>::build(&cfg, 1).map_err(|e| e.to_string())?;
        let (y, lengths) = m.infer_traced(&x).map_err(|e| e.to_string())?;
        ensure(y.channels() == 1 && y.len() == 240, || format!("{}: output {}x{}", cfg.name(), y.channels(), y.len()))?;
        let n = cfg.depth;
        let kinds: Vec<BlockKind> = m.layout().blocks.iter().map(|b| b.kind).collect();
        for (kind, &len) in kinds.iter().zip(&lengths) {
            let expect = match *kind {
                BlockKind::Encoder(i) => 240 >> i,
                BlockKind::Bottleneck => 240 >> n,
                BlockKind::Decoder(l) => 240 >> (l - 1),
                BlockKind::Output => 240,
            };
            ensure(len == expect, || format!("{}: {kind:?} length {len}, expected {expect}", cfg.name()))?;
        }
        let bott = m.block_index(BlockKind::Bottleneck).unwrap();
        let inner = m.layout().blocks[bott].layers.iter().map(|l| l.out_len).min().unwrap();
        ensure(inner == 240 >> (n + 1), || format!("{}: bottleneck inner length {inner}", cfg.name()))?;
    }
    Ok("12 configs: 240 -> 240, trace 240/2^i through encoders, 240/2^(N+1) inside the bottleneck".into())
}

// 4 ------------------------------------------------------------------------

/// Textbook loops with a counter bumped once per arithmetic operation or
/// comparison actually executed.
struct Naive {
    ops: u64,
}

type Act = Vec<Vec<f64>>;

impl Naive {
    fn conv(&mut self, x: &Act, spec: &ConvSpec, p: &ConvParams<f64>) -> Act {
        let (k, s, pad) = (spec.kernel_size(), spec.stride(), spec.kernel_size() / 2);
        let len = x[0].len();
        let padded: Act = x
            .iter()
            .map(|c| {
                let mut v = vec![0.0; pad];
                v.extend_from_slice(c);
                v.extend(std::iter::repeat_n(0.0, pad));
                v
            })
            .collect();
        let out_len = len.div_ceil(s);
        let mut y = vec![vec![0.0; out_len]; spec.out_channels()];
        for o in 0..spec.out_channels() {
            for i in 0..out_len {
                let mut acc = p.bias[o];
                for c in 0..spec.in_channels() {
                    for j in 0..k {
                        acc += p.weight[(o * spec.in_channels() + c) * k + j] * padded[c][s * i + j];
                        self.ops += 2;
                    }
                }
                // bias add
                self.ops += 1;
                y[o][i] = acc;
            }
        }
        y
    }

    fn conv_transpose(&mut self, x: &Act, spec: &ConvSpec, p: &ConvParams<f64>) -> Act {
        let (k, s, pad) = (spec.kernel_size(), spec.stride(), spec.kernel_size() / 2);
        let len = x[0].len();
        let out_len = s * len;
        let mut wide = vec![vec![0.0; out_len + k]; spec.out_channels()];
        for c in 0..spec.in_channels() {
            for i in 0..len {
                for o in 0..spec.out_channels() {
                    for j in 0..k {
                        wide[o][s * i + j] += p.weight[(c * spec.out_channels() + o) * k + j] * x[c][i];
                        self.ops += 2;
                    }
                }
            }
        }
        (0..spec.out_channels())
            .map(|o| {
                (0..out_len)
                    .map(|i| {
                        self.ops += 1;
                        wide[o][i + pad] + p.bias[o]
                    })
                    .collect()
            })
            .collect()
    }

    fn batchnorm(&mut self, x: &Act, p: &specunet_core::ops::BatchNormParams<f64>) -> Act {
        x.iter()
            .enumerate()
            .map(|(c, ch)| {
                let sd = (p.running_var[c] + 1e-5).sqrt();
                ch.iter()
                    .map(|&v| {
                        self.ops += 4;
                        (v - p.running_mean[c]) / sd * p.gamma[c] + p.beta[c]
                    })
                    .collect()
            })
            .collect()
    }

    fn relu(&mut self, x: &Act) -> Act {
        x.iter()
            .map(|ch| {
                ch.iter()
                    .map(|&v| {
                        self.ops += 1;
                        if v > 0.0 { v } else { 0.0 }
                    })
                    .collect()
            })
            .collect()
    }

    fn maxpool(&mut self, x: &Act) -> Act {
        x.iter()
            .map(|ch| {
                ch.chunks(2)
                    .map(|w| {
                        self.ops += 1;
                        if w.len() == 2 && w[1] > w[0] { w[1] } else { w[0] }
                    })
                    .collect()
            })
            .collect()
    }

    fn block(&mut self, m: &Model<f64>, b: usize, mut x: Act) -> Act {
        for layer in m.layers(b) {
            x = match layer {
                Layer::Conv { spec, params } => self.conv(&x, spec, params),
                Layer::ConvTranspose { spec, params } => self.conv_transpose(&x, spec, params),
                Layer::BatchNorm(p) => self.batchnorm(&x, p),
                Layer::Relu => self.relu(&x),
                Layer::MaxPool => self.maxpool(&x),
            };
        }
        x
    }

    fn forward(&mut self, m: &Model<f64>, input: &[f64]) -> Vec<f64> {
        let n = m.config().depth;
        let mut skips = Vec::new();
        let mut x = vec![input.to_vec()];
        for b in 0..n {
            x = self.block(m, b, x);
            skips.push(x.clone());
        }
        x = self.block(m, n, x);
        for d in 0..n {
            let level = n - d;
            x.extend(skips[level - 1].iter().cloned());
            x = self.block(m, n + 1 + d, x);
        }
        self.block(m, 2 * n + 1, x).remove(0)
    }
}

fn flops() -> Outcome {
    let mut r = rng::seeded(44);
    let input: Vec<f64> = (0..240).map(|_| r.random::<f64>()).collect();
    let mut totals = Vec::new();
    for cfg in ablation_grid() {
        let mut m = Model::<f64>::build(&cfg, 9).map_err(|e| e.to_string())?;
        randomize_running_stats(&mut m, 10);
        let analytic = count_flops(&cfg).map_err(|e| e.to_string())?.total;
        let mut naive = Naive { ops: 0 };
        let y = naive.forward(&m, &input);
        ensure(naive.ops == analytic, || format!("{}: analytic {analytic}, instrumented {}", cfg.name(), naive.ops))?;
        let reference = m.infer_one(&Tensor1D::from_f64(&input)).map_err(|e| e.to_string())?;
        let gap = y.iter().zip(reference.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(gap < 1e-9, || format!("{}: naive forward differs from model by {gap:.2e}", cfg.name()))?;
        totals.push((cfg.name(), analytic));
    }
    for d in 0..4 {
        let row = &totals[3 * d..3 * d + 3];
        ensure(row[0].1 < row[1].1 && row[1].1 < row[2].1, || format!("per-depth ordering broken: {row:?}"))?;
        if d > 0 {
            for v in 0..3 {
                ensure(totals[3 * d + v].1 > totals[3 * (d - 1) + v].1, || "depth ordering broken".into())?;
            }
        }
    }
    let ivb = totals[10].1 as f64 / 1e6;
    Ok(format!("12/12 exact, A < B < C at every depth, increasing with depth (IV-B {ivb:.2} MFLOPs)"))
}

fn randomize_running_stats(m: &mut Model<f64>, seed: u64) {
    let mut r = rng::seeded(seed);
    let names: Vec<(String, usize)> = m
        .named_tensors()
        .iter()
        .filter(|t| t.name.ends_with("running_mean") || t.name.ends_with("running_var"))
        .map(|t| (t.name.clone(), t.data.len()))
        .collect();
    for (name, n) in names {
        let v: Vec<f64> = if name.ends_with("var") {
            (0..n).map(|_| r.random_range(0.5..2.0)).collect()
        } else {
            (0..n).map(|_| r.random_range(-0.3..0.3)).collect()
        };
        m.set_tensor(&name, &v).unwrap();
    }
}

// 5 ------------------------------------------------------------------------

/// Vertex test straight from the definition: an interior point is on the
/// upper hull iff every chord over it passes strictly below it, i.e. the
/// smallest slope arriving from the left exceeds the largest slope leaving
/// to the right.
fn brute_force_hull(x: &[f64], y: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut out = vec![0];
    for i in 1..n - 1 {
        let left = (0..i).map(|a| (y[i] - y[a]) / (x[i] - x[a])).fold(f64::INFINITY, f64::min);
        let right = (i + 1..n).map(|b| (y[b] - y[i]) / (x[b] - x[i])).fold(f64::NEG_INFINITY, f64::max);
        if left > right {
            out.push(i);
        }
    }
    out.push(n - 1);
    out
}

fn continuum() -> Outcome {
    let mut r = rng::seeded(555);
    let x = specunet_core::classical::linspace(1.0, 2.6, 240);
    let mut worst_idem = 0.0f64;
    let mut vertices = 0;
    for t in 0..1000 {
        let (a, b, c) = (r.random_range(0.2..0.8), r.random_range(-0.3..0.3), r.random_range(0.0..0.1));
        let y: Vec<f64> = x
            .iter()
            .map(|&w| {
                let smooth = a + b * (w - 1.8) - 0.2 * (-((w - r.random_range(1.2..2.4)) / 0.2f64).powi(2)).exp();
                (smooth + c * r.random::<f64>()).clamp(1e-3, 1.0)
            })
            .collect();
        let fast = upper_hull(&x, &y);
        let slow = brute_force_hull(&x, &y);
        ensure(fast == slow, || format!("spectrum {t}: hull vertices differ ({} vs {})", fast.len(), slow.len()))?;
        vertices += fast.len();
        let hull = upper_hull_values(&x, &y);
        ensure(hull.iter().zip(&y).all(|(h, v)| h >= v), || format!("spectrum {t}: hull below data"))?;
        let s = Spectrum::new(x.clone(), y).unwrap();
        let once = remove_continuum(&s, ContinuumMode::Quotient).unwrap();
        ensure(once.values().iter().all(|&v| v > 0.0 && v <= 1.0), || format!("spectrum {t}: quotient outside (0,1]"))?;
        let twice = remove_continuum(&once, ContinuumMode::Quotient).unwrap();
        let gap = once.values().iter().zip(twice.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_idem = worst_idem.max(gap);
        ensure(gap <= 1e-9, || format!("spectrum {t}: not idempotent ({gap:.2e})"))?;
    }
    Ok(format!(
        "1000 spectra, monotone chain == brute force ({:.1} vertices avg), quotient in (0,1], idempotence gap {worst_idem:.1e}",
        vertices as f64 / 1000.0
    ))
}

// 6 ------------------------------------------------------------------------

/// Asymptotic Kolmogorov distribution tail `P(sqrt(n) D > t)`.
fn kolmogorov_tail(t: f64) -> f64 {
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * t * t).exp();
        p += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

fn chi_square_uniform(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let e = n as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

fn mixtures() -> Outcome {
    const N: usize = 100_000;
    let mut r = rng::seeded(606);
    let mut worst_sum = 0.0f64;
    let mut first = Vec::with_capacity(N);
    for i in 0..N {
        let p = draw_proportions(1 + i % 5, &mut r).unwrap();
        worst_sum = worst_sum.max((p.iter().sum::<f64>() - 1.0).abs());
        ensure(p.iter().all(|&v| (0.0..=1.0).contains(&v)), || format!("draw {i}: proportion outside [0,1]"))?;
        if p.len() > 1 {
            first.push(p[0]);
        }
    }
    ensure(worst_sum <= 1e-12, || format!("sum off by {worst_sum:.2e}"))?;
    first.sort_by(f64::total_cmp);
    let n = first.len() as f64;
    let d = first
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max);
    let ks_p = kolmogorov_tail(n.sqrt() * d);
    ensure(ks_p > 0.01, || format!("KS D={d:.4}, p={ks_p:.4}"))?;

    let lib = gen_synthetic_library(28, 240, 7).unwrap();
    let mut g = SampleGenerator::new(lib, &PipelineConfig::default(), NoiseSchedule::default(), 606).unwrap();
    let mut by_rank = vec![vec![0u64; 28]; 5];
    for _ in 0..N {
        let s = g.next_sample(1).unwrap();
        let mut comps = s.recipe.components.clone();
        comps.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ensure(comps[0].0 == s.label, || "label is not the top-proportion class".into())?;
        for (rank, &(c, _)) in comps.iter().enumerate() {
            by_rank[rank][c] += 1;
        }
    }
    let pvals: Vec<f64> = by_rank.iter().map(|c| chi_square_uniform(c)).collect();
    for (rank, &p) in pvals.iter().enumerate() {
        ensure(p > 0.01, || format!("rank {} labels not uniform (chi-square p={p:.4})", rank + 1))?;
    }
    Ok(format!(
        "max |sum-1| {worst_sum:.1e}; KS p1 vs U(0,1) D={d:.4} p={ks_p:.3}; dominant-label chi-square p={:.3} (ranks 2-5 min p={:.3})",
        pvals[0],
        pvals[1..].iter().copied().fold(1.0, f64::min)
    ))
}

// 7 ------------------------------------------------------------------------

fn overfit() -> Outcome {
    let lib = gen_synthetic_library(28, 240, 11).unwrap();
    let mut g = SampleGenerator::new(lib, &PipelineConfig::default(), NoiseSchedule::default(), 11).unwrap();
    let samples = g.batch(1, 10).unwrap();
    let (x, y) = to_batch::<f32>(&samples);
    let cfg = ArchitectureConfig::new(1, EncoderVariant::B);
    let model = Model::<f32>::build(&cfg, 11).unwrap();
    let mut t = Trainer::new(model, AdamHyper { lr: 1e-3, ..AdamHyper::default() });
    let mut last = f64::NAN;
    for step in 1..=2000 {
        last = t.step(&x, &y).map_err(|e| e.to_string())?;
        if last < 1e-3 {
            return Ok(format!("II-B base 16, 10 samples: train MSE {last:.2e} < 1e-3 after {step} Adam steps (lr 1e-3)"));
        }
    }
    Err(format!("train MSE still {last:.2e} after 2000 steps"))
}

// 8 ------------------------------------------------------------------------

fn end_to_end() -> Outcome {
    let lib = gen_synthetic_library(28, 240, 28).unwrap();
    let pc = PipelineConfig::default();
    let cfg = TrainConfig {
        max_epochs: 10,
        steps_per_epoch: 100,
        lr: 3e-3,
        seed: 28,
        ..TrainConfig::default()
    };
    let mut g = SampleGenerator::new(lib.clone(), &pc, cfg.schedule, 28).unwrap();
    let val = specunet_core::synth::validation_set(&lib, &pc, 1000, 28).unwrap();
    // unseen draws from the distribution trained on (epoch-10 noise)
    let mut held = SampleGenerator::new(lib, &pc, cfg.schedule, 2828).unwrap();
    let held = held.batch(cfg.max_epochs, 1000).unwrap();

    let arch = ArchitectureConfig::new(3, EncoderVariant::B).with_base_channels(8);
    let model = Model::<f32>::build(&arch, 28).unwrap();
    let out = train(model, &mut g, &val, &cfg).map_err(|e| e.to_string())?;
    ensure(out.history.epochs.len() == 10, || format!("stopped after {} epochs", out.history.epochs.len()))?;
    let m = evaluate(&out.best, &held).map_err(|e| e.to_string())?;
    let vm = evaluate(&out.best, &val).map_err(|e| e.to_string())?;
    let detail = format!(
        "IV-B base 8, 10x100 steps at lr 3e-3: held-out r={:.4} mse={:.4} (full-noise validation r={:.4}); train mse {:.4} -> {:.4}",
        m.pearson_r,
        m.mse,
        vm.pearson_r,
        out.history.epochs[0].train_mse,
        out.history.epochs[9].train_mse
    );
    ensure(m.pearson_r > 0.9, || format!("{detail}; needs r > 0.9"))?;
    Ok(detail)
}

// 9 ------------------------------------------------------------------------

fn speed() -> Outcome {
    let lib = gen_synthetic_library(28, 240, 9).unwrap();
    let cube = synthetic_cube(&lib, 100, 100, 0.02, 9).map_err(|e| e.to_string())?;
    let model = Model::<f32>::build(&ArchitectureConfig::default(), 9).unwrap();
    let pipeline = ClassicalPipeline::new(PipelineConfig::default()).unwrap();
    let run = bench(&cube, &model, &pipeline, 3, 1).map_err(|e| e.to_string())?;
    let parallel = preprocess_cube(&cube, &model, 4).map_err(|e| e.to_string())?;
    ensure(parallel == run.neural, || "workers=4 output differs from workers=1".into())?;
    let rep = &run.report;
    let detail = format!(
        "100x100x240, IV-B base 16: classical {:.2} s, neural {:.2} s (median of 3), speedup {:.3}x; workers 1 vs 4 bit-identical",
        rep.classical_s, rep.neural_s, rep.speedup
    );
    ensure(rep.speedup >= 5.0, || format!("{detail}; needs speedup >= 5"))?;
    Ok(detail)
}

// 10 -----------------------------------------------------------------------

fn serialization() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut model = Model::<f64>::build(&ArchitectureConfig::default(), 4).unwrap();
    randomize_running_stats(&mut model, 4);
    let model = model.cast::<f32>();
    let ckpt = dir.path().join("model.sunw");
    save_checkpoint(&model, &ckpt).map_err(|e| e.to_string())?;
    let back: Model<f32> = load_checkpoint(&ckpt).map_err(|e| e.to_string())?;
    let same = back
        .named_tensors()
        .iter()
        .zip(model.named_tensors())
        .all(|(a, b)| a.name == b.name && a.shape == b.shape && bits(a.data) == bits(b.data));
    ensure(same && back.tensor_count() == model.tensor_count(), || "checkpoint tensors differ".into())?;
    ensure(back.config() == model.config() && back.seed() == 4, || "config or seed lost".into())?;
    let x = Tensor1D::from_f64(&(0..240).map(|i| (i as f64 / 40.0).sin()).collect::<Vec<_>>());
    let (a, b) = (model.infer_one(&x).unwrap(), back.infer_one(&x).unwrap());
    ensure(a.data().iter().zip(b.data()).all(|(p, q)| p.to_bits() == q.to_bits()), || "reloaded forward not bit-exact".into())?;

    let lib = gen_synthetic_library(3, 240, 1).unwrap();
    let cube = synthetic_cube(&lib, 2, 2, 0.02, 1).unwrap();
    let cpath = dir.path().join("cube.scub");
    write_cube(&cube, &cpath).map_err(|e| e.to_string())?;
    let cback = read_cube(&cpath).map_err(|e| e.to_string())?;
    ensure(bits(cback.data()) == bits(cube.data()) && bits(cback.wavelengths()) == bits(cube.wavelengths()), || {
        "cube round trip not bit-exact".into()
    })?;

    // damaged headers
    let good = encode_checkpoint(&model);
    let mem = Path::new("mem");
    let mut rejected = 0;
    for (what, bytes) in damaged(&good, 8) {
        ensure(decode_checkpoint::<f32>(&bytes, mem).is_err(), || format!("checkpoint with {what} accepted"))?;
        rejected += 1;
    }
    let good_cube = encode_cube(&cube);
    for (what, bytes) in damaged(&good_cube, 0) {
        ensure(decode_cube(&bytes, mem).is_err(), || format!("cube with {what} accepted"))?;
        rejected += 1;
    }
    let mut big = good_cube.clone();
    big[8..12].copy_from_slice(&3u32.to_le_bytes());
    ensure(decode_cube(&big, mem).is_err(), || "cube header larger than file accepted".into())?;

    // a failing command leaves existing outputs untouched and creates none
    let bad_ckpt = dir.path().join("bad.sunw");
    let mut b = good.clone();
    b[0] = b'X';
    std::fs::write(&bad_ckpt, &b).unwrap();
    let small_cube = dir.path().join("in.scub");
    write_cube(&cube, &small_cube).unwrap();
    let fresh = dir.path().join("fresh.scub");
    let existing = dir.path().join("existing.scub");
    std::fs::write(&existing, b"keep me").unwrap();
    for out in [&fresh, &existing] {
        let cli = <specunet::cli::Cli as clap::Parser>::try_parse_from([
            "specunet",
            "preprocess",
            "--model",
            bad_ckpt.to_str().unwrap(),
            "--input",
            small_cube.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .unwrap();
        ensure(specunet::cli::run(cli).is_err(), || "corrupted checkpoint accepted by preprocess".into())?;
    }
    ensure(!fresh.exists(), || "partial output created".into())?;
    ensure(std::fs::read(&existing).unwrap() == b"keep me", || "existing output modified".into())?;
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    ensure(leftovers == 5, || format!("unexpected files left in the output directory ({leftovers})"))?;
    Ok(format!("checkpoint and cube round trips bit-exact; {rejected} damaged headers rejected; failed command wrote nothing"))
}

fn bits(v: &[f32]) -> Vec<u32> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Header corruptions: magic, version, a length field, the first JSON or
/// payload byte, and truncation.
fn damaged(good: &[u8], json_at: usize) -> Vec<(&'static str, Vec<u8>)> {
    let mut out = Vec::new();
    let mut b = good.to_vec();
    b[0] ^= 0xff;
    out.push(("bad magic", b));
    let mut b = good.to_vec();
    b[4] = 9;
    out.push(("bad version", b));
    let mut b = good.to_vec();
    b[8] = b[8].wrapping_add(1);
    out.push(("bad length field", b));
    if json_at > 0 {
        let mut b = good.to_vec();
        b[12] = b'#';
        out.push(("malformed header", b));
    }
    out.push(("truncation", good[..good.len() - 3].to_vec()));
    out.push(("header only", good[..12.min(good.len())].to_vec()));
    out
}
