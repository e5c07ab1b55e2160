//! Wall-clock comparison of the classical chain and the network on a cube.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use specunet_core::classical::ClassicalPipeline;
use specunet_core::cube::Cube;
use specunet_core::unet::Model;
use specunet_core::Scalar;

use crate::error::{Error, Result};
use crate::processing::{classical_cube, preprocess_cube, CubeOutput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub pixels: usize,
    pub bands: usize,
    pub model: String,
    pub workers: usize,
    pub repetitions: usize,
    /// Median seconds over the repetitions.
    pub classical_s: f64,
    pub neural_s: f64,
    pub speedup: f64,
    /// Mean |neural - classical| over all values, when both outputs have the
    /// same band count.
    pub mean_abs_dev: Option<f64>,
}

impl BenchReport {
    pub fn table(&self) -> String {
        let dev = self
            .mean_abs_dev
            .map_or_else(|| "n/a".to_string(), |d| format!("{d:.4}"));
        format!(
            "pixels        {}\nbands         {}\nmodel         {}\nworkers       {}\nrepetitions   {}\n\
             classical     {:.3} s ({:.1} us/pixel)\nneural        {:.3} s ({:.1} us/pixel)\n\
             speedup       {:.3}x\nmean |dev|    {dev}\n",
            self.pixels,
            self.bands,
            self.model,
            self.workers,
            self.repetitions,
            self.classical_s,
            1e6 * self.classical_s / self.pixels.max(1) as f64,
            self.neural_s,
            1e6 * self.neural_s / self.pixels.max(1) as f64,
            self.speedup,
        )
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn timed<R>(reps: usize, mut f: impl FnMut() -> Result<R>) -> Result<(f64, R)> {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let t = Instant::now();
        let r = f()?;
        times.push(t.elapsed().as_secs_f64());
        last = Some(r);
    }
    Ok((median(&mut times), last.expect("at least one repetition")))
}

pub struct BenchRun {
    pub report: BenchReport,
    pub neural: CubeOutput,
    pub classical: CubeOutput,
}

/// Medians over `reps` (at least 3) timed runs of each path, after one
/// untimed warm-up row.
pub fn bench<T: Scalar>(
    cube: &Cube,
    model: &Model<T>,
    pipeline: &ClassicalPipeline,
    reps: usize,
    workers: usize,
) -> Result<BenchRun> {
    if reps < 3 {
        return Err(Error::Invalid(format!("bench needs at least 3 repetitions, got {reps}")));
    }
    if cube.pixels() == 0 {
        return Err(Error::Invalid("bench needs a non-empty cube".into()));
    }
    let warm = Cube::new(1, cube.width(), cube.wavelengths().to_vec(), cube.rows(0..1).to_vec())?;
    preprocess_cube(&warm, model, workers)?;
    classical_cube(&warm, pipeline, workers)?;

    let (classical_s, classical) = timed(reps, || classical_cube(cube, pipeline, workers))?;
    let (neural_s, neural) = timed(reps, || preprocess_cube(cube, model, workers))?;
    let mean_abs_dev = (neural.cube.bands() == classical.cube.bands()).then(|| {
        let d = neural.cube.data();
        let c = classical.cube.data();
        d.iter().zip(c).map(|(a, b)| (a - b).abs() as f64).sum::<f64>() / d.len().max(1) as f64
    });
    let report = BenchReport {
        pixels: cube.pixels(),
        bands: cube.bands(),
        model: model.config().name(),
        workers,
        repetitions: reps,
        classical_s,
        neural_s,
        speedup: classical_s / neural_s,
        mean_abs_dev,
    };
    Ok(BenchRun {
        report,
        neural,
        classical,
    })
}

/// Least-squares line through `(ln x, ln y)`: returns `(slope, r^2)`.
pub fn log_log_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, sxy * sxy / (sxx * syy))
}
