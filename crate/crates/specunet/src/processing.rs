//! Per-pixel cube processing fanned out over row ranges.

use std::thread;

use specunet_core::classical::{ClassicalPipeline, Spectrum};
use specunet_core::cube::Cube;
use specunet_core::classical::minmax_scale_in_place;
use specunet_core::tensor::Tensor1D;
use specunet_core::unet::Model;
use specunet_core::Scalar;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CubeOutput {
    pub cube: Cube,
    /// Pixels whose scaled spectrum was constant; their output is zeros.
    pub degenerate: usize,
}

/// Runs `f(input pixel, output pixel) -> degenerate` over every pixel with
/// `workers` threads, each owning a contiguous block of rows.
fn map_pixels<F>(cube: &Cube, out_bands: usize, workers: usize, f: F) -> Result<(Vec<f32>, usize)>
where
    F: Fn(&[f32], &mut [f32]) -> Result<bool> + Sync,
{
    let (h, w, b) = (cube.height(), cube.width(), cube.bands());
    let mut out = vec![0.0f32; h * w * out_bands];
    if h == 0 || w == 0 {
        return Ok((out, 0));
    }
    let workers = workers.clamp(1, h);
    let rows_per = h.div_ceil(workers);
    let f = &f;
    let results: Vec<Result<usize>> = thread::scope(|s| {
        let handles: Vec<_> = out
            .chunks_mut(rows_per * w * out_bands)
            .enumerate()
            .map(|(i, chunk)| {
                let r0 = i * rows_per;
                let r1 = (r0 + rows_per).min(h);
                let input = cube.rows(r0..r1);
                s.spawn(move || {
                    let mut degenerate = 0;
                    for (px, o) in input.chunks_exact(b).zip(chunk.chunks_exact_mut(out_bands)) {
                        degenerate += f(px, o)? as usize;
                    }
                    Ok(degenerate)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Invalid("worker panicked".into()))))
            .collect()
    });
    let mut degenerate = 0;
    for r in results {
        degenerate += r?;
    }
    Ok((out, degenerate))
}

/// Min-max scale each pixel and run the network in inference mode. The
/// result does not depend on `workers`.
pub fn preprocess_cube<T: Scalar>(cube: &Cube, model: &Model<T>, workers: usize) -> Result<CubeOutput> {
    let bands = model.config().bands;
    if cube.bands() != bands {
        return Err(Error::Invalid(format!(
            "cube has {} bands, model {} expects {bands}",
            cube.bands(),
            model.config().name()
        )));
    }
    let (data, degenerate) = map_pixels(cube, bands, workers, |px, out| {
        let mut x: Vec<T> = px.iter().map(|&v| T::lit(v as f64)).collect();
        if px.iter().any(|v| !v.is_finite()) || minmax_scale_in_place(&mut x) {
            out.fill(0.0);
            return Ok(true);
        }
        let y = model.infer_one(&Tensor1D::from_vec(1, bands, x)?)?;
        for (o, v) in out.iter_mut().zip(y.data()) {
            *o = v.as_f32();
        }
        Ok(false)
    })?;
    Ok(CubeOutput {
        cube: Cube::new(cube.height(), cube.width(), cube.wavelengths().to_vec(), data)?,
        degenerate,
    })
}

/// The classical chain on every pixel. The output keeps only the bands
/// inside the pipeline's wavelength range.
pub fn classical_cube(cube: &Cube, pipeline: &ClassicalPipeline, workers: usize) -> Result<CubeOutput> {
    let cfg = pipeline.config();
    let grid: Vec<f64> = cube.wavelengths().iter().map(|&w| w as f64).collect();
    let kept: Vec<f32> = cube
        .wavelengths()
        .iter()
        .copied()
        .filter(|&w| (w as f64) >= cfg.range_lo && (w as f64) <= cfg.range_hi)
        .collect();
    let (data, degenerate) = map_pixels(cube, kept.len(), workers, |px, out| {
        if px.iter().any(|v| !v.is_finite()) {
            out.fill(0.0);
            return Ok(true);
        }
        let s = Spectrum::new(grid.clone(), px.iter().map(|&v| v as f64).collect())?;
        let p = pipeline.run(&s)?;
        for (o, v) in out.iter_mut().zip(p.spectrum.values()) {
            *o = *v as f32;
        }
        Ok(p.degenerate)
    })?;
    Ok(CubeOutput {
        cube: Cube::new(cube.height(), cube.width(), kept, data)?,
        degenerate,
    })
}
