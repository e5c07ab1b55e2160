use alloc::vec;

use super::config::PipelineConfig;
use super::continuum::remove_continuum_values;
use super::savgol::SavitzkyGolay;
use super::scale::select_and_scale;
use super::spectrum::Spectrum;
use super::spikes::despike_values;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Processed {
    pub spectrum: Spectrum,
    /// The selected range was constant; the output is all zeros.
    pub degenerate: bool,
}

/// The full chain with its smoothing weights precomputed.
#[derive(Debug, Clone)]
pub struct ClassicalPipeline {
    cfg: PipelineConfig,
    sg: SavitzkyGolay,
}

impl ClassicalPipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            sg: SavitzkyGolay::new(cfg.smooth_window, cfg.smooth_polyorder)?,
            cfg,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    /// select and scale, remove spikes, smooth, remove continuum.
    pub fn run(&self, raw: &Spectrum) -> Result<Processed> {
        let (scaled, degenerate) = select_and_scale(raw, &self.cfg)?;
        if degenerate {
            let zeros = vec![0.0; scaled.len()];
            return Ok(Processed {
                spectrum: scaled.with_values(zeros),
                degenerate,
            });
        }
        let despiked = despike_values(scaled.values(), self.cfg.spike_window, self.cfg.spike_threshold)?;
        let smoothed = self.sg.apply(&despiked)?;
        let out = remove_continuum_values(scaled.wavelengths(), &smoothed, self.cfg.continuum)?;
        Ok(Processed {
            spectrum: scaled.with_values(out),
            degenerate,
        })
    }
}

pub fn classical_pipeline(raw: &Spectrum, cfg: &PipelineConfig) -> Result<Processed> {
    ClassicalPipeline::new(*cfg)?.run(raw)
}
