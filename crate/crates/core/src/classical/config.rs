use alloc::format;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContinuumMode {
    /// `value / hull`, in `(0, 1]`.
    #[default]
    Quotient,
    /// `value - hull`, in `(-inf, 0]`.
    Subtract,
}

impl FromStr for ContinuumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "quotient" => Ok(ContinuumMode::Quotient),
            "subtract" => Ok(ContinuumMode::Subtract),
            other => Err(Error::config(format!(
                "continuum mode must be quotient or subtract, got {other:?}"
            ))),
        }
    }
}

impl core::fmt::Display for ContinuumMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            ContinuumMode::Quotient => "quotient",
            ContinuumMode::Subtract => "subtract",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Inclusive wavelength range kept, micrometers.
    pub range_lo: f64,
    pub range_hi: f64,
    pub spike_window: usize,
    /// Multiplier on the MAD-derived sigma.
    pub spike_threshold: f64,
    pub smooth_window: usize,
    pub smooth_polyorder: usize,
    pub continuum: ContinuumMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            range_lo: 1.0,
            range_hi: 2.6,
            spike_window: 7,
            spike_threshold: 5.0,
            smooth_window: 9,
            smooth_polyorder: 2,
            continuum: ContinuumMode::Quotient,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("spike", self.spike_window), ("smooth", self.smooth_window)] {
            if w < 3 || w % 2 == 0 {
                return Err(Error::config(format!(
                    "{name} window must be odd and at least 3, got {w}"
                )));
            }
        }
        if self.smooth_polyorder >= self.smooth_window {
            return Err(Error::config(format!(
                "polyorder {} must be below the smoothing window {}",
                self.smooth_polyorder, self.smooth_window
            )));
        }
        if !(self.range_lo < self.range_hi) {
            return Err(Error::config(format!(
                "range_lo {} must be below range_hi {}",
                self.range_lo, self.range_hi
            )));
        }
        if !(self.spike_threshold > 0.0) {
            return Err(Error::config("spike threshold must be positive"));
        }
        Ok(())
    }
}
