//! TOML settings file. Every key is optional and overrides the default:
//!
//! ```toml
//! # architecture
//! depth = 3              # 0..=3, architectures I..IV
//! variant = "B"          # A, B or C
//! base_channels = 16
//! kernel_size = 3
//! bands = 240
//! # training
//! batch_size = 50
//! steps_per_epoch = 100
//! max_epochs = 100
//! lr = 1e-4
//! lr_factor = 0.1
//! lr_patience = 10
//! early_stop_patience = 10
//! bias_correction = true
//! noise_warmup_end = 20  # last epoch at noise_low
//! noise_ramp_end = 80    # noise_high from the following epoch on
//! noise_low = 0.02
//! noise_high = 0.1
//! val_count = 1000
//! # classical pipeline
//! range_lo = 1.0
//! range_hi = 2.6
//! spike_window = 7
//! spike_threshold = 5.0
//! smooth_window = 9
//! smooth_polyorder = 2
//! continuum = "quotient"  # or "subtract"
//! ```

use std::path::Path;

use serde::Deserialize;
use specunet_core::classical::PipelineConfig;
use specunet_core::train::TrainConfig;
use specunet_core::unet::ArchitectureConfig;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub depth: Option<usize>,
    pub variant: Option<String>,
    pub base_channels: Option<usize>,
    pub kernel_size: Option<usize>,
    pub bands: Option<usize>,

    pub batch_size: Option<usize>,
    pub steps_per_epoch: Option<usize>,
    pub max_epochs: Option<usize>,
    pub lr: Option<f64>,
    pub lr_factor: Option<f64>,
    pub lr_patience: Option<usize>,
    pub early_stop_patience: Option<usize>,
    pub bias_correction: Option<bool>,
    pub noise_warmup_end: Option<usize>,
    pub noise_ramp_end: Option<usize>,
    pub noise_low: Option<f64>,
    pub noise_high: Option<f64>,
    pub val_count: Option<usize>,

    pub range_lo: Option<f64>,
    pub range_hi: Option<f64>,
    pub spike_window: Option<usize>,
    pub spike_threshold: Option<f64>,
    pub smooth_window: Option<usize>,
    pub smooth_polyorder: Option<usize>,
    pub continuum: Option<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub arch: ArchitectureConfig,
    pub train: TrainConfig,
    pub pipeline: PipelineConfig,
    pub val_count: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            arch: ArchitectureConfig::default(),
            train: TrainConfig::default(),
            pipeline: PipelineConfig::default(),
            val_count: 1000,
        }
    }
}

macro_rules! apply {
    ($src:expr, $dst:expr, $($field:ident),+) => {
        $(if let Some(v) = $src.$field { $dst.$field = v; })+
    };
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn resolve(&self) -> Result<Settings> {
        let mut s = Settings::default();
        let arch = &mut s.arch;
        apply!(self, arch, depth, base_channels, kernel_size, bands);
        if let Some(v) = &self.variant {
            arch.variant = v.parse()?;
        }
        let t = &mut s.train;
        apply!(
            self,
            t,
            batch_size,
            steps_per_epoch,
            max_epochs,
            lr,
            lr_factor,
            lr_patience,
            early_stop_patience,
            bias_correction
        );
        let sched = &mut t.schedule;
        if let Some(v) = self.noise_warmup_end {
            sched.warmup_end = v;
        }
        if let Some(v) = self.noise_ramp_end {
            sched.ramp_end = v;
        }
        if let Some(v) = self.noise_low {
            sched.low = v;
        }
        if let Some(v) = self.noise_high {
            sched.high = v;
        }
        let p = &mut s.pipeline;
        apply!(
            self,
            p,
            range_lo,
            range_hi,
            spike_window,
            spike_threshold,
            smooth_window,
            smooth_polyorder
        );
        if let Some(v) = &self.continuum {
            p.continuum = v.parse()?;
        }
        if let Some(v) = self.val_count {
            s.val_count = v;
        }
        s.validate()?;
        Ok(s)
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        self.arch.validate()?;
        self.train.validate()?;
        self.pipeline.validate()?;
        let n = &self.train.schedule;
        if !(0.0 <= n.low && n.low <= n.high && n.high <= 0.1) || n.ramp_end < n.warmup_end {
            return Err(Error::Invalid(format!("invalid noise schedule {n:?}")));
        }
        if self.val_count == 0 {
            return Err(Error::Invalid("val_count must be positive".into()));
        }
        Ok(())
    }
}
