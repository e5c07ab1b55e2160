//! The classical preprocessing chain: range selection and min-max scaling,
//! rolling-median spike removal, Savitzky-Golay smoothing and upper-hull
//! continuum removal. It is both the speed baseline and the generator of
//! training targets.

mod config;
mod continuum;
mod pipeline;
mod savgol;
mod scale;
mod spectrum;
mod spikes;

pub use config::{ContinuumMode, PipelineConfig};
pub use continuum::{remove_continuum, upper_hull, upper_hull_values};
pub use pipeline::{classical_pipeline, ClassicalPipeline, Processed};
pub use savgol::{smooth, SavitzkyGolay};
pub use scale::{minmax_scale, minmax_scale_in_place, select_and_scale};
pub use spectrum::{linspace, Spectrum};
pub use spikes::{remove_spikes, MAD_TO_SIGMA};
