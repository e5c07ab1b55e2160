//! Synthetic training data: endmember libraries, convex mixtures with
//! remainder-closed random proportions, Gaussian noise on an epoch
//! curriculum, and min-max scaling.

mod library;
mod mixture;
mod sample;
mod schedule;

pub use crate::classical::minmax_scale;
pub use library::{gen_synthetic_library, SpectralLibrary};
pub use mixture::{add_noise, draw_proportions, mix_spectra, MixtureRecipe, MAX_NOISE_SIGMA};
pub use sample::{make_sample, validation_set, SampleGenerator, TrainingSample, MAX_COMPONENTS};
pub use schedule::{sigma_for_epoch, NoiseSchedule};
