//! Optimization: Adam, reduce-on-plateau scheduling, early stopping, the
//! epoch loop and evaluation metrics.

mod adam;
mod fit;
mod metrics;
mod plateau;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use fit::{
    to_batch, train, BatchSource, EpochRecord, FixedBatches, Termination, TrainConfig, TrainHistory,
    TrainOutcome, Trainer,
};
pub use metrics::{evaluate, pearson, Metrics};
pub use plateau::{early_stop, ReduceOnPlateau, MIN_IMPROVEMENT};
