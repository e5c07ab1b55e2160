use alloc::format;
use alloc::vec::Vec;

use super::adam::{adam_step, AdamHyper, AdamState};
use super::metrics::evaluate;
use super::plateau::{early_stop, ReduceOnPlateau};
use crate::error::{Error, Result};
use crate::ops::{mse_loss_batch, mse_loss_batch_backward};
use crate::scalar::Scalar;
use crate::synth::{NoiseSchedule, SampleGenerator, TrainingSample};
use crate::tensor::Tensor1D;
use crate::unet::Model;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub steps_per_epoch: usize,
    pub max_epochs: usize,
    pub lr: f64,
    pub lr_factor: f64,
    pub lr_patience: usize,
    pub early_stop_patience: usize,
    pub bias_correction: bool,
    pub schedule: NoiseSchedule,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 50,
            steps_per_epoch: 100,
            max_epochs: 100,
            lr: 1e-4,
            lr_factor: 0.1,
            lr_patience: 10,
            early_stop_patience: 10,
            bias_correction: true,
            schedule: NoiseSchedule::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::config("batch_size must be at least 2 (batchnorm)"));
        }
        if self.steps_per_epoch == 0 || self.max_epochs == 0 {
            return Err(Error::config("steps_per_epoch and max_epochs must be positive"));
        }
        if !(self.lr_factor > 0.0 && self.lr_factor < 1.0) {
            return Err(Error::config(format!("lr_factor must be in (0, 1), got {}", self.lr_factor)));
        }
        if self.lr_patience == 0 || self.early_stop_patience == 0 {
            return Err(Error::config("patience must be at least 1"));
        }
        self.adam().validate()
    }

    pub fn adam(&self) -> AdamHyper {
        AdamHyper {
            lr: self.lr,
            bias_correction: self.bias_correction,
            ..AdamHyper::default()
        }
    }
}

/// Where training batches come from.
pub trait BatchSource {
    fn next_batch(&mut self, epoch: usize, size: usize) -> Result<Vec<TrainingSample>>;

    /// Noise upper bound in effect for `epoch`, for the history.
    fn sigma_hi(&self, _epoch: usize) -> f64 {
        0.0
    }
}

impl BatchSource for SampleGenerator {
    fn next_batch(&mut self, epoch: usize, size: usize) -> Result<Vec<TrainingSample>> {
        self.batch(epoch, size)
    }

    fn sigma_hi(&self, epoch: usize) -> f64 {
        self.schedule().upper_bound(epoch)
    }
}

/// Replays one fixed set of samples as every batch.
#[derive(Debug, Clone)]
pub struct FixedBatches(pub Vec<TrainingSample>);

impl BatchSource for FixedBatches {
    fn next_batch(&mut self, _epoch: usize, size: usize) -> Result<Vec<TrainingSample>> {
        if self.0.is_empty() {
            return Err(Error::Data("fixed batch set is empty".into()));
        }
        Ok(self.0.iter().cycle().take(size).cloned().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
    pub lr: f64,
    pub sigma_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    MaxEpochs,
    EarlyStop { epoch: usize },
    NonFinite { epoch: usize, step: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub termination: Termination,
}

impl TrainHistory {
    pub fn val_losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.val_mse).collect()
    }

    pub fn best_epoch(&self) -> Option<&EpochRecord> {
        self.epochs
            .iter()
            .fold(None, |best: Option<&EpochRecord>, e| match best {
                Some(b) if b.val_mse <= e.val_mse => Some(b),
                _ => Some(e),
            })
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    /// Parameters from the epoch with the lowest validation loss (the
    /// initial model when no epoch completed).
    pub best: Model<T>,
    pub last: Model<T>,
    pub history: TrainHistory,
}

/// Input and target tensors for a batch of samples.
pub fn to_batch<T: Scalar>(samples: &[TrainingSample]) -> (Vec<Tensor1D<T>>, Vec<Tensor1D<T>>) {
    samples
        .iter()
        .map(|s| (Tensor1D::from_f64(&s.input), Tensor1D::from_f64(&s.target)))
        .unzip()
}

/// A model paired with its optimizer state.
#[derive(Debug, Clone)]
pub struct Trainer<T> {
    pub model: Model<T>,
    pub adam: AdamState<T>,
}

impl<T: Scalar> Trainer<T> {
    pub fn new(model: Model<T>, hyper: AdamHyper) -> Self {
        let adam = AdamState::for_params(hyper, &model.params());
        Self { model, adam }
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.adam.hyper.lr = lr;
    }

    /// Forward in train mode, MSE, backward, Adam. Returns the batch loss
    /// measured before the update. On a non-finite loss or gradient the
    /// model is left as it was.
    pub fn step(&mut self, inputs: &[Tensor1D<T>], targets: &[Tensor1D<T>]) -> Result<f64> {
        let (out, cache) = self.model.forward_train(inputs)?;
        let loss = mse_loss_batch(&out, targets)?.as_f64();
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                context: "training loss",
                location: format!("adam step {}", self.adam.t + 1),
            });
        }
        let grad_out = mse_loss_batch_backward(&out, targets)?;
        let grads = self.model.backward(&cache, &grad_out)?;
        let g = grads.tensors();
        adam_step(&mut self.adam, &mut self.model.params_mut(), &g)?;
        self.model.commit_running_stats(&cache)?;
        Ok(loss)
    }
}

/// The epoch loop: `steps_per_epoch` Adam steps on fresh batches, then
/// validation, the plateau scheduler and the early-stop check.
///
/// Validation samples are only ever passed to [`evaluate`].
pub fn train<T: Scalar, S: BatchSource + ?Sized>(
    model: Model<T>,
    source: &mut S,
    val_set: &[TrainingSample],
    cfg: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    if val_set.is_empty() {
        return Err(Error::Data("validation set is empty".into()));
    }
    let mut trainer = Trainer::new(model, cfg.adam());
    let mut scheduler = ReduceOnPlateau::new(cfg.lr, cfg.lr_factor, cfg.lr_patience);
    let mut best = trainer.model.clone();
    let mut best_val = f64::INFINITY;
    let mut epochs = Vec::new();
    let mut termination = Termination::MaxEpochs;

    'epochs: for epoch in 1..=cfg.max_epochs {
        let lr = scheduler.lr();
        trainer.set_lr(lr);
        let mut total = 0.0;
        for step in 1..=cfg.steps_per_epoch {
            let samples = source.next_batch(epoch, cfg.batch_size)?;
            let (x, y) = to_batch::<T>(&samples);
            match trainer.step(&x, &y) {
                Ok(loss) => total += loss,
                Err(Error::NonFinite { .. }) => {
                    termination = Termination::NonFinite { epoch, step };
                    break 'epochs;
                }
                Err(e) => return Err(e),
            }
        }
        let val = evaluate(&trainer.model, val_set)?.mse;
        if !val.is_finite() {
            termination = Termination::NonFinite {
                epoch,
                step: cfg.steps_per_epoch,
            };
            break;
        }
        epochs.push(EpochRecord {
            epoch,
            train_mse: total / cfg.steps_per_epoch as f64,
            val_mse: val,
            lr,
            sigma_hi: source.sigma_hi(epoch),
        });
        if val < best_val {
            best_val = val;
            best = trainer.model.clone();
        }
        scheduler.step(val);
        let history: Vec<f64> = epochs.iter().map(|e| e.val_mse).collect();
        if early_stop(&history, cfg.early_stop_patience) {
            termination = Termination::EarlyStop { epoch };
            break;
        }
    }
    Ok(TrainOutcome {
        best,
        last: trainer.model,
        history: TrainHistory { epochs, termination },
    })
}
