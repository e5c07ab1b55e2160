use rand::Rng;

/// Epoch-indexed upper bound on the noise sigma: flat at `low` through
/// `warmup_end`, linear ramp, flat at `high` from `ramp_end + 1` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSchedule {
    pub warmup_end: usize,
    pub ramp_end: usize,
    pub low: f64,
    pub high: f64,
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        Self {
            warmup_end: 20,
            ramp_end: 80,
            low: 0.02,
            high: 0.1,
        }
    }
}

impl NoiseSchedule {
    /// `epoch` is 1-based.
    pub fn upper_bound(&self, epoch: usize) -> f64 {
        if epoch <= self.warmup_end {
            self.low
        } else if epoch > self.ramp_end {
            self.high
        } else {
            let span = (self.ramp_end + 1 - self.warmup_end) as f64;
            let t = (epoch - self.warmup_end) as f64 / span;
            self.low + (self.high - self.low) * t
        }
    }
}

/// `U(0, upper_bound(epoch))`.
pub fn sigma_for_epoch<R: Rng + ?Sized>(schedule: &NoiseSchedule, epoch: usize, rng: &mut R) -> f64 {
    let hi = schedule.upper_bound(epoch.max(1));
    rng.random::<f64>() * hi
}
