/// A validation loss counts as an improvement only when it beats the best
/// so far by more than this.
pub const MIN_IMPROVEMENT: f64 = 1e-8;

/// Multiplies the learning rate by `factor` after `patience` consecutive
/// epochs without improvement, then starts counting again.
#[derive(Debug, Clone, PartialEq)]
pub struct ReduceOnPlateau {
    lr: f64,
    factor: f64,
    patience: usize,
    best: f64,
    stalled: usize,
}

impl ReduceOnPlateau {
    pub fn new(lr: f64, factor: f64, patience: usize) -> Self {
        Self {
            lr,
            factor,
            patience,
            best: f64::INFINITY,
            stalled: 0,
        }
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    /// Feeds one epoch's validation loss and returns the learning rate for
    /// the next epoch.
    pub fn step(&mut self, val_loss: f64) -> f64 {
        if val_loss < self.best - MIN_IMPROVEMENT {
            self.best = val_loss;
            self.stalled = 0;
        } else {
            self.stalled += 1;
            if self.stalled >= self.patience {
                self.lr *= self.factor;
                self.stalled = 0;
            }
        }
        self.lr
    }
}

/// True when none of the last `patience` validation losses improves on the
/// best loss seen before them.
pub fn early_stop(val_history: &[f64], patience: usize) -> bool {
    let n = val_history.len();
    if patience == 0 || n <= patience {
        return false;
    }
    let prior = val_history[..n - patience]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    val_history[n - patience..]
        .iter()
        .all(|&v| !(v < prior - MIN_IMPROVEMENT))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn decreasing_losses_keep_lr() {
        let mut s = ReduceOnPlateau::new(1e-4, 0.1, 10);
        for e in 0..50 {
            assert_eq!(s.step(1.0 - e as f64 * 0.01), 1e-4);
        }
    }

    #[test]
    fn ten_flat_epochs_cut_lr() {
        let mut s = ReduceOnPlateau::new(1e-4, 0.1, 10);
        s.step(0.5);
        let lrs: Vec<f64> = (0..10).map(|_| s.step(0.5)).collect();
        assert!(lrs[..9].iter().all(|&l| l == 1e-4));
        assert!((lrs[9] - 1e-5).abs() < 1e-20);
        // counter restarted
        let lrs: Vec<f64> = (0..10).map(|_| s.step(0.5)).collect();
        assert!((lrs[8] - 1e-5).abs() < 1e-20 && (lrs[9] - 1e-6).abs() < 1e-21);
    }

    #[test]
    fn late_improvement_resets_counter() {
        let mut s = ReduceOnPlateau::new(1e-4, 0.1, 10);
        s.step(0.5);
        for _ in 0..8 {
            s.step(0.6);
        }
        s.step(0.4);
        for _ in 0..9 {
            assert_eq!(s.step(0.45), 1e-4);
        }
    }

    #[test]
    fn tiny_decreases_are_not_improvements() {
        let mut s = ReduceOnPlateau::new(1.0, 0.1, 2);
        s.step(1.0);
        s.step(1.0 - 1e-9);
        assert!((s.step(1.0 - 2e-9) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn early_stop_cases() {
        let mut h = vec![1.0];
        h.extend(vec![1.0; 9]);
        assert!(!early_stop(&h, 10));
        h.push(1.0);
        assert!(early_stop(&h, 10));
        let mono: Vec<f64> = (0..100).map(|e| 1.0 / (1.0 + e as f64)).collect();
        for n in 0..=mono.len() {
            assert!(!early_stop(&mono[..n], 10));
        }
        assert!(!early_stop(&[], 10));
    }
}
