use std::path::Path;

use serde::{Deserialize, Serialize};
use specunet_core::train::{EpochRecord, TrainHistory};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
    pub lr: f64,
    pub sigma_hi: f64,
}

impl From<&EpochRecord> for HistoryRow {
    fn from(e: &EpochRecord) -> Self {
        Self {
            epoch: e.epoch,
            train_mse: e.train_mse,
            val_mse: e.val_mse,
            lr: e.lr,
            sigma_hi: e.sigma_hi,
        }
    }
}

/// CSV with header `epoch,train_mse,val_mse,lr,sigma_hi`.
pub fn format_history(h: &TrainHistory) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    if h.epochs.is_empty() {
        w.write_record(["epoch", "train_mse", "val_mse", "lr", "sigma_hi"])
            .expect("in-memory write");
    }
    for e in &h.epochs {
        w.serialize(HistoryRow::from(e)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

pub fn write_history(h: &TrainHistory, path: &Path) -> Result<()> {
    write_atomic(path, &format_history(h))
}

pub fn read_history(path: &Path) -> Result<Vec<HistoryRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::format(path, e.to_string())))
        .collect()
}
