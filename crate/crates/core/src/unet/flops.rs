use alloc::string::String;
use alloc::vec::Vec;

use super::config::ArchitectureConfig;
use super::layout::{LayerKind, Layout};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlopsEntry {
    pub block: String,
    pub layer: usize,
    pub kind: &'static str,
    pub macs: u64,
    pub flops: u64,
}

/// Per-layer operation counts; one multiply-add counts as two FLOPs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlopsReport {
    pub entries: Vec<FlopsEntry>,
    pub total: u64,
}

impl FlopsReport {
    pub fn block_total(&self, block: &str) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.block == block)
            .map(|e| e.flops)
            .sum()
    }

    pub fn millions(&self) -> f64 {
        self.total as f64 / 1e6
    }
}

/// Analytic count for one inference pass on a single spectrum.
///
/// conv: `2 k C_in C_out L_out` plus `C_out L_out` bias adds; transposed
/// conv: `2 k C_in C_out L_in` plus `C_out L_out`; batchnorm 4 per element;
/// ReLU 1 per element; max pool 1 comparison per output element.
pub fn count_flops(config: &ArchitectureConfig) -> Result<FlopsReport> {
    let layout = Layout::new(config)?;
    let mut entries = Vec::new();
    for block in &layout.blocks {
        let name = block.name();
        for (i, l) in block.layers.iter().enumerate() {
            let out_elems = (l.out_channels * l.out_len) as u64;
            let (kind, macs, flops) = match l.kind {
                LayerKind::Conv(s) => {
                    let macs = (s.kernel_size() * s.in_channels() * s.out_channels() * l.out_len) as u64;
                    ("conv", macs, 2 * macs + out_elems)
                }
                LayerKind::ConvTranspose(s) => {
                    let macs = (s.kernel_size() * s.in_channels() * s.out_channels() * l.in_len) as u64;
                    ("conv_transpose", macs, 2 * macs + out_elems)
                }
                LayerKind::BatchNorm => ("batchnorm", 0, 4 * out_elems),
                LayerKind::Relu => ("relu", 0, out_elems),
                LayerKind::MaxPool => ("maxpool", 0, out_elems),
            };
            entries.push(FlopsEntry {
                block: name.clone(),
                layer: i,
                kind,
                macs,
                flops,
            });
        }
    }
    let total = entries.iter().map(|e| e.flops).sum();
    Ok(FlopsReport { entries, total })
}
