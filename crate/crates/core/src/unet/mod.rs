//! The 1D-UNet family used for spectral preprocessing.
//!
//! Depth `N` in `0..=3` (architectures I to IV) and an encoder variant
//! (A, B, C) select one of twelve networks. Encoder block `i` runs a stride-1
//! conv and then a variant-specific downsampling stage; the bottleneck runs
//! the same pattern at width `base * 2^N` and finishes with a stride-2
//! transposed conv; each decoder block concatenates the upsampled features
//! with the matching encoder output, refines with two stride-1 convs and
//! upsamples again. A final linear stride-1 conv maps to one channel.

mod config;
mod flops;
mod layout;
mod model;

pub use config::{ablation_grid, ArchitectureConfig, EncoderVariant, MAX_DEPTH};
pub use flops::{count_flops, FlopsEntry, FlopsReport};
pub use layout::{BlockKind, BlockLayout, LayerDesc, LayerKind, Layout};
pub use model::{ForwardCache, Layer, Model, ModelGrads, NamedTensor};
