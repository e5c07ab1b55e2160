use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::config::{ArchitectureConfig, EncoderVariant};
use crate::error::Result;
use crate::ops::ConvSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv(ConvSpec),
    ConvTranspose(ConvSpec),
    BatchNorm,
    Relu,
    MaxPool,
}

/// One layer with the activation shape it sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerDesc {
    pub kind: LayerKind,
    pub in_channels: usize,
    pub in_len: usize,
    pub out_channels: usize,
    pub out_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// 1-based level.
    Encoder(usize),
    Bottleneck,
    /// Level of the encoder output it consumes through the skip.
    Decoder(usize),
    Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    pub kind: BlockKind,
    /// Channels arriving from the skip connection, concatenated after the
    /// main input (decoders only).
    pub skip_channels: usize,
    pub layers: Vec<LayerDesc>,
}

impl BlockLayout {
    pub fn name(&self) -> String {
        match self.kind {
            BlockKind::Encoder(l) => format!("enc{l}"),
            BlockKind::Bottleneck => String::from("bott"),
            BlockKind::Decoder(l) => format!("dec{l}"),
            BlockKind::Output => String::from("out"),
        }
    }

    pub fn out_len(&self) -> usize {
        self.layers.last().map(|l| l.out_len).unwrap_or(0)
    }

    pub fn out_channels(&self) -> usize {
        self.layers.last().map(|l| l.out_channels).unwrap_or(0)
    }
}

/// The full block list of a configuration, in execution order:
/// encoders 1..=N, bottleneck, decoders N..=1, output.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub config: ArchitectureConfig,
    pub blocks: Vec<BlockLayout>,
}

struct Builder {
    k: usize,
    channels: usize,
    len: usize,
    layers: Vec<LayerDesc>,
}

impl Builder {
    fn new(k: usize, channels: usize, len: usize) -> Self {
        Self {
            k,
            channels,
            len,
            layers: vec![],
        }
    }

    fn push(&mut self, kind: LayerKind, out_channels: usize, out_len: usize) {
        self.layers.push(LayerDesc {
            kind,
            in_channels: self.channels,
            in_len: self.len,
            out_channels,
            out_len,
        });
        self.channels = out_channels;
        self.len = out_len;
    }

    fn conv(&mut self, out: usize, stride: usize, norm: bool) -> Result<()> {
        let spec = ConvSpec::new(self.k, stride, self.channels, out)?;
        let len = spec.conv_output_len(self.len);
        self.push(LayerKind::Conv(spec), out, len);
        if norm {
            self.push(LayerKind::BatchNorm, out, len);
            self.push(LayerKind::Relu, out, len);
        }
        Ok(())
    }

    fn pool(&mut self) {
        self.push(LayerKind::MaxPool, self.channels, self.len / 2);
    }

    fn up(&mut self, out: usize) -> Result<()> {
        let spec = ConvSpec::new(self.k, 2, self.channels, out)?;
        let len = spec.transpose_output_len(self.len);
        self.push(LayerKind::ConvTranspose(spec), out, len);
        self.push(LayerKind::Relu, out, len);
        Ok(())
    }

    /// Stride-1 conv followed by the variant's halving stage.
    fn down(&mut self, width: usize, variant: EncoderVariant) -> Result<()> {
        self.conv(width, 1, true)?;
        match variant {
            EncoderVariant::A => self.pool(),
            EncoderVariant::B => self.conv(width, 2, true)?,
            EncoderVariant::C => {
                self.conv(width, 1, true)?;
                self.pool();
            }
        }
        Ok(())
    }

    fn finish(self, kind: BlockKind, skip_channels: usize) -> BlockLayout {
        BlockLayout {
            kind,
            skip_channels,
            layers: self.layers,
        }
    }
}

impl Layout {
    pub fn new(config: &ArchitectureConfig) -> Result<Self> {
        config.validate()?;
        let k = config.kernel_size;
        let mut blocks = Vec::with_capacity(2 * config.depth + 2);
        let mut channels = 1;
        let mut len = config.bands;
        let mut skips = Vec::with_capacity(config.depth);
        for level in 1..=config.depth {
            let mut b = Builder::new(k, channels, len);
            b.down(config.level_channels(level), config.variant)?;
            channels = b.channels;
            len = b.len;
            skips.push(channels);
            blocks.push(b.finish(BlockKind::Encoder(level), 0));
        }
        let width = config.bottleneck_channels();
        let mut b = Builder::new(k, channels, len);
        b.down(width, config.variant)?;
        b.up(width)?;
        channels = b.channels;
        len = b.len;
        blocks.push(b.finish(BlockKind::Bottleneck, 0));
        for level in (1..=config.depth).rev() {
            let skip = skips[level - 1];
            let width = config.level_channels(level);
            let mut b = Builder::new(k, channels + skip, len);
            b.conv(width, 1, true)?;
            b.conv(width, 1, true)?;
            b.up(width)?;
            channels = b.channels;
            len = b.len;
            blocks.push(b.finish(BlockKind::Decoder(level), skip));
        }
        let mut b = Builder::new(k, channels, len);
        b.conv(1, 1, false)?;
        blocks.push(b.finish(BlockKind::Output, 0));
        Ok(Self {
            config: *config,
            blocks,
        })
    }

    /// Main-path input channels of a block (excluding the skip).
    pub fn main_in_channels(&self, block: usize) -> usize {
        let b = &self.blocks[block];
        b.layers[0].in_channels - b.skip_channels
    }

    /// Output length of every block in execution order.
    pub fn length_trace(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.out_len()).collect()
    }
}
