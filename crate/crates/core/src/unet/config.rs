use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// How an encoder level (and the bottleneck) halves its resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncoderVariant {
    /// conv(s=1), maxpool(2)
    A,
    /// conv(s=1), conv(s=2)
    B,
    /// conv(s=1), conv(s=1), maxpool(2)
    C,
}

impl EncoderVariant {
    pub const ALL: [EncoderVariant; 3] = [EncoderVariant::A, EncoderVariant::B, EncoderVariant::C];
}

impl fmt::Display for EncoderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderVariant::A => "A",
            EncoderVariant::B => "B",
            EncoderVariant::C => "C",
        })
    }
}

impl FromStr for EncoderVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(EncoderVariant::A),
            "B" | "b" => Ok(EncoderVariant::B),
            "C" | "c" => Ok(EncoderVariant::C),
            other => Err(Error::config(format!("unknown encoder variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArchitectureConfig {
    pub depth: usize,
    pub variant: EncoderVariant,
    pub base_channels: usize,
    pub kernel_size: usize,
    pub bands: usize,
}

pub const MAX_DEPTH: usize = 3;

impl Default for ArchitectureConfig {
    fn default() -> Self {
        Self {
            depth: 3,
            variant: EncoderVariant::B,
            base_channels: 16,
            kernel_size: 3,
            bands: 240,
        }
    }
}

impl ArchitectureConfig {
    pub fn new(depth: usize, variant: EncoderVariant) -> Self {
        Self {
            depth,
            variant,
            ..Self::default()
        }
    }

    pub fn with_base_channels(mut self, base: usize) -> Self {
        self.base_channels = base;
        self
    }

    pub fn with_bands(mut self, bands: usize) -> Self {
        self.bands = bands;
        self
    }

    pub fn with_kernel_size(mut self, k: usize) -> Self {
        self.kernel_size = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > MAX_DEPTH {
            return Err(Error::config(format!(
                "depth must be in 0..={MAX_DEPTH}, got {}",
                self.depth
            )));
        }
        if self.kernel_size == 0 || self.kernel_size % 2 == 0 {
            return Err(Error::config(format!(
                "kernel size must be odd, got {}",
                self.kernel_size
            )));
        }
        if self.base_channels == 0 {
            return Err(Error::config("base_channels must be positive"));
        }
        let factor = 1usize << (self.depth + 1);
        if self.bands == 0 || self.bands % factor != 0 {
            return Err(Error::config(format!(
                "bands ({}) must be a positive multiple of 2^(depth+1) = {factor}",
                self.bands
            )));
        }
        Ok(())
    }

    /// Width of encoder/decoder level `level` (1-based).
    pub fn level_channels(&self, level: usize) -> usize {
        self.base_channels << (level - 1)
    }

    pub fn bottleneck_channels(&self) -> usize {
        self.base_channels << self.depth
    }

    /// Roman-numeral name used in the ablation table, e.g. `IV-B`.
    pub fn name(&self) -> String {
        let roman = ["I", "II", "III", "IV"];
        format!("{}-{}", roman.get(self.depth).copied().unwrap_or("?"), self.variant)
    }

    /// Inverse of [`ArchitectureConfig::name`]; other fields keep their defaults.
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::config(format!("architecture name must look like IV-B, got {name:?}"));
        let (roman, variant) = name.trim().split_once('-').ok_or_else(bad)?;
        let depth = match roman.to_ascii_uppercase().as_str() {
            "I" => 0,
            "II" => 1,
            "III" => 2,
            "IV" => 3,
            _ => return Err(bad()),
        };
        Ok(Self::new(depth, variant.parse()?))
    }
}

/// The twelve ablation configurations, depth-major: I-A, I-B, I-C, II-A, ...
pub fn ablation_grid() -> Vec<ArchitectureConfig> {
    (0..=MAX_DEPTH)
        .flat_map(|depth| {
            EncoderVariant::ALL
                .iter()
                .map(move |&variant| ArchitectureConfig::new(depth, variant))
        })
        .collect()
}
