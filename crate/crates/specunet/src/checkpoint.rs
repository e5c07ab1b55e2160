//! `SUNW` checkpoints: magic, u32 version, u32 header length, a JSON header
//! with the architecture, seed and tensor index, then f32 LE blobs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use specunet_core::unet::{ArchitectureConfig, Model};
use specunet_core::Scalar;

use crate::error::{Error, Result};
use crate::fsutil::{extend_f32s, f32s_from_le, read, write_atomic, Reader};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"SUNW";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchHeader {
    pub depth: usize,
    pub variant: String,
    pub base_channels: usize,
    pub kernel_size: usize,
    pub bands: usize,
}

impl ArchHeader {
    pub fn from_config(cfg: &ArchitectureConfig) -> Self {
        Self {
            depth: cfg.depth,
            variant: cfg.variant.to_string(),
            base_channels: cfg.base_channels,
            kernel_size: cfg.kernel_size,
            bands: cfg.bands,
        }
    }

    pub fn to_config(&self) -> Result<ArchitectureConfig> {
        let cfg = ArchitectureConfig {
            depth: self.depth,
            variant: self.variant.parse()?,
            base_channels: self.base_channels,
            kernel_size: self.kernel_size,
            bands: self.bands,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
    /// Byte offset from the start of the blob section.
    pub offset: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub config: ArchHeader,
    pub seed: u64,
    pub tensors: Vec<TensorEntry>,
}

/// Parameters are stored as f32; an f64 model is rounded.
pub fn encode_checkpoint<T: Scalar>(model: &Model<T>) -> Vec<u8> {
    let named = model.named_tensors();
    let mut offset = 0u64;
    let tensors = named
        .iter()
        .map(|t| {
            let e = TensorEntry {
                name: t.name.clone(),
                shape: t.shape.clone(),
                offset,
            };
            offset += 4 * t.data.len() as u64;
            e
        })
        .collect();
    let header = CheckpointHeader {
        config: ArchHeader::from_config(model.config()),
        seed: model.seed(),
        tensors,
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(12 + json.len() + offset as usize);
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for t in &named {
        extend_f32s(&mut out, t.data.iter().map(|v| v.as_f32()));
    }
    out
}

/// Builds a fresh model; nothing outside the returned value is touched.
pub fn decode_checkpoint<T: Scalar>(bytes: &[u8], path: &Path) -> Result<Model<T>> {
    let bad = |msg: String| Error::format(path, msg);
    let mut r = Reader::new(bytes);
    let magic = r.take(4).ok_or_else(|| bad("file shorter than the magic".into()))?;
    if magic != CHECKPOINT_MAGIC {
        return Err(bad(format!("bad magic {magic:?}, expected \"SUNW\"")));
    }
    let version = r.u32().ok_or_else(|| bad("truncated header".into()))?;
    if version != CHECKPOINT_VERSION {
        return Err(bad(format!("unsupported checkpoint version {version}")));
    }
    let hlen = r.u32().ok_or_else(|| bad("truncated header".into()))? as usize;
    let json = r
        .take(hlen)
        .ok_or_else(|| bad(format!("header length {hlen} exceeds file size")))?;
    let header: CheckpointHeader =
        serde_json::from_slice(json).map_err(|e| bad(format!("malformed header: {e}")))?;
    let cfg = header.config.to_config().map_err(|e| bad(e.to_string()))?;
    let mut model = Model::<f32>::build(&cfg, header.seed)?;

    let expected = model.named_tensors();
    if expected.len() != header.tensors.len() {
        return Err(bad(format!(
            "{} expects {} tensors, header lists {}",
            cfg.name(),
            expected.len(),
            header.tensors.len()
        )));
    }
    let blobs = r.take(r.remaining()).unwrap_or(&[]);
    let mut offset = 0u64;
    let mut loaded = Vec::with_capacity(expected.len());
    for (want, entry) in expected.iter().zip(&header.tensors) {
        if want.name != entry.name || want.shape != entry.shape {
            return Err(bad(format!(
                "tensor {:?} {:?} does not match {} layout ({:?} {:?})",
                entry.name,
                entry.shape,
                cfg.name(),
                want.name,
                want.shape
            )));
        }
        if entry.offset != offset {
            return Err(bad(format!("tensor {:?} has offset {}, expected {offset}", entry.name, entry.offset)));
        }
        let n = 4 * want.data.len();
        let start = offset as usize;
        let slice = blobs
            .get(start..start + n)
            .ok_or_else(|| bad(format!("truncated at tensor {:?}", entry.name)))?;
        loaded.push((entry.name.clone(), f32s_from_le(slice)));
        offset += n as u64;
    }
    if offset as usize != blobs.len() {
        return Err(bad(format!(
            "{} trailing bytes after the last tensor",
            blobs.len() - offset as usize
        )));
    }
    drop(expected);
    for (name, values) in &loaded {
        model
            .set_tensor(name, values)
            .map_err(|e| bad(e.to_string()))?;
    }
    Ok(model.cast::<T>())
}

pub fn save_checkpoint<T: Scalar>(model: &Model<T>, path: &Path) -> Result<()> {
    write_atomic(path, &encode_checkpoint(model))
}

pub fn load_checkpoint<T: Scalar>(path: &Path) -> Result<Model<T>> {
    decode_checkpoint(&read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use specunet_core::unet::EncoderVariant;

    #[test]
    fn round_trip_keeps_config_and_seed() {
        let cfg = ArchitectureConfig::new(3, EncoderVariant::B).with_base_channels(4);
        let m = Model::<f32>::build(&cfg, 77).unwrap();
        let back: Model<f32> = decode_checkpoint(&encode_checkpoint(&m), Path::new("mem")).unwrap();
        assert_eq!(back.config(), &cfg);
        assert_eq!(back.seed(), 77);
        assert_eq!(back.named_tensors(), m.named_tensors());
    }

    #[test]
    fn rejects_damage() {
        let cfg = ArchitectureConfig::new(1, EncoderVariant::A).with_base_channels(2);
        let bytes = encode_checkpoint(&Model::<f32>::build(&cfg, 1).unwrap());
        let p = Path::new("mem");
        let mut b = bytes.clone();
        b[1] = b'X';
        assert!(decode_checkpoint::<f32>(&b, p).is_err());
        let mut b = bytes.clone();
        b[4] = 2;
        assert!(decode_checkpoint::<f32>(&b, p).unwrap_err().to_string().contains("version"));
        assert!(decode_checkpoint::<f32>(&bytes[..bytes.len() - 4], p).is_err());
        let mut b = bytes.clone();
        b.push(0);
        assert!(decode_checkpoint::<f32>(&b, p).is_err());
        let mut b = bytes.clone();
        b[12] = b'[';
        assert!(decode_checkpoint::<f32>(&b, p).is_err());
    }
}
