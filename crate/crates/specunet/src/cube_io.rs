//! `SCUB` cube files: magic, u32 version, u32 height, width, bands, the
//! wavelengths and then every pixel's bands, all little-endian f32.

use std::path::Path;

use specunet_core::cube::Cube;

use crate::error::{Error, Result};
use crate::fsutil::{extend_f32s, f32s_from_le, read, write_atomic, Reader};

pub const CUBE_MAGIC: &[u8; 4] = b"SCUB";
pub const CUBE_VERSION: u32 = 1;

pub fn encode_cube(cube: &Cube) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 4 * (cube.bands() + cube.data().len()));
    out.extend_from_slice(CUBE_MAGIC);
    for v in [CUBE_VERSION, cube.height() as u32, cube.width() as u32, cube.bands() as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    extend_f32s(&mut out, cube.wavelengths().iter().copied());
    extend_f32s(&mut out, cube.data().iter().copied());
    out
}

/// `path` only labels errors.
pub fn decode_cube(bytes: &[u8], path: &Path) -> Result<Cube> {
    let bad = |msg: String| Error::format(path, msg);
    let mut r = Reader::new(bytes);
    let magic = r.take(4).ok_or_else(|| bad("file shorter than the magic".into()))?;
    if magic != CUBE_MAGIC {
        return Err(bad(format!("bad magic {magic:?}, expected \"SCUB\"")));
    }
    let version = r.u32().ok_or_else(|| bad("truncated header".into()))?;
    if version != CUBE_VERSION {
        return Err(bad(format!("unsupported cube version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = r.u32().ok_or_else(|| bad("truncated header".into()))? as usize;
    }
    let [h, w, b] = dims;
    let values = h
        .checked_mul(w)
        .and_then(|p| p.checked_mul(b))
        .ok_or_else(|| bad(format!("header dimensions {h}x{w}x{b} overflow")))?;
    let need = (b + values) as u128 * 4;
    if (r.remaining() as u128) != need {
        return Err(bad(format!(
            "header claims {h}x{w}x{b} ({need} payload bytes) but {} bytes follow",
            r.remaining()
        )));
    }
    let wl = f32s_from_le(r.take(4 * b).unwrap());
    let data = f32s_from_le(r.take(4 * values).unwrap());
    Cube::new(h, w, wl, data).map_err(|e| bad(e.to_string()))
}

pub fn read_cube(path: &Path) -> Result<Cube> {
    decode_cube(&read(path)?, path)
}

pub fn write_cube(cube: &Cube, path: &Path) -> Result<()> {
    write_atomic(path, &encode_cube(cube))
}
