//! Library directories: `<class>.csv` per endmember and a `library.txt`
//! manifest listing class order.

use std::path::Path;

use specunet_core::synth::SpectralLibrary;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::spectrum_csv::{format_spectrum, read_spectrum};

pub const MANIFEST: &str = "library.txt";

/// Loads classes in manifest order, or sorted by file name when the
/// directory has no manifest.
pub fn load_library(dir: &Path) -> Result<SpectralLibrary> {
    let manifest = dir.join(MANIFEST);
    let names: Vec<String> = if manifest.exists() {
        std::fs::read_to_string(&manifest)
            .map_err(|e| Error::io(&manifest, e))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    } else {
        let mut names = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().is_some_and(|e| e == "csv") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    names.push(stem.to_string());
                }
            }
        }
        names.sort();
        names
    };
    if names.is_empty() {
        return Err(Error::format(dir, "no spectra in library directory"));
    }
    let mut entries = Vec::with_capacity(names.len());
    let mut first: Option<(String, Vec<f64>)> = None;
    for name in names {
        let file = dir.join(format!("{name}.csv"));
        let s = read_spectrum(&file)?;
        match &first {
            None => first = Some((file.display().to_string(), s.wavelengths().to_vec())),
            Some((f0, grid)) if grid.as_slice() != s.wavelengths() => {
                return Err(Error::Invalid(format!(
                    "wavelength grid of {} differs from {f0}",
                    file.display()
                )));
            }
            _ => {}
        }
        entries.push((name, s));
    }
    Ok(SpectralLibrary::new(entries)?)
}

pub fn save_library(lib: &SpectralLibrary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, s) in lib.names().iter().zip(lib.spectra()) {
        write_atomic(&dir.join(format!("{name}.csv")), &format_spectrum(s))?;
    }
    let mut manifest = lib.names().join("\n");
    manifest.push('\n');
    write_atomic(&dir.join(MANIFEST), manifest.as_bytes())
}
