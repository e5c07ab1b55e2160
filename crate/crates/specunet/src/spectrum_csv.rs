//! Spectrum CSV: header `wavelength_um,value`, one row per band.

use std::path::Path;

use serde::{Deserialize, Serialize};
use specunet_core::classical::Spectrum;

use crate::error::{Error, Result};
use crate::fsutil::{read, write_atomic};

#[derive(Serialize, Deserialize)]
struct Row {
    wavelength_um: f64,
    value: f64,
}

pub fn parse_spectrum(text: &[u8], path: &Path) -> Result<Spectrum> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text);
    let headers = rdr.headers().map_err(|e| Error::format(path, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["wavelength_um", "value"] {
        return Err(Error::format(
            path,
            format!("expected header `wavelength_um,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let (mut wl, mut vals) = (Vec::new(), Vec::new());
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| Error::format(path, e.to_string()))?;
        wl.push(row.wavelength_um);
        vals.push(row.value);
    }
    Spectrum::new(wl, vals).map_err(|e| Error::format(path, e.to_string()))
}

pub fn format_spectrum(s: &Spectrum) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for (&wavelength_um, &value) in s.wavelengths().iter().zip(s.values()) {
        w.serialize(Row { wavelength_um, value }).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    parse_spectrum(&read(path)?, path)
}

pub fn write_spectrum(s: &Spectrum, path: &Path) -> Result<()> {
    write_atomic(path, &format_spectrum(s))
}
