use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::classical::{linspace, upper_hull_values, Spectrum};
use crate::error::{Error, Result};
use crate::rng;

/// Named endmember spectra on one shared wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLibrary {
    names: Vec<String>,
    spectra: Vec<Spectrum>,
}

impl SpectralLibrary {
    /// Validates unique names and a common grid (exact equality).
    pub fn new(entries: Vec<(String, Spectrum)>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Data(String::from("spectral library is empty")))?;
        let grid = first.1.wavelengths().to_vec();
        let first_name = first.0.clone();
        let mut names: Vec<String> = Vec::with_capacity(entries.len());
        let mut spectra = Vec::with_capacity(entries.len());
        for (name, s) in entries {
            if names.contains(&name) {
                return Err(Error::Data(format!("duplicate class {name:?}")));
            }
            if s.wavelengths() != grid.as_slice() {
                return Err(Error::Data(format!(
                    "wavelength grid of {name:?} differs from {first_name:?}"
                )));
            }
            names.push(name);
            spectra.push(s);
        }
        Ok(Self { names, spectra })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn spectra(&self) -> &[Spectrum] {
        &self.spectra
    }

    pub fn spectrum(&self, class: usize) -> Option<&Spectrum> {
        self.spectra.get(class)
    }

    pub fn grid(&self) -> &[f64] {
        self.spectra[0].wavelengths()
    }

    pub fn bands(&self) -> usize {
        self.grid().len()
    }
}

/// Stand-in endmembers: a smooth quadratic baseline minus one to four
/// Gaussian absorption bands, clipped to `(0, 1]`, on a grid spanning
/// 1.0 to 2.6 micrometers.
///
/// Every spectrum has at least one point at least 1e-3 below its upper
/// hull; draws failing that are redrawn.
pub fn gen_synthetic_library(n_classes: usize, bands: usize, seed: u64) -> Result<SpectralLibrary> {
    if n_classes == 0 {
        return Err(Error::config("n_classes must be at least 1"));
    }
    if bands < 2 {
        return Err(Error::config("a library needs at least 2 bands"));
    }
    let grid = linspace(1.0, 2.6, bands);
    let mut rng = rng::seeded(seed);
    let mut entries = Vec::with_capacity(n_classes);
    for class in 0..n_classes {
        let values = loop {
            let a0 = rng.random_range(0.45..0.9);
            let a1 = rng.random_range(-0.15..0.15);
            let a2 = rng.random_range(-0.1..0.1);
            let n_bands = rng.random_range(1..=4);
            let absorptions: Vec<(f64, f64, f64)> = (0..n_bands)
                .map(|_| {
                    (
                        rng.random_range(1.0..=2.6),
                        rng.random_range(0.05..=0.5),
                        rng.random_range(0.01..=0.1),
                    )
                })
                .collect();
            let v: Vec<f64> = grid
                .iter()
                .map(|&w| {
                    let t = w - 1.8;
                    let mut v = a0 + a1 * t + a2 * t * t;
                    for &(c, d, s) in &absorptions {
                        let z = (w - c) / s;
                        v -= d * num_traits::Float::exp(-0.5 * z * z);
                    }
                    v.clamp(1e-3, 1.0)
                })
                .collect();
            let hull = upper_hull_values(&grid, &v);
            if hull.iter().zip(&v).any(|(h, x)| h - x > 1e-3) {
                break v;
            }
        };
        entries.push((format!("synthetic_{class:02}"), Spectrum::new(grid.clone(), values)?));
    }
    SpectralLibrary::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn deterministic_per_seed() {
        let a = gen_synthetic_library(5, 240, 8).unwrap();
        let b = gen_synthetic_library(5, 240, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_synthetic_library(5, 240, 9).unwrap());
    }

    #[test]
    fn twenty_eight_distinct_classes() {
        let lib = gen_synthetic_library(28, 240, 1).unwrap();
        assert_eq!(lib.len(), 28);
        let mut names = lib.names().to_vec();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 28);
        for s in lib.spectra() {
            assert!(s.values().iter().all(|&v| v > 0.0 && v <= 1.0));
        }
    }

    #[test]
    fn rejects_mismatched_grids_and_duplicates() {
        let a = Spectrum::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let b = Spectrum::new(vec![1.0, 2.5], vec![0.5, 0.5]).unwrap();
        let err = SpectralLibrary::new(vec![("a".into(), a.clone()), ("b".into(), b)]).unwrap_err();
        let msg = alloc::string::ToString::to_string(&err);
        assert!(msg.contains("\"a\"") && msg.contains("\"b\""));
        assert!(SpectralLibrary::new(vec![("a".into(), a.clone()), ("a".into(), a)]).is_err());
        assert!(SpectralLibrary::new(vec![]).is_err());
    }
}
