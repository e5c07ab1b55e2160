use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::library::SpectralLibrary;
use crate::classical::Spectrum;
use crate::error::{Error, Result};

/// Noise above this obscures absorption features.
pub const MAX_NOISE_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureRecipe {
    /// `(class index, proportion)`, classes distinct, proportions summing to 1.
    pub components: Vec<(usize, f64)>,
    pub sigma: f64,
}

impl MixtureRecipe {
    pub fn validate(&self, lib: &SpectralLibrary) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Data("mixture has no components".into()));
        }
        let mut seen = vec![false; lib.len()];
        let mut sum = 0.0;
        for &(c, p) in &self.components {
            if c >= lib.len() {
                return Err(Error::Data(format!(
                    "unknown class index {c} (library has {})",
                    lib.len()
                )));
            }
            if seen[c] {
                return Err(Error::Data(format!("class {c} appears twice")));
            }
            seen[c] = true;
            if !(p >= 0.0) {
                return Err(Error::Data(format!("negative proportion {p}")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Data(format!("proportions sum to {sum}")));
        }
        Ok(())
    }

    /// Class with the largest proportion; ties go to the lowest class index.
    pub fn dominant(&self) -> usize {
        let mut best = self.components[0];
        for &(c, p) in &self.components[1..] {
            if p > best.1 || (p == best.1 && c < best.0) {
                best = (c, p);
            }
        }
        best.0
    }
}

/// `p_1 ~ U(0,1)`, `p_i ~ U(0, 1 - sum_{j<i} p_j)`, last component takes the
/// remainder so the sum is exactly one.
pub fn draw_proportions<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::config("a mixture needs at least one component"));
    }
    let mut out = Vec::with_capacity(n);
    let mut used = 0.0f64;
    for _ in 0..n - 1 {
        let remaining = (1.0 - used).max(0.0);
        let p = rng.random::<f64>() * remaining;
        out.push(p);
        used += p;
    }
    out.push((1.0 - used).max(0.0));
    Ok(out)
}

/// Pointwise convex combination of library spectra.
pub fn mix_spectra(lib: &SpectralLibrary, recipe: &MixtureRecipe) -> Result<Spectrum> {
    recipe.validate(lib)?;
    let bands = lib.bands();
    if let [(c, _)] = recipe.components.as_slice() {
        return Ok(lib.spectra()[*c].clone());
    }
    let mut mix = vec![0.0; bands];
    for &(c, p) in &recipe.components {
        for (m, v) in mix.iter_mut().zip(lib.spectra()[c].values()) {
            *m += p * v;
        }
    }
    Spectrum::new(lib.grid().to_vec(), mix)
}

/// i.i.d. `N(0, sigma^2)` per band, `sigma` in `[0, 0.1]`.
pub fn add_noise<R: Rng + ?Sized>(s: &Spectrum, sigma: f64, rng: &mut R) -> Result<Spectrum> {
    if !(0.0..=MAX_NOISE_SIGMA).contains(&sigma) {
        return Err(Error::config(format!(
            "noise sigma must be in [0, {MAX_NOISE_SIGMA}], got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(s.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::config(format!("{e}")))?;
    let values = s.values().iter().map(|v| v + normal.sample(rng)).collect();
    Spectrum::new(s.wavelengths().to_vec(), values)
}
