use rand::Rng;
use specunet_core::cube::Cube;
use specunet_core::rng;
use specunet_core::synth::{add_noise, draw_proportions, mix_spectra, MixtureRecipe, SpectralLibrary};

use crate::error::Result;

/// A cube of random library mixtures with light Gaussian noise
/// (sigma up to `max_sigma`), row by row from `seed`.
pub fn synthetic_cube(lib: &SpectralLibrary, height: usize, width: usize, max_sigma: f64, seed: u64) -> Result<Cube> {
    let mut r = rng::stream(seed, 7);
    let bands = lib.bands();
    let mut data = Vec::with_capacity(height * width * bands);
    for _ in 0..height * width {
        let n = r.random_range(1..=lib.len().min(3));
        let mut classes: Vec<usize> = (0..lib.len()).collect();
        for i in 0..n {
            let j = r.random_range(i..lib.len());
            classes.swap(i, j);
        }
        let props = draw_proportions(n, &mut r)?;
        let sigma = r.random::<f64>() * max_sigma;
        let recipe = MixtureRecipe {
            components: classes[..n].iter().copied().zip(props).collect(),
            sigma,
        };
        let s = add_noise(&mix_spectra(lib, &recipe)?, sigma, &mut r)?;
        data.extend(s.values().iter().map(|&v| v as f32));
    }
    let wl = lib.grid().iter().map(|&w| w as f32).collect();
    Ok(Cube::new(height, width, wl, data)?)
}
