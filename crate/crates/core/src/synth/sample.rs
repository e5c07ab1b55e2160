use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::library::SpectralLibrary;
use super::mixture::{add_noise, draw_proportions, mix_spectra, MixtureRecipe, MAX_NOISE_SIGMA};
use super::schedule::{sigma_for_epoch, NoiseSchedule};
use crate::classical::{minmax_scale, ClassicalPipeline, PipelineConfig, Spectrum};
use crate::error::{Error, Result};
use crate::rng::{self, Rng as ChaRng};

/// Upper limit on endmembers per mixture.
pub const MAX_COMPONENTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    /// Noisy mixture, min-max scaled.
    pub input: Vec<f64>,
    /// Classical pipeline output of the dominant endmember.
    pub target: Vec<f64>,
    pub label: usize,
    pub recipe: MixtureRecipe,
    /// The scaled input was constant.
    pub degenerate: bool,
}

fn draw_recipe<R: Rng + ?Sized>(n_classes: usize, sigma: f64, rng: &mut R) -> Result<MixtureRecipe> {
    let n = rng.random_range(1..=MAX_COMPONENTS.min(n_classes));
    let mut pool: Vec<usize> = (0..n_classes).collect();
    for i in 0..n {
        let j = rng.random_range(i..n_classes);
        pool.swap(i, j);
    }
    let props = draw_proportions(n, rng)?;
    Ok(MixtureRecipe {
        components: pool[..n].iter().copied().zip(props).collect(),
        sigma,
    })
}

fn assemble<R: Rng + ?Sized>(
    lib: &SpectralLibrary,
    recipe: MixtureRecipe,
    target: Vec<f64>,
    rng: &mut R,
) -> Result<TrainingSample> {
    let mixed = mix_spectra(lib, &recipe)?;
    let noisy = add_noise(&mixed, recipe.sigma, rng)?;
    let (input, degenerate) = minmax_scale(noisy.values());
    Ok(TrainingSample {
        input,
        target,
        label: recipe.dominant(),
        recipe,
        degenerate,
    })
}

fn pipeline_targets(lib: &SpectralLibrary, pipeline: &ClassicalPipeline) -> Result<Vec<Vec<f64>>> {
    lib.spectra()
        .iter()
        .enumerate()
        .map(|(c, s)| {
            let t = pipeline.run(s)?.spectrum.into_values();
            if t.len() != lib.bands() {
                return Err(Error::Data(format!(
                    "target for {:?} has {} bands after range selection, library has {}",
                    lib.names()[c],
                    t.len(),
                    lib.bands()
                )));
            }
            Ok(t)
        })
        .collect()
}

/// One sample with sigma drawn from the curriculum for `epoch`.
pub fn make_sample<R: Rng + ?Sized>(
    lib: &SpectralLibrary,
    epoch: usize,
    schedule: &NoiseSchedule,
    pipeline: &PipelineConfig,
    rng: &mut R,
) -> Result<TrainingSample> {
    let sigma = sigma_for_epoch(schedule, epoch, rng);
    let recipe = draw_recipe(lib.len(), sigma, rng)?;
    let dominant = recipe.dominant();
    let target = ClassicalPipeline::new(*pipeline)?
        .run(&lib.spectra()[dominant])?
        .spectrum
        .into_values();
    assemble(lib, recipe, target, rng)
}

/// Endless sample stream with per-class pipeline targets computed once.
#[derive(Debug, Clone)]
pub struct SampleGenerator {
    lib: SpectralLibrary,
    targets: Vec<Vec<f64>>,
    schedule: NoiseSchedule,
    rng: ChaRng,
}

impl SampleGenerator {
    pub fn new(lib: SpectralLibrary, pipeline: &PipelineConfig, schedule: NoiseSchedule, seed: u64) -> Result<Self> {
        let targets = pipeline_targets(&lib, &ClassicalPipeline::new(*pipeline)?)?;
        Ok(Self {
            lib,
            targets,
            schedule,
            rng: rng::stream(seed, 1),
        })
    }

    pub fn library(&self) -> &SpectralLibrary {
        &self.lib
    }

    pub fn schedule(&self) -> &NoiseSchedule {
        &self.schedule
    }

    pub fn target(&self, class: usize) -> &[f64] {
        &self.targets[class]
    }

    pub fn next_sample(&mut self, epoch: usize) -> Result<TrainingSample> {
        let sigma = sigma_for_epoch(&self.schedule, epoch, &mut self.rng);
        self.sample_with_sigma(sigma)
    }

    pub fn sample_with_sigma(&mut self, sigma: f64) -> Result<TrainingSample> {
        let recipe = draw_recipe(self.lib.len(), sigma, &mut self.rng)?;
        let target = self.targets[recipe.dominant()].clone();
        assemble(&self.lib, recipe, target, &mut self.rng)
    }

    pub fn batch(&mut self, epoch: usize, size: usize) -> Result<Vec<TrainingSample>> {
        (0..size).map(|_| self.next_sample(epoch)).collect()
    }
}

/// Fixed validation samples, sigma ~ U(0, 0.1), on a stream disjoint from
/// any [`SampleGenerator`] built from the same seed.
pub fn validation_set(
    lib: &SpectralLibrary,
    pipeline: &PipelineConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<TrainingSample>> {
    let targets = pipeline_targets(lib, &ClassicalPipeline::new(*pipeline)?)?;
    let mut rng = rng::stream(seed, 2);
    (0..n)
        .map(|_| {
            let sigma = rng.random::<f64>() * MAX_NOISE_SIGMA;
            let recipe = draw_recipe(lib.len(), sigma, &mut rng)?;
            let target = targets[recipe.dominant()].clone();
            assemble(lib, recipe, target, &mut rng)
        })
        .collect()
}

impl TrainingSample {
    pub fn input_spectrum(&self, lib: &SpectralLibrary) -> Result<Spectrum> {
        Spectrum::new(lib.grid().to_vec(), self.input.clone())
    }
}
