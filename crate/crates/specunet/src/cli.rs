//! Command-line interface.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use specunet_core::classical::ClassicalPipeline;
use specunet_core::cube::Cube;
use specunet_core::gradcheck::{layer_suite, model_suite, SuiteRow};
use specunet_core::synth::{gen_synthetic_library, validation_set, SampleGenerator, SpectralLibrary};
use specunet_core::train::{evaluate, train, Termination};
use specunet_core::unet::{ablation_grid, count_flops, ArchitectureConfig, Model};
use specunet_core::Scalar;

use crate::bench::bench;
use crate::checkpoint::{load_checkpoint, save_checkpoint};
use crate::config_file::{FileConfig, Settings};
use crate::cube_io::{encode_cube, read_cube, write_cube};
use crate::fsutil::write_atomic;
use crate::history::{format_history, read_history};
use crate::library_io::{load_library, save_library};
use crate::processing::{classical_cube, preprocess_cube};
use crate::report::{line_plot, Series};
use crate::synth_cube::synthetic_cube;

#[derive(Debug, Parser)]
#[command(name = "specunet", version, about = "Train and run a 1D-UNet spectral preprocessor")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Arithmetic precision for training and inference.
    #[arg(long, global = true, value_enum, default_value_t = Precision::F32)]
    pub precision: Precision,
    /// Worker threads for cube processing.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    /// TOML settings file (see the README for keys).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F32,
    F64,
}

#[derive(Debug, Args)]
pub struct LibrarySource {
    /// Library directory; a synthetic library is generated when absent.
    #[arg(long)]
    pub library: Option<PathBuf>,
    /// Classes in the synthetic library.
    #[arg(long, default_value_t = 28)]
    pub classes: usize,
}

#[derive(Debug, Args)]
pub struct ArchOverrides {
    /// Architecture name such as IV-B.
    #[arg(long)]
    pub arch: Option<String>,
    #[arg(long)]
    pub base_channels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainOverrides {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Uncorrected Adam moments, exactly as written in the paper.
    #[arg(long)]
    pub paper_exact: bool,
    /// Validation samples.
    #[arg(long)]
    pub val_count: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic endmember library directory.
    GenLibrary {
        #[arg(long, default_value_t = 28)]
        classes: usize,
        #[arg(long, default_value_t = 240)]
        bands: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write generated training samples: samples.csv plus input and target cubes.
    GenDataset {
        #[command(flatten)]
        source: LibrarySource,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Curriculum epoch that sets the noise bound.
        #[arg(long, default_value_t = 1)]
        epoch: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a cube of random library mixtures.
    GenCube {
        #[command(flatten)]
        source: LibrarySource,
        #[arg(long, default_value_t = 100)]
        height: usize,
        #[arg(long, default_value_t = 100)]
        width: usize,
        #[arg(long, default_value_t = 0.02)]
        max_sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model and write its best-validation checkpoint.
    Train {
        #[command(flatten)]
        source: LibrarySource,
        #[command(flatten)]
        arch: ArchOverrides,
        #[command(flatten)]
        overrides: TrainOverrides,
        #[arg(long)]
        out: PathBuf,
        /// History CSV; defaults to the checkpoint path with a .csv extension.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Train all twelve configurations and tabulate FLOPs and validation loss.
    Ablate {
        #[command(flatten)]
        source: LibrarySource,
        #[command(flatten)]
        overrides: TrainOverrides,
        #[arg(long)]
        base_channels: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a checkpoint over every pixel of a cube.
    Preprocess {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the classical pipeline over every pixel of a cube.
    Classical {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Time the classical and neural paths on the same cube.
    Bench {
        /// Checkpoint; an untrained model of the configured architecture otherwise.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Cube file; a synthetic cube otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        height: usize,
        #[arg(long, default_value_t = 100)]
        width: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Report JSON path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Finite-difference checks of every layer and of toy networks.
    Gradcheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        model_trials: usize,
    },
    /// Static SVG and CSV plots from a training history and a checkpoint.
    Report {
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        source: LibrarySource,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn settings(cli: &Cli) -> anyhow::Result<Settings> {
    match &cli.config {
        Some(p) => Ok(FileConfig::load(p)?.resolve()?),
        None => Ok(Settings::default()),
    }
}

fn library(src: &LibrarySource, bands: usize, seed: u64) -> anyhow::Result<SpectralLibrary> {
    match &src.library {
        Some(dir) => Ok(load_library(dir)?),
        None => Ok(gen_synthetic_library(src.classes, bands, seed)?),
    }
}

fn apply_train(s: &mut Settings, o: &TrainOverrides, seed: u64) -> anyhow::Result<()> {
    let t = &mut s.train;
    if let Some(v) = o.epochs {
        t.max_epochs = v;
    }
    if let Some(v) = o.steps {
        t.steps_per_epoch = v;
    }
    if let Some(v) = o.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = o.lr {
        t.lr = v;
    }
    if o.paper_exact {
        t.bias_correction = false;
    }
    if let Some(v) = o.val_count {
        s.val_count = v;
    }
    t.seed = seed;
    s.validate()?;
    Ok(())
}

fn apply_arch(s: &mut Settings, o: &ArchOverrides) -> anyhow::Result<()> {
    if let Some(name) = &o.arch {
        let named = ArchitectureConfig::from_name(name)?;
        s.arch.depth = named.depth;
        s.arch.variant = named.variant;
    }
    if let Some(b) = o.base_channels {
        s.arch.base_channels = b;
    }
    s.arch.validate()?;
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let mut s = settings(&cli)?;
    let seed = cli.seed;
    let workers = cli.workers as usize;
    match &cli.command {
        Command::GenLibrary { classes, bands, out } => {
            let lib = gen_synthetic_library(*classes, *bands, seed)?;
            save_library(&lib, out)?;
            println!("wrote {} classes to {}", lib.len(), out.display());
        }
        Command::GenDataset {
            source,
            count,
            epoch,
            out,
        } => gen_dataset(&s, source, *count, *epoch, out, seed)?,
        Command::GenCube {
            source,
            height,
            width,
            max_sigma,
            out,
        } => {
            let lib = library(source, s.arch.bands, seed)?;
            let cube = synthetic_cube(&lib, *height, *width, *max_sigma, seed)?;
            write_cube(&cube, out)?;
            println!("wrote {}x{}x{} cube to {}", cube.height(), cube.width(), cube.bands(), out.display());
        }
        Command::Train {
            source,
            arch,
            overrides,
            out,
            history,
        } => {
            apply_arch(&mut s, arch)?;
            apply_train(&mut s, overrides, seed)?;
            let history = history.clone().unwrap_or_else(|| out.with_extension("csv"));
            match cli.precision {
                Precision::F32 => train_cmd::<f32>(&s, source, out, &history, seed)?,
                Precision::F64 => train_cmd::<f64>(&s, source, out, &history, seed)?,
            }
        }
        Command::Ablate {
            source,
            overrides,
            base_channels,
            out,
        } => {
            apply_train(&mut s, overrides, seed)?;
            if let Some(b) = base_channels {
                s.arch.base_channels = *b;
            }
            match cli.precision {
                Precision::F32 => ablate::<f32>(&s, source, out, seed)?,
                Precision::F64 => ablate::<f64>(&s, source, out, seed)?,
            }
        }
        Command::Preprocess { model, input, output } => match cli.precision {
            Precision::F32 => preprocess::<f32>(model, input, output, workers)?,
            Precision::F64 => preprocess::<f64>(model, input, output, workers)?,
        },
        Command::Classical { input, output } => {
            let cube = read_cube(input)?;
            let out = classical_cube(&cube, &ClassicalPipeline::new(s.pipeline)?, workers)?;
            write_cube(&out.cube, output)?;
            println!("{} pixels, {} degenerate", cube.pixels(), out.degenerate);
        }
        Command::Bench {
            model,
            input,
            height,
            width,
            reps,
            json,
        } => match cli.precision {
            Precision::F32 => bench_cmd::<f32>(&s, model.as_deref(), input.as_deref(), (*height, *width), *reps, json.as_deref(), workers, seed)?,
            Precision::F64 => bench_cmd::<f64>(&s, model.as_deref(), input.as_deref(), (*height, *width), *reps, json.as_deref(), workers, seed)?,
        },
        Command::Gradcheck { trials, model_trials } => {
            let mut rows = layer_suite(*trials, seed)?;
            rows.extend(model_suite(*model_trials, seed)?);
            print!("{}", gradcheck_table(&rows));
            if let Some(bad) = rows.iter().find(|r| !r.pass) {
                bail!("{} failed: max relative error {:.3e}", bad.name, bad.max_rel_err);
            }
        }
        Command::Report {
            history,
            model,
            source,
            samples,
            out,
        } => report(&s, history, model.as_deref(), source, *samples, out, seed)?,
    }
    Ok(())
}

fn gen_dataset(s: &Settings, source: &LibrarySource, count: usize, epoch: usize, out: &Path, seed: u64) -> anyhow::Result<()> {
    if count == 0 {
        bail!("--count must be positive");
    }
    let lib = library(source, s.arch.bands, seed)?;
    let mut g = SampleGenerator::new(lib.clone(), &s.pipeline, s.train.schedule, seed)?;
    let samples = g.batch(epoch, count)?;
    let mut table = String::from("sample,label,class,sigma,components\n");
    for (i, x) in samples.iter().enumerate() {
        let comps: Vec<String> = x.recipe.components.iter().map(|(c, p)| format!("{c}:{p:.6}")).collect();
        let _ = writeln!(
            table,
            "{i},{},{},{:.6},{}",
            x.label,
            lib.names()[x.label],
            x.recipe.sigma,
            comps.join(";")
        );
    }
    let wl: Vec<f32> = lib.grid().iter().map(|&w| w as f32).collect();
    let flat = |f: &dyn Fn(&specunet_core::synth::TrainingSample) -> &[f64]| -> Vec<f32> {
        samples.iter().flat_map(|x| f(x).iter().map(|&v| v as f32)).collect()
    };
    let inputs = Cube::new(1, count, wl.clone(), flat(&|x| &x.input))?;
    let targets = Cube::new(1, count, wl, flat(&|x| &x.target))?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_atomic(&out.join("inputs.scub"), &encode_cube(&inputs))?;
    write_atomic(&out.join("targets.scub"), &encode_cube(&targets))?;
    write_atomic(&out.join("samples.csv"), table.as_bytes())?;
    println!("wrote {count} samples to {}", out.display());
    Ok(())
}

fn train_cmd<T: Scalar>(s: &Settings, source: &LibrarySource, out: &Path, history: &Path, seed: u64) -> anyhow::Result<()> {
    let lib = library(source, s.arch.bands, seed)?;
    let arch = s.arch.with_bands(lib.bands());
    let val = validation_set(&lib, &s.pipeline, s.val_count, seed)?;
    let mut g = SampleGenerator::new(lib, &s.pipeline, s.train.schedule, seed)?;
    let model = Model::<T>::build(&arch, seed)?;
    eprintln!("training {} ({} parameters)", arch.name(), model.param_count());
    let outcome = train(model, &mut g, &val, &s.train)?;
    for e in &outcome.history.epochs {
        eprintln!(
            "epoch {:3}  train {:.5}  val {:.5}  lr {:.1e}  sigma<= {:.3}",
            e.epoch, e.train_mse, e.val_mse, e.lr, e.sigma_hi
        );
    }
    match outcome.history.termination {
        Termination::MaxEpochs => eprintln!("stopped after max epochs"),
        Termination::EarlyStop { epoch } => eprintln!("early stop at epoch {epoch}"),
        Termination::NonFinite { epoch, step } => {
            eprintln!("non-finite loss at epoch {epoch} step {step}; keeping best checkpoint")
        }
    }
    let m = evaluate(&outcome.best, &val)?;
    eprintln!("best: val mse {:.5}, mean r {:.4}", m.mse, m.pearson_r);
    write_atomic(history, &format_history(&outcome.history))?;
    save_checkpoint(&outcome.best, out)?;
    println!("wrote {} and {}", out.display(), history.display());
    Ok(())
}

fn ablate<T: Scalar>(s: &Settings, source: &LibrarySource, out: &Path, seed: u64) -> anyhow::Result<()> {
    let lib = library(source, s.arch.bands, seed)?;
    let val = validation_set(&lib, &s.pipeline, s.val_count, seed)?;
    let mut table = String::from("config,mflops,params,best_val_mse,pearson_r,epochs\n");
    for cfg in ablation_grid() {
        let cfg = cfg.with_base_channels(s.arch.base_channels).with_bands(lib.bands());
        let flops = count_flops(&cfg)?;
        let mut g = SampleGenerator::new(lib.clone(), &s.pipeline, s.train.schedule, seed)?;
        let outcome = train(Model::<T>::build(&cfg, seed)?, &mut g, &val, &s.train)?;
        let m = evaluate(&outcome.best, &val)?;
        let line = format!(
            "{},{:.3},{},{:.6},{:.4},{}",
            cfg.name(),
            flops.millions(),
            outcome.best.param_count(),
            m.mse,
            m.pearson_r,
            outcome.history.epochs.len()
        );
        eprintln!("{line}");
        table.push_str(&line);
        table.push('\n');
    }
    write_atomic(out, table.as_bytes())?;
    print!("{table}");
    Ok(())
}

fn preprocess<T: Scalar>(model: &Path, input: &Path, output: &Path, workers: usize) -> anyhow::Result<()> {
    let model = load_checkpoint::<T>(model)?;
    let cube = read_cube(input)?;
    let out = preprocess_cube(&cube, &model, workers)?;
    write_cube(&out.cube, output)?;
    println!("{} pixels, {} degenerate", cube.pixels(), out.degenerate);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd<T: Scalar>(
    s: &Settings,
    model: Option<&Path>,
    input: Option<&Path>,
    (height, width): (usize, usize),
    reps: usize,
    json: Option<&Path>,
    workers: usize,
    seed: u64,
) -> anyhow::Result<()> {
    let model = match model {
        Some(p) => load_checkpoint::<T>(p)?,
        None => Model::<T>::build(&s.arch, seed)?,
    };
    let cube = match input {
        Some(p) => read_cube(p)?,
        None => {
            let lib = gen_synthetic_library(28, model.config().bands, seed)?;
            synthetic_cube(&lib, height, width, 0.02, seed)?
        }
    };
    let run = bench(&cube, &model, &ClassicalPipeline::new(s.pipeline)?, reps, workers)?;
    print!("{}", run.report.table());
    if let Some(p) = json {
        write_atomic(p, serde_json::to_string_pretty(&run.report)?.as_bytes())?;
    }
    Ok(())
}

pub fn gradcheck_table(rows: &[SuiteRow]) -> String {
    let mut t = format!("{:<18} {:>6} {:>10} {:>9} {:>8} {:>12}  result\n", "op", "trials", "checked", "skipped", "tol", "max rel err");
    for r in rows {
        let _ = writeln!(
            t,
            "{:<18} {:>6} {:>10} {:>9} {:>8.0e} {:>12.3e}  {}",
            r.name,
            r.trials,
            r.checked,
            r.skipped,
            r.tolerance,
            r.max_rel_err,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    t
}

fn report(
    s: &Settings,
    history: &Path,
    model: Option<&Path>,
    source: &LibrarySource,
    samples: usize,
    out: &Path,
    seed: u64,
) -> anyhow::Result<()> {
    let rows = read_history(history)?;
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let train_pts = rows.iter().map(|r| (r.epoch as f64, r.train_mse)).collect();
    let val_pts = rows.iter().map(|r| (r.epoch as f64, r.val_mse)).collect();
    let svg = line_plot(
        "Training and validation loss",
        "epoch",
        "MSE",
        &[
            Series {
                name: "train",
                points: train_pts,
            },
            Series {
                name: "validation",
                points: val_pts,
            },
        ],
        true,
    );
    files.push((out.join("loss.svg"), svg.into_bytes()));
    let sigma = rows.iter().map(|r| (r.epoch as f64, r.sigma_hi)).collect();
    let svg = line_plot("Noise upper bound", "epoch", "sigma", &[Series { name: "sigma_hi", points: sigma }], false);
    files.push((out.join("noise.svg"), svg.into_bytes()));

    if let Some(path) = model {
        let model = load_checkpoint::<f64>(path)?;
        let lib = library(source, model.config().bands, seed)?;
        let set = validation_set(&lib, &s.pipeline, samples.max(1), seed)?;
        let mut csv = String::from("sample,wavelength_um,input,target,output\n");
        for (i, x) in set.iter().enumerate() {
            let y = model
                .infer_one(&specunet_core::tensor::Tensor1D::from_f64(&x.input))?
                .to_f64();
            let grid = lib.grid();
            for b in 0..grid.len() {
                let _ = writeln!(csv, "{i},{},{},{},{}", grid[b], x.input[b], x.target[b], y[b]);
            }
            let pts = |v: &[f64]| grid.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
            let title = format!("Sample {i}: {} dominant", lib.names()[x.label]);
            let svg = line_plot(
                &title,
                "wavelength (um)",
                "value",
                &[
                    Series { name: "input", points: pts(&x.input) },
                    Series { name: "classical target", points: pts(&x.target) },
                    Series { name: "network", points: pts(&y) },
                ],
                false,
            );
            files.push((out.join(format!("sample_{i}.svg")), svg.into_bytes()));
        }
        files.push((out.join("samples.csv"), csv.into_bytes()));
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (p, bytes) in &files {
        write_atomic(p, bytes)?;
    }
    println!("wrote {} files to {}", files.len(), out.display());
    Ok(())
}
