//! Command-line front end: quantize an inspiration image, evolve, and write
//! the run's artifacts to an output directory.
//!
//! Layout of `--out-dir`:
//!
//! | file | contents |
//! |------|----------|
//! | `target.png` | the quantized inspiration image |
//! | `frame_NNNNNN.png` | best pairing after generation `NNNNNN` |
//! | `trajectory.gif` | all frames in generation order |
//! | `fitness_log.csv` | one row per generation |
//! | `run_config.toml` | the resolved configuration |
//! | `checkpoint.json` | latest checkpoint, with `--checkpoint-every` |
//!
//! Settings are resolved in three layers: defaults for the setup, then the
//! `--config` file, then individual flags. `run_config.toml` can be passed
//! back through `--config` to repeat a run exactly.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crate::engine::{fitness_log_csv, Checkpoint, EngineError, Evolution, RunConfig};
use crate::genomes::SetupKind;
use crate::imaging::{assemble_gif, load_image, load_paletted_png, quantize, save_png, ImagingError, PalettedImage};

pub const TARGET_FILE: &str = "target.png";
pub const LOG_FILE: &str = "fitness_log.csv";
pub const GIF_FILE: &str = "trajectory.gif";
pub const CONFIG_FILE: &str = "run_config.toml";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("config file {path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Evolve an image with two cooperating populations of shapes and colors.
#[derive(Debug, Clone, Parser)]
#[command(name = "omnirep", version)]
pub struct CliArgs {
    /// Inspiration image (PNG).
    #[arg(long = "image", value_name = "PATH")]
    pub image_path: PathBuf,

    /// Shape setup: chunks, polygons or circles.
    #[arg(long, required_unless_present = "resume")]
    pub setup: Option<SetupKind>,

    /// Directory for every output file.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,

    #[arg(long)]
    pub generations: Option<u64>,

    /// RNG seed; must fit in a signed 64-bit integer so it survives TOML.
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,

    /// Save a frame after every this many generations (and after the last).
    #[arg(long, value_name = "N")]
    pub snapshot_every: Option<u64>,

    /// Palette size the inspiration image is quantized to.
    #[arg(long, value_name = "K")]
    pub colors: Option<usize>,

    /// TOML file overriding default parameters; flags override it in turn.
    #[arg(long = "config", value_name = "PATH")]
    pub config_path: Option<PathBuf>,

    /// Delay between GIF frames in hundredths of a second.
    #[arg(long, value_name = "CS", default_value_t = 20)]
    pub frame_delay: u16,

    /// Write checkpoint.json after every this many generations.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub checkpoint_every: Option<u64>,

    /// Continue from a checkpoint file. The run's configuration comes from
    /// the checkpoint.
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with_all = ["generations", "seed", "snapshot_every", "colors", "config_path"]
    )]
    pub resume: Option<PathBuf>,
}

/// What a completed run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub generations: u64,
    pub frames: Vec<PathBuf>,
    pub best_fitness: f64,
}

pub fn frame_file_name(generation: u64) -> String {
    format!("frame_{generation:06}.png")
}

/// Defaults for `setup` on a `width`×`height` image, overlaid with the TOML
/// in `overrides`. Tables merge key by key; unknown keys are errors.
pub fn resolve_config(setup: SetupKind, width: u32, height: u32, overrides: Option<&str>) -> Result<RunConfig, String> {
    let defaults = RunConfig::new(setup, width, height);
    let Some(text) = overrides else {
        return Ok(defaults);
    };
    let user: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut merged = toml::Table::try_from(&defaults).map_err(|e| e.to_string())?;
    merge_tables(&mut merged, user);
    merged.try_into().map_err(|e: toml::de::Error| e.to_string())
}

fn merge_tables(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

pub fn config_to_toml(config: &RunConfig) -> Result<String, String> {
    toml::to_string(config).map_err(|e| e.to_string())
}

/// Runs the whole pipeline described by `args`.
pub fn run(args: &CliArgs) -> Result<RunSummary, CliError> {
    let source = load_image(&args.image_path)?;
    let out = &args.out_dir;

    let mut evo = match &args.resume {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let checkpoint = Checkpoint::from_json(&text)?;
            if args.setup.is_some_and(|s| s != checkpoint.config.setup) {
                return Err(CliError::Usage(format!(
                    "--setup disagrees with the checkpoint, which is a {} run",
                    checkpoint.config.setup
                )));
            }
            let target = quantize(&source, checkpoint.config.palette_size)?;
            fs::create_dir_all(out).map_err(io_err(out))?;
            Evolution::resume(checkpoint, target)?
        }
        None => {
            let setup = args
                .setup
                .ok_or_else(|| CliError::Usage("--setup is required".into()))?;
            let overrides = match &args.config_path {
                Some(path) => Some(fs::read_to_string(path).map_err(io_err(path))?),
                None => None,
            };
            let mut config =
                resolve_config(setup, source.width(), source.height(), overrides.as_deref()).map_err(|reason| {
                    CliError::Config {
                        path: args.config_path.clone().unwrap_or_default(),
                        reason,
                    }
                })?;
            config.setup = setup;
            if let Some(g) = args.generations {
                config.generations = g;
            }
            if let Some(s) = args.seed {
                config.seed = s;
            }
            if let Some(n) = args.snapshot_every {
                config.snapshot_every = n;
            }
            if let Some(k) = args.colors {
                config.palette_size = k;
            }
            config.validate()?;
            let target = quantize(&source, config.palette_size)?;
            fs::create_dir_all(out).map_err(io_err(out))?;
            Evolution::new(config, target)?
        }
    };

    save_png(evo.target(), out.join(TARGET_FILE))?;
    let config_text = config_to_toml(evo.config()).map_err(CliError::Usage)?;
    let config_path = out.join(CONFIG_FILE);
    fs::write(&config_path, config_text).map_err(io_err(&config_path))?;

    while !evo.is_finished() {
        let outcome = evo.step()?;
        let done = evo.state().generation;
        if let Some(snap) = outcome.snapshot {
            save_png(&snap.image, out.join(frame_file_name(snap.generation)))?;
            eprintln!(
                "generation {:>6}: best pair MAE {:.4}",
                snap.generation, outcome.record.best_pair_fitness
            );
        }
        if args.checkpoint_every.is_some_and(|n| done % n == 0) {
            write_atomic(&out.join(CHECKPOINT_FILE), evo.checkpoint().to_json().as_bytes())?;
        }
    }

    let log_path = out.join(LOG_FILE);
    fs::write(&log_path, fitness_log_csv(evo.log())).map_err(io_err(&log_path))?;

    // Frames written before a resume are already on disk, so the animation is
    // always assembled from the files.
    let cfg = evo.config();
    let mut frame_paths = Vec::new();
    let mut frames: Vec<PalettedImage> = Vec::new();
    for g in (0..cfg.generations).filter(|&g| cfg.snapshot_after(g)) {
        let path = out.join(frame_file_name(g));
        frames.push(load_paletted_png(&path)?);
        frame_paths.push(path);
    }
    assemble_gif(&frames, out.join(GIF_FILE), args.frame_delay)?;

    Ok(RunSummary {
        generations: cfg.generations,
        frames: frame_paths,
        best_fitness: evo.best().map_or(f64::NAN, |b| b.fitness.value()),
    })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Runs `args`, reporting failures on stderr.
pub fn main(args: CliArgs) -> ExitCode {
    match run(&args) {
        Ok(summary) => {
            println!(
                "{} generations, {} frames, best pair MAE {:.4}, output in {}",
                summary.generations,
                summary.frames.len(),
                summary.best_fitness,
                args.out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("omnirep: error: {e}");
            ExitCode::FAILURE
        }
    }
}
