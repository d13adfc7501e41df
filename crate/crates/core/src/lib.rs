//! Evolutionary art by cooperative coevolution.
//!
//! A picture is produced by two genomes working together. A
//! [`RepresentationGenome`](genomes::RepresentationGenome) places shapes and an
//! [`InterpreterGenome`](genomes::InterpreterGenome) gives them sizes and
//! colors. Each kind evolves in its own population, and individuals are scored
//! by how closely the pictures they make with the other population's best
//! members match a quantized target image.
//!
//! ```
//! use omnirep::engine::{run, RunConfig};
//! use omnirep::genomes::SetupKind;
//! use omnirep::imaging::{quantize, Rgb, RgbImage};
//!
//! let source = RgbImage::from_fn(8, 8, |x, _| if x < 4 { Rgb::BLACK } else { Rgb::WHITE })?;
//! let mut config = RunConfig::new(SetupKind::Chunks, 8, 8);
//! config.generations = 5;
//! let result = run(config, quantize(&source, 2)?)?;
//! assert_eq!(result.log.len(), 5);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! Modules, in pipeline order: [`imaging`] loads and quantizes images and
//! writes frames, [`genomes`] defines the genomes and their variation
//! operators, [`rendering`] rasterizes a pair, [`fitness`] scores it,
//! [`engine`] runs the evolution and [`cli`] wires it to the command line.

pub mod cli;
pub mod engine;
pub mod fitness;
pub mod genomes;
pub mod imaging;
pub mod rendering;
