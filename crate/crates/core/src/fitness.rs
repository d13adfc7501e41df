//! Mean absolute error between a rendered image and the target.
//!
//! Lower is better. Sums are accumulated as integers and divided once, so the
//! result does not depend on summation order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imaging::PalettedImage;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitnessError {
    #[error("image dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((u32, u32), (u32, u32)),
    #[error("canvas has {got} pixels, target has {expected}")]
    PixelCount { expected: usize, got: usize },
    #[error("palette index {0} has no color in the target palette")]
    UnknownIndex(u8),
}

/// Which pixel values the error is measured over.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaeMode {
    /// Per-channel 8-bit RGB, after resolving indices through each palette.
    #[default]
    Rgb,
    /// Raw palette indices.
    PaletteIndex,
}

impl fmt::Display for MaeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaeMode::Rgb => "rgb",
            MaeMode::PaletteIndex => "palette_index",
        })
    }
}

impl FromStr for MaeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rgb" => Ok(MaeMode::Rgb),
            "palette_index" => Ok(MaeMode::PaletteIndex),
            _ => Err(format!("unknown MAE mode '{s}', expected rgb or palette_index")),
        }
    }
}

/// A mean absolute error; smaller is fitter.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fitness(pub f64);

impl Fitness {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl Eq for Fitness {}

impl PartialOrd for Fitness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fitness {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// RGB mean absolute error over all pixels and channels.
pub fn mae(rendered: &PalettedImage, target: &PalettedImage) -> Result<Fitness, FitnessError> {
    mae_with(rendered, target, MaeMode::Rgb)
}

pub fn mae_with(rendered: &PalettedImage, target: &PalettedImage, mode: MaeMode) -> Result<Fitness, FitnessError> {
    if rendered.dimensions() != target.dimensions() {
        return Err(FitnessError::DimensionMismatch(
            rendered.dimensions(),
            target.dimensions(),
        ));
    }
    let pairs = rendered.indices().iter().zip(target.indices());
    let (total, per_pixel): (u64, u64) = match mode {
        MaeMode::Rgb => {
            let (pa, pb) = (rendered.palette().colors(), target.palette().colors());
            (
                pairs
                    .map(|(&a, &b)| pa[a as usize].abs_diff_sum(pb[b as usize]) as u64)
                    .sum(),
                3,
            )
        }
        MaeMode::PaletteIndex => (pairs.map(|(&a, &b)| a.abs_diff(b) as u64).sum(), 1),
    };
    let n = rendered.indices().len() as u64 * per_pixel;
    Ok(Fitness(total as f64 / n as f64))
}

/// Scores bare index buffers drawn with the target's palette.
///
/// Holds, for every target pixel, the error each palette index would incur
/// there, so scoring a canvas is one table lookup per pixel.
#[derive(Clone, Debug)]
pub struct Scorer {
    palette_size: usize,
    cost: Vec<u16>,
    denominator: f64,
}

impl Scorer {
    pub fn new(target: &PalettedImage, mode: MaeMode) -> Self {
        let palette = target.palette().colors();
        let k = palette.len();
        let mut cost = Vec::with_capacity(target.indices().len() * k);
        for &t in target.indices() {
            for i in 0..k {
                cost.push(match mode {
                    MaeMode::Rgb => palette[i].abs_diff_sum(palette[t as usize]) as u16,
                    MaeMode::PaletteIndex => (i as u8).abs_diff(t) as u16,
                });
            }
        }
        let per_pixel = if mode == MaeMode::Rgb { 3 } else { 1 };
        Scorer {
            palette_size: k,
            cost,
            denominator: (target.indices().len() * per_pixel) as f64,
        }
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    /// Integer error total for `indices`; divide by the pixel-channel count
    /// to get the mean.
    pub fn total_error(&self, indices: &[u8]) -> Result<u64, FitnessError> {
        let k = self.palette_size;
        if indices.len() * k != self.cost.len() {
            return Err(FitnessError::PixelCount {
                expected: self.cost.len() / k,
                got: indices.len(),
            });
        }
        let mut total = 0u64;
        for (&i, row) in indices.iter().zip(self.cost.chunks_exact(k)) {
            total += *row.get(i as usize).ok_or(FitnessError::UnknownIndex(i))? as u64;
        }
        Ok(total)
    }

    /// Number of pixel-channel terms a total is divided by.
    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    pub fn score(&self, indices: &[u8]) -> Result<Fitness, FitnessError> {
        Ok(Fitness(self.total_error(indices)? as f64 / self.denominator))
    }
}
