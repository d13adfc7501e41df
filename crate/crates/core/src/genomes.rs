//! Representation and interpreter genomes for the three setups, with random
//! initialization, single-point crossover and single-gene mutation.
//!
//! A representation says *where* shapes go. An interpreter says *what* they
//! are: how long a chunk runs, how many sides a polygon has, how wide a circle
//! is, and which palette color each one gets. Neither draws anything alone.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenomeError {
    #[error("setup mismatch: {0} vs {1}")]
    KindMismatch(SetupKind, SetupKind),
    #[error("genome length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("genome of length {0} is too short for crossover")]
    TooShort(usize),
    #[error("invalid limits: {0}")]
    InvalidLimits(String),
    #[error("gene {index} out of range: {detail}")]
    OutOfRange { index: usize, detail: String },
    #[error("expected {expected} genes, found {found}")]
    WrongLength { expected: usize, found: usize },
}

/// The three shape encodings.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetupKind {
    Chunks,
    Polygons,
    Circles,
}

impl SetupKind {
    pub const ALL: [SetupKind; 3] = [SetupKind::Chunks, SetupKind::Polygons, SetupKind::Circles];

    pub fn name(self) -> &'static str {
        match self {
            SetupKind::Chunks => "chunks",
            SetupKind::Polygons => "polygons",
            SetupKind::Circles => "circles",
        }
    }
}

impl fmt::Display for SetupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetupKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chunks" => Ok(SetupKind::Chunks),
            "polygons" => Ok(SetupKind::Polygons),
            "circles" => Ok(SetupKind::Circles),
            _ => Err(format!("unknown setup '{s}', expected chunks, polygons or circles")),
        }
    }
}

/// Genome sizes and gene ranges. All ranges are inclusive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenomeLimits {
    pub n_chunks: usize,
    pub chunk_len_min: u32,
    pub chunk_len_max: u32,
    pub n_polygons: usize,
    pub sides_min: u32,
    pub sides_max: u32,
    pub n_circles: usize,
    pub radius_min: u32,
    pub radius_max: u32,
    pub width: u32,
    pub height: u32,
}

impl GenomeLimits {
    /// Default genome sizes for an image of the given dimensions.
    pub fn for_image(width: u32, height: u32) -> Self {
        GenomeLimits {
            n_chunks: 5000,
            chunk_len_min: 1,
            chunk_len_max: 10,
            n_polygons: 50,
            sides_min: 3,
            sides_max: 12,
            n_circles: 50,
            radius_min: 3,
            radius_max: 50,
            width,
            height,
        }
    }

    /// Size of the polygon vertex pool: enough for every polygon at its
    /// maximum side count.
    pub fn coord_pool(&self) -> usize {
        self.n_polygons * self.sides_max as usize
    }

    pub fn pixel_count(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn representation_len(&self, kind: SetupKind) -> usize {
        match kind {
            SetupKind::Chunks => self.n_chunks,
            SetupKind::Polygons => self.coord_pool(),
            SetupKind::Circles => self.n_circles,
        }
    }

    pub fn interpreter_len(&self, kind: SetupKind) -> usize {
        match kind {
            SetupKind::Chunks => self.n_chunks,
            SetupKind::Polygons => self.n_polygons,
            SetupKind::Circles => self.n_circles,
        }
    }

    pub fn validate(&self) -> Result<(), GenomeError> {
        let bad = |m: &str| Err(GenomeError::InvalidLimits(m.to_string()));
        if self.width == 0 || self.height == 0 {
            return bad("image dimensions must be positive");
        }
        if self.pixel_count() > u32::MAX as u64 {
            return bad("image has too many pixels");
        }
        if self.n_chunks == 0 || self.n_polygons == 0 || self.n_circles == 0 {
            return bad("shape counts must be positive");
        }
        if self.chunk_len_min == 0 || self.chunk_len_min > self.chunk_len_max {
            return bad("chunk lengths need 1 <= min <= max");
        }
        if self.sides_min < 3 || self.sides_min > self.sides_max {
            return bad("polygon sides need 3 <= min <= max");
        }
        if self.radius_min > self.radius_max {
            return bad("radius min exceeds max");
        }
        Ok(())
    }
}

/// A pixel position.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChunkGene {
    pub len: u32,
    pub color: u8,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PolygonGene {
    pub sides: u32,
    pub color: u8,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CircleGene {
    pub color: u8,
    pub radius: u32,
}

/// Positions: chunk start offsets, a polygon vertex pool, or circle centers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "genes", rename_all = "lowercase")]
pub enum RepresentationGenome {
    /// Start offsets into the row-major pixel list.
    Chunks(Vec<u32>),
    /// Vertex pool consumed in order by the interpreter's polygons.
    Polygons(Vec<Point>),
    Circles(Vec<Point>),
}

/// Attributes: (length, color) per chunk, (sides, color) per polygon,
/// (color, radius) per circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "genes", rename_all = "lowercase")]
pub enum InterpreterGenome {
    Chunks(Vec<ChunkGene>),
    Polygons(Vec<PolygonGene>),
    Circles(Vec<CircleGene>),
}

/// Operations shared by both genome families.
pub trait Genome: Clone + Send + Sync {
    fn kind(&self) -> SetupKind;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Uniform random genome of the configured length.
    fn random<R: Rng + ?Sized>(kind: SetupKind, limits: &GenomeLimits, palette_size: usize, rng: &mut R) -> Self;

    /// Replaces the gene at `index` with a fresh uniform draw.
    fn resample_gene<R: Rng + ?Sized>(&mut self, index: usize, limits: &GenomeLimits, palette_size: usize, rng: &mut R);

    /// Exchanges every gene from `cut` onward between `self` and `other`.
    fn swap_tail(&mut self, other: &mut Self, cut: usize) -> Result<(), GenomeError>;

    /// Checks gene count and every gene's range.
    fn validate(&self, limits: &GenomeLimits, palette_size: usize) -> Result<(), GenomeError>;
}

fn random_point<R: Rng + ?Sized>(limits: &GenomeLimits, rng: &mut R) -> Point {
    Point::new(rng.random_range(0..limits.width), rng.random_range(0..limits.height))
}

fn random_color<R: Rng + ?Sized>(palette_size: usize, rng: &mut R) -> u8 {
    rng.random_range(0..palette_size as u32) as u8
}

fn random_chunk_start<R: Rng + ?Sized>(limits: &GenomeLimits, rng: &mut R) -> u32 {
    rng.random_range(0..limits.pixel_count() as u32)
}

fn random_chunk_gene<R: Rng + ?Sized>(limits: &GenomeLimits, palette_size: usize, rng: &mut R) -> ChunkGene {
    let len = rng.random_range(limits.chunk_len_min..=limits.chunk_len_max);
    ChunkGene {
        len,
        color: random_color(palette_size, rng),
    }
}

fn random_polygon_gene<R: Rng + ?Sized>(limits: &GenomeLimits, palette_size: usize, rng: &mut R) -> PolygonGene {
    let sides = rng.random_range(limits.sides_min..=limits.sides_max);
    PolygonGene {
        sides,
        color: random_color(palette_size, rng),
    }
}

fn random_circle_gene<R: Rng + ?Sized>(limits: &GenomeLimits, palette_size: usize, rng: &mut R) -> CircleGene {
    let color = random_color(palette_size, rng);
    CircleGene {
        color,
        radius: rng.random_range(limits.radius_min..=limits.radius_max),
    }
}

fn swap_tails<T>(a: &mut [T], b: &mut [T], cut: usize) -> Result<(), GenomeError> {
    if a.len() != b.len() {
        return Err(GenomeError::LengthMismatch(a.len(), b.len()));
    }
    if cut > a.len() {
        return Err(GenomeError::OutOfRange {
            index: cut,
            detail: format!("cut point beyond genome length {}", a.len()),
        });
    }
    a[cut..].swap_with_slice(&mut b[cut..]);
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<(), GenomeError> {
    if expected != found {
        return Err(GenomeError::WrongLength { expected, found });
    }
    Ok(())
}

fn check<T: fmt::Debug>(index: usize, gene: &T, ok: bool) -> Result<(), GenomeError> {
    if ok {
        Ok(())
    } else {
        Err(GenomeError::OutOfRange {
            index,
            detail: format!("{gene:?}"),
        })
    }
}

fn point_ok(p: &Point, limits: &GenomeLimits) -> bool {
    p.x < limits.width && p.y < limits.height
}

impl Genome for RepresentationGenome {
    fn kind(&self) -> SetupKind {
        match self {
            RepresentationGenome::Chunks(_) => SetupKind::Chunks,
            RepresentationGenome::Polygons(_) => SetupKind::Polygons,
            RepresentationGenome::Circles(_) => SetupKind::Circles,
        }
    }

    fn len(&self) -> usize {
        match self {
            RepresentationGenome::Chunks(g) => g.len(),
            RepresentationGenome::Polygons(g) | RepresentationGenome::Circles(g) => g.len(),
        }
    }

    fn random<R: Rng + ?Sized>(kind: SetupKind, limits: &GenomeLimits, _palette_size: usize, rng: &mut R) -> Self {
        let n = limits.representation_len(kind);
        match kind {
            SetupKind::Chunks => {
                RepresentationGenome::Chunks((0..n).map(|_| random_chunk_start(limits, rng)).collect())
            }
            SetupKind::Polygons => RepresentationGenome::Polygons((0..n).map(|_| random_point(limits, rng)).collect()),
            SetupKind::Circles => RepresentationGenome::Circles((0..n).map(|_| random_point(limits, rng)).collect()),
        }
    }

    fn resample_gene<R: Rng + ?Sized>(
        &mut self,
        index: usize,
        limits: &GenomeLimits,
        _palette_size: usize,
        rng: &mut R,
    ) {
        match self {
            RepresentationGenome::Chunks(g) => g[index] = random_chunk_start(limits, rng),
            RepresentationGenome::Polygons(g) | RepresentationGenome::Circles(g) => {
                g[index] = random_point(limits, rng)
            }
        }
    }

    fn swap_tail(&mut self, other: &mut Self, cut: usize) -> Result<(), GenomeError> {
        use RepresentationGenome::*;
        match (self, other) {
            (Chunks(a), Chunks(b)) => swap_tails(a, b, cut),
            (Polygons(a), Polygons(b)) | (Circles(a), Circles(b)) => swap_tails(a, b, cut),
            (a, b) => Err(GenomeError::KindMismatch(a.kind(), b.kind())),
        }
    }

    fn validate(&self, limits: &GenomeLimits, _palette_size: usize) -> Result<(), GenomeError> {
        check_len(limits.representation_len(self.kind()), self.len())?;
        match self {
            RepresentationGenome::Chunks(g) => g
                .iter()
                .enumerate()
                .try_for_each(|(i, &p)| check(i, &p, (p as u64) < limits.pixel_count())),
            RepresentationGenome::Polygons(g) | RepresentationGenome::Circles(g) => g
                .iter()
                .enumerate()
                .try_for_each(|(i, p)| check(i, p, point_ok(p, limits))),
        }
    }
}

impl Genome for InterpreterGenome {
    fn kind(&self) -> SetupKind {
        match self {
            InterpreterGenome::Chunks(_) => SetupKind::Chunks,
            InterpreterGenome::Polygons(_) => SetupKind::Polygons,
            InterpreterGenome::Circles(_) => SetupKind::Circles,
        }
    }

    fn len(&self) -> usize {
        match self {
            InterpreterGenome::Chunks(g) => g.len(),
            InterpreterGenome::Polygons(g) => g.len(),
            InterpreterGenome::Circles(g) => g.len(),
        }
    }

    fn random<R: Rng + ?Sized>(kind: SetupKind, limits: &GenomeLimits, palette_size: usize, rng: &mut R) -> Self {
        let n = limits.interpreter_len(kind);
        match kind {
            SetupKind::Chunks => {
                InterpreterGenome::Chunks((0..n).map(|_| random_chunk_gene(limits, palette_size, rng)).collect())
            }
            SetupKind::Polygons => {
                InterpreterGenome::Polygons((0..n).map(|_| random_polygon_gene(limits, palette_size, rng)).collect())
            }
            SetupKind::Circles => {
                InterpreterGenome::Circles((0..n).map(|_| random_circle_gene(limits, palette_size, rng)).collect())
            }
        }
    }

    fn resample_gene<R: Rng + ?Sized>(
        &mut self,
        index: usize,
        limits: &GenomeLimits,
        palette_size: usize,
        rng: &mut R,
    ) {
        match self {
            InterpreterGenome::Chunks(g) => g[index] = random_chunk_gene(limits, palette_size, rng),
            InterpreterGenome::Polygons(g) => g[index] = random_polygon_gene(limits, palette_size, rng),
            InterpreterGenome::Circles(g) => g[index] = random_circle_gene(limits, palette_size, rng),
        }
    }

    fn swap_tail(&mut self, other: &mut Self, cut: usize) -> Result<(), GenomeError> {
        use InterpreterGenome::*;
        match (self, other) {
            (Chunks(a), Chunks(b)) => swap_tails(a, b, cut),
            (Polygons(a), Polygons(b)) => swap_tails(a, b, cut),
            (Circles(a), Circles(b)) => swap_tails(a, b, cut),
            (a, b) => Err(GenomeError::KindMismatch(a.kind(), b.kind())),
        }
    }

    fn validate(&self, limits: &GenomeLimits, palette_size: usize) -> Result<(), GenomeError> {
        check_len(limits.interpreter_len(self.kind()), self.len())?;
        let color_ok = |c: u8| (c as usize) < palette_size;
        match self {
            InterpreterGenome::Chunks(g) => g.iter().enumerate().try_for_each(|(i, c)| {
                check(
                    i,
                    c,
                    (limits.chunk_len_min..=limits.chunk_len_max).contains(&c.len) && color_ok(c.color),
                )
            }),
            InterpreterGenome::Polygons(g) => g.iter().enumerate().try_for_each(|(i, p)| {
                check(
                    i,
                    p,
                    (limits.sides_min..=limits.sides_max).contains(&p.sides) && color_ok(p.color),
                )
            }),
            InterpreterGenome::Circles(g) => g.iter().enumerate().try_for_each(|(i, c)| {
                check(
                    i,
                    c,
                    (limits.radius_min..=limits.radius_max).contains(&c.radius) && color_ok(c.color),
                )
            }),
        }
    }
}

pub fn random_representation<R: Rng + ?Sized>(
    kind: SetupKind,
    limits: &GenomeLimits,
    rng: &mut R,
) -> RepresentationGenome {
    RepresentationGenome::random(kind, limits, 1, rng)
}

pub fn random_interpreter<R: Rng + ?Sized>(
    kind: SetupKind,
    limits: &GenomeLimits,
    palette_size: usize,
    rng: &mut R,
) -> InterpreterGenome {
    InterpreterGenome::random(kind, limits, palette_size, rng)
}

/// Single-point crossover at a fixed cut: `a[..cut] ++ b[cut..]` and
/// `b[..cut] ++ a[cut..]`.
pub fn crossover_at<G: Genome>(a: &G, b: &G, cut: usize) -> Result<(G, G), GenomeError> {
    if a.kind() != b.kind() {
        return Err(GenomeError::KindMismatch(a.kind(), b.kind()));
    }
    let (mut c1, mut c2) = (a.clone(), b.clone());
    c1.swap_tail(&mut c2, cut)?;
    Ok((c1, c2))
}

/// Single-point crossover with the cut drawn uniformly from `1..len`.
pub fn crossover<G: Genome, R: Rng + ?Sized>(a: &G, b: &G, rng: &mut R) -> Result<(G, G), GenomeError> {
    if a.kind() != b.kind() {
        return Err(GenomeError::KindMismatch(a.kind(), b.kind()));
    }
    if a.len() != b.len() {
        return Err(GenomeError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(GenomeError::TooShort(a.len()));
    }
    let cut = rng.random_range(1..a.len() as u32) as usize;
    crossover_at(a, b, cut)
}

/// With probability `p_mut`, resamples one uniformly chosen gene.
///
/// Always consumes one draw for the coin flip, plus the gene draws when it
/// lands.
pub fn mutate<G: Genome, R: Rng + ?Sized>(
    genome: &G,
    limits: &GenomeLimits,
    palette_size: usize,
    p_mut: f64,
    rng: &mut R,
) -> G {
    let mut out = genome.clone();
    if rng.random::<f64>() < p_mut && !out.is_empty() {
        let index = rng.random_range(0..out.len() as u32) as usize;
        out.resample_gene(index, limits, palette_size, rng);
    }
    out
}
