//! Brute-force reference implementations and random instance generators
//! shared by the property tests and the acceptance suite.
#![allow(dead_code)]

use omnirep::genomes::{
    ChunkGene, CircleGene, Genome, GenomeLimits, InterpreterGenome, Point, PolygonGene, RepresentationGenome, SetupKind,
};
use omnirep::imaging::{PalettedImage, Rgb, RgbImage};
use rand::Rng;

/// Paints chunk pixels one at a time in genome order.
pub fn oracle_chunks(starts: &[u32], genes: &[ChunkGene], w: u32, h: u32) -> Vec<u8> {
    let n = (w * h) as u64;
    let mut out = vec![0u8; n as usize];
    for (&p, g) in starts.iter().zip(genes) {
        for k in 0..g.len as u64 {
            let i = p as u64 + k;
            if i < n {
                out[i as usize] = g.color;
            }
        }
    }
    out
}

/// True when the pixel center of `(x, y)` is inside `poly` under the
/// even-odd rule: count polygon edges crossing the rightward ray from the
/// center. Works in doubled coordinates so centers are integers.
pub fn center_inside(poly: &[Point], x: u32, y: u32) -> bool {
    let (px, py) = (2 * x as i64 + 1, 2 * y as i64 + 1);
    let mut inside = false;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (x1, y1, x2, y2) = (2 * a.x as i64, 2 * a.y as i64, 2 * b.x as i64, 2 * b.y as i64);
        let spans = (y1 <= py && py < y2) || (y2 <= py && py < y1);
        if !spans {
            continue;
        }
        // Crossing x is x1 + (py - y1) * (x2 - x1) / (y2 - y1); count it when
        // strictly right of px.
        let dy = y2 - y1;
        let lhs = (py - y1) * (x2 - x1);
        let rhs = (px - x1) * dy;
        let right = if dy > 0 { lhs > rhs } else { lhs < rhs };
        if right {
            inside = !inside;
        }
    }
    inside
}

pub fn oracle_polygons(pool: &[Point], genes: &[PolygonGene], w: u32, h: u32) -> Vec<u8> {
    let mut out = vec![0u8; (w * h) as usize];
    let mut cursor = 0usize;
    for g in genes {
        let poly = &pool[cursor..cursor + g.sides as usize];
        cursor += g.sides as usize;
        for y in 0..h {
            for x in 0..w {
                if center_inside(poly, x, y) {
                    out[(y * w + x) as usize] = g.color;
                }
            }
        }
    }
    out
}

pub fn oracle_circles(centers: &[Point], genes: &[CircleGene], w: u32, h: u32) -> Vec<u8> {
    let mut out = vec![0u8; (w * h) as usize];
    for (c, g) in centers.iter().zip(genes) {
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as i64 - c.x as i64, y as i64 - c.y as i64);
                if dx * dx + dy * dy <= g.radius as i64 * g.radius as i64 {
                    out[(y * w + x) as usize] = g.color;
                }
            }
        }
    }
    out
}

pub fn oracle_render(rep: &RepresentationGenome, interp: &InterpreterGenome, w: u32, h: u32) -> Vec<u8> {
    match (rep, interp) {
        (RepresentationGenome::Chunks(r), InterpreterGenome::Chunks(i)) => oracle_chunks(r, i, w, h),
        (RepresentationGenome::Polygons(r), InterpreterGenome::Polygons(i)) => oracle_polygons(r, i, w, h),
        (RepresentationGenome::Circles(r), InterpreterGenome::Circles(i)) => oracle_circles(r, i, w, h),
        _ => panic!("kind mismatch"),
    }
}

/// A random rendering problem: image at most 32x32, genomes at most 20 genes.
#[derive(Clone, Debug)]
pub struct Instance {
    pub width: u32,
    pub height: u32,
    pub palette_size: usize,
    pub limits: GenomeLimits,
    pub rep: RepresentationGenome,
    pub interp: InterpreterGenome,
}

pub fn random_limits<R: Rng>(width: u32, height: u32, rng: &mut R) -> GenomeLimits {
    let mut limits = GenomeLimits::for_image(width, height);
    limits.n_chunks = rng.random_range(1..=20);
    limits.chunk_len_min = rng.random_range(1..=4);
    limits.chunk_len_max = rng.random_range(limits.chunk_len_min..=width * height + 4);
    limits.sides_max = rng.random_range(3..=12);
    limits.sides_min = rng.random_range(3..=limits.sides_max);
    limits.n_polygons = rng.random_range(1..=(20 / limits.sides_max as usize).max(1));
    limits.n_circles = rng.random_range(1..=20);
    limits.radius_min = rng.random_range(0..=3);
    limits.radius_max = rng.random_range(limits.radius_min..=40);
    limits
}

pub fn random_instance<R: Rng>(kind: SetupKind, rng: &mut R) -> Instance {
    let (width, height) = (rng.random_range(1..=32), rng.random_range(1..=32));
    let palette_size = rng.random_range(1..=8);
    let limits = random_limits(width, height, rng);
    let rep = RepresentationGenome::random(kind, &limits, palette_size, rng);
    let interp = InterpreterGenome::random(kind, &limits, palette_size, rng);
    Instance {
        width,
        height,
        palette_size,
        limits,
        rep,
        interp,
    }
}

pub fn random_palette<R: Rng>(k: usize, rng: &mut R) -> omnirep::imaging::Palette {
    let mut colors: Vec<Rgb> = Vec::new();
    while colors.len() < k {
        let c = Rgb::new(rng.random(), rng.random(), rng.random());
        if !colors.contains(&c) {
            colors.push(c);
        }
    }
    omnirep::imaging::Palette::new(colors).unwrap()
}

/// A random image over a random palette of at most 6 colors.
pub fn random_paletted<R: Rng>(w: u32, h: u32, rng: &mut R) -> PalettedImage {
    let palette = random_palette(rng.random_range(1..=6), rng);
    let k = palette.len() as u8;
    let indices = (0..w * h).map(|_| rng.random_range(0..k)).collect();
    PalettedImage::new(w, h, indices, palette).unwrap()
}

/// Per-pixel RGB mean absolute error, accumulated in floating point.
pub fn naive_mae(a: &PalettedImage, b: &PalettedImage) -> f64 {
    let (ra, rb) = (a.to_rgb(), b.to_rgb());
    let mut sum = 0.0f64;
    for (p, q) in ra.pixels().iter().zip(rb.pixels()) {
        for (u, v) in p.channels().into_iter().zip(q.channels()) {
            sum += (u as f64 - v as f64).abs();
        }
    }
    sum / (ra.pixels().len() * 3) as f64
}

/// Squared RGB error of reconstructing `img` with `palette`, mapping each
/// pixel to its nearest entry.
pub fn reconstruction_error(img: &RgbImage, palette: &[Rgb]) -> u64 {
    img.pixels()
        .iter()
        .map(|&p| palette.iter().map(|&c| p.distance_sq(c) as u64).min().unwrap())
        .sum()
}

/// Squared error of `quantized` against the source it was made from.
pub fn quantized_error(src: &RgbImage, quantized: &PalettedImage) -> u64 {
    let rgb = quantized.to_rgb();
    src.pixels()
        .iter()
        .zip(rgb.pixels())
        .map(|(&a, &b)| a.distance_sq(b) as u64)
        .sum()
}

/// Smallest reconstruction error over every `k`-subset of `colors`.
pub fn best_subset_error(img: &RgbImage, colors: &[Rgb], k: usize) -> u64 {
    fn go(img: &RgbImage, colors: &[Rgb], k: usize, start: usize, chosen: &mut Vec<Rgb>, best: &mut u64) {
        if chosen.len() == k {
            *best = (*best).min(reconstruction_error(img, chosen));
            return;
        }
        for i in start..colors.len() {
            chosen.push(colors[i]);
            go(img, colors, k, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = u64::MAX;
    go(img, colors, k.min(colors.len()), 0, &mut Vec::new(), &mut best);
    best
}

/// `n` distinct random colors.
pub fn distinct_colors<R: Rng>(n: usize, rng: &mut R) -> Vec<Rgb> {
    random_palette(n, rng).colors().to_vec()
}
