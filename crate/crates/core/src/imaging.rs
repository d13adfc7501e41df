//! Image I/O and palette quantization.
//!
//! Inspiration images come in as PNG and are reduced to a small adaptive
//! palette (median cut refined by k-means). Rendered frames go out as indexed
//! PNG and as an animated GIF.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest palette an indexed PNG or GIF can carry.
pub const MAX_PALETTE_SIZE: usize = 256;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("failed to decode {path}: {reason}")]
    Decode { path: String, reason: String },
    #[error("failed to encode image: {0}")]
    Encode(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("image dimensions {width}x{height} do not match {len} pixels")]
    PixelCount { width: u32, height: u32, len: usize },
    #[error("image must have at least one pixel")]
    Empty,
    #[error("palette must have between 1 and {MAX_PALETTE_SIZE} colors, got {0}")]
    PaletteSize(usize),
    #[error("palette contains duplicate color {0}")]
    DuplicateColor(Rgb),
    #[error("palette index {index} out of range for palette of {size} colors")]
    IndexOutOfRange { index: u8, size: usize },
    #[error("no frames to encode")]
    NoFrames,
    #[error("frame {index} is {got:?}, expected {expected:?}")]
    DimensionMismatch {
        index: usize,
        expected: (u32, u32),
        got: (u32, u32),
    },
}

/// An 8-bit RGB color.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const BLACK: Rgb = Rgb::new(0, 0, 0);
    pub const WHITE: Rgb = Rgb::new(255, 255, 255);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    pub fn channels(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    /// Squared euclidean distance in RGB space.
    pub fn distance_sq(self, other: Rgb) -> u32 {
        self.channels()
            .iter()
            .zip(other.channels())
            .map(|(&a, b)| {
                let d = a as i32 - b as i32;
                (d * d) as u32
            })
            .sum()
    }

    /// Sum of absolute per-channel differences.
    pub fn abs_diff_sum(self, other: Rgb) -> u32 {
        self.channels()
            .iter()
            .zip(other.channels())
            .map(|(&a, b)| a.abs_diff(b) as u32)
            .sum()
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

/// A row-major truecolor image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::Empty);
        }
        if pixels.len() as u64 != width as u64 * height as u64 {
            return Err(ImagingError::PixelCount {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(RgbImage { width, height, pixels })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Rgb) -> Result<Self, ImagingError> {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        RgbImage::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        self.pixels[(y * self.width + x) as usize]
    }
}

/// An ordered set of distinct colors. Index 0 is the base color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rgb>", into = "Vec<Rgb>")]
pub struct Palette {
    colors: Vec<Rgb>,
}

impl Palette {
    pub fn new(colors: Vec<Rgb>) -> Result<Self, ImagingError> {
        if colors.is_empty() || colors.len() > MAX_PALETTE_SIZE {
            return Err(ImagingError::PaletteSize(colors.len()));
        }
        for (i, c) in colors.iter().enumerate() {
            if colors[..i].contains(c) {
                return Err(ImagingError::DuplicateColor(*c));
            }
        }
        Ok(Palette { colors })
    }

    pub fn colors(&self) -> &[Rgb] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, index: u8) -> Option<Rgb> {
        self.colors.get(index as usize).copied()
    }

    pub fn base_color(&self) -> Rgb {
        self.colors[0]
    }

    /// Index of the entry nearest to `color`; ties go to the lowest index.
    pub fn nearest(&self, color: Rgb) -> u8 {
        let mut best = 0;
        let mut best_dist = u32::MAX;
        for (i, c) in self.colors.iter().enumerate() {
            let d = c.distance_sq(color);
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        best as u8
    }
}

impl TryFrom<Vec<Rgb>> for Palette {
    type Error = ImagingError;

    fn try_from(colors: Vec<Rgb>) -> Result<Self, Self::Error> {
        Palette::new(colors)
    }
}

impl From<Palette> for Vec<Rgb> {
    fn from(p: Palette) -> Self {
        p.colors
    }
}

/// A row-major grid of palette indices together with its palette.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PalettedImage {
    width: u32,
    height: u32,
    indices: Vec<u8>,
    palette: Palette,
}

impl PalettedImage {
    pub fn new(width: u32, height: u32, indices: Vec<u8>, palette: Palette) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::Empty);
        }
        if indices.len() as u64 != width as u64 * height as u64 {
            return Err(ImagingError::PixelCount {
                width,
                height,
                len: indices.len(),
            });
        }
        if let Some(&index) = indices.iter().find(|&&i| i as usize >= palette.len()) {
            return Err(ImagingError::IndexOutOfRange {
                index,
                size: palette.len(),
            });
        }
        Ok(PalettedImage {
            width,
            height,
            indices,
            palette,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    /// Resolves every index through the palette.
    pub fn to_rgb(&self) -> RgbImage {
        let pixels = self.indices.iter().map(|&i| self.palette.colors[i as usize]).collect();
        RgbImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Decodes a PNG file into 8-bit RGB, dropping any alpha channel.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage, ImagingError> {
    let path = path.as_ref();
    let decode_err = |reason: String| ImagingError::Decode {
        path: path.display().to_string(),
        reason,
    };
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ImagingError::NotFound(path.display().to_string()),
        _ => ImagingError::Io(e),
    })?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(|e| decode_err(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| decode_err("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| decode_err(e.to_string()))?;
    let buf = &buf[..info.buffer_size()];

    let stride = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => return Err(decode_err("palette was not expanded".into())),
    };
    let pixels = buf
        .chunks_exact(stride)
        .map(|px| match stride {
            1 | 2 => Rgb::new(px[0], px[0], px[0]),
            _ => Rgb::new(px[0], px[1], px[2]),
        })
        .collect();
    RgbImage::new(info.width, info.height, pixels)
}

/// Decodes an indexed PNG keeping its palette and indices as stored.
pub fn load_paletted_png(path: impl AsRef<Path>) -> Result<PalettedImage, ImagingError> {
    let path = path.as_ref();
    let decode_err = |reason: String| ImagingError::Decode {
        path: path.display().to_string(),
        reason,
    };
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ImagingError::NotFound(path.display().to_string()),
        _ => ImagingError::Io(e),
    })?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| decode_err(e.to_string()))?;
    let palette_bytes = match (reader.info().color_type, &reader.info().palette) {
        (png::ColorType::Indexed, Some(p)) => p.to_vec(),
        _ => return Err(decode_err("not an indexed PNG".into())),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| decode_err("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| decode_err(e.to_string()))?;
    buf.truncate(info.buffer_size());
    let indices = unpack_indices(&buf, info.width, info.height, info.line_size, info.bit_depth as u8);
    let colors = palette_bytes
        .chunks_exact(3)
        .map(|c| Rgb::new(c[0], c[1], c[2]))
        .collect();
    let palette = Palette::new(colors).map_err(|e| decode_err(e.to_string()))?;
    PalettedImage::new(info.width, info.height, indices, palette)
}

/// Expands 1/2/4-bit packed scanlines to one index per byte.
fn unpack_indices(buf: &[u8], width: u32, height: u32, line_size: usize, depth: u8) -> Vec<u8> {
    if depth == 8 {
        return buf.to_vec();
    }
    let per_byte = 8 / depth as usize;
    let mask = (1u8 << depth) - 1;
    let mut out = Vec::with_capacity(width as usize * height as usize);
    for line in buf.chunks(line_size).take(height as usize) {
        for x in 0..width as usize {
            let shift = 8 - depth as usize * (x % per_byte + 1);
            out.push((line[x / per_byte] >> shift) & mask);
        }
    }
    out
}

/// Anything that can be written out as a PNG.
pub trait PngImage {
    fn write_png(&self, path: &Path) -> Result<(), ImagingError>;
}

impl PngImage for RgbImage {
    fn write_png(&self, path: &Path) -> Result<(), ImagingError> {
        let data: Vec<u8> = self.pixels.iter().flat_map(|p| p.channels()).collect();
        let w = BufWriter::new(File::create(path)?);
        let mut encoder = png::Encoder::new(w, self.width, self.height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(encode_err)?;
        writer.write_image_data(&data).map_err(encode_err)?;
        writer.finish().map_err(encode_err)
    }
}

impl PngImage for PalettedImage {
    fn write_png(&self, path: &Path) -> Result<(), ImagingError> {
        let palette: Vec<u8> = self.palette.colors.iter().flat_map(|c| c.channels()).collect();
        let w = BufWriter::new(File::create(path)?);
        let mut encoder = png::Encoder::new(w, self.width, self.height);
        encoder.set_color(png::ColorType::Indexed);
        encoder.set_depth(png::BitDepth::Eight);
        encoder.set_palette(palette);
        let mut writer = encoder.write_header().map_err(encode_err)?;
        writer.write_image_data(&self.indices).map_err(encode_err)?;
        writer.finish().map_err(encode_err)
    }
}

fn encode_err(e: impl fmt::Display) -> ImagingError {
    ImagingError::Encode(e.to_string())
}

/// Writes `img` as a PNG. Paletted images are stored as indexed PNGs so the
/// palette order survives a round trip through [`load_paletted_png`].
pub fn save_png<I: PngImage + ?Sized>(img: &I, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    img.write_png(path.as_ref())
}

/// Writes `frames` as a looping animated GIF, `frame_delay` in hundredths of
/// a second.
pub fn assemble_gif(frames: &[PalettedImage], path: impl AsRef<Path>, frame_delay: u16) -> Result<(), ImagingError> {
    let first = frames.first().ok_or(ImagingError::NoFrames)?;
    let expected = first.dimensions();
    for (index, f) in frames.iter().enumerate() {
        if f.dimensions() != expected {
            return Err(ImagingError::DimensionMismatch {
                index,
                expected,
                got: f.dimensions(),
            });
        }
    }
    let (width, height) = (
        u16::try_from(expected.0).map_err(encode_err)?,
        u16::try_from(expected.1).map_err(encode_err)?,
    );

    let flat = |p: &Palette| -> Vec<u8> { p.colors.iter().flat_map(|c| c.channels()).collect() };
    let global = flat(&first.palette);
    let w = BufWriter::new(File::create(path.as_ref())?);
    let mut encoder = gif::Encoder::new(w, width, height, &global).map_err(encode_err)?;
    encoder.set_repeat(gif::Repeat::Infinite).map_err(encode_err)?;
    for f in frames {
        let mut frame = gif::Frame::from_indexed_pixels(width, height, f.indices.clone(), None);
        if f.palette != first.palette {
            frame.palette = Some(flat(&f.palette));
        }
        frame.delay = frame_delay;
        encoder.write_frame(&frame).map_err(encode_err)?;
    }
    Ok(())
}

/// Reduces `img` to at most `k` colors.
///
/// The palette is seeded by variance-driven median cut: the color population
/// (with multiplicity) starts as one box, and the box with the largest squared
/// error is cut in two, along whichever of the r, g, b or principal axes gives
/// the smallest combined error, until there are `k` boxes or every box holds a
/// single color. The box means are then refined by k-means (Lloyd) passes,
/// alternating with attempts to re-cut the union of each cluster and its
/// nearest neighbors, until neither lowers the error. Images with at most `k`
/// colors are reproduced exactly.
///
/// Entries are the refined means, rounded. Pixels map to the nearest entry
/// (lowest index on ties), unused entries are dropped, and the palette is
/// ordered by descending pixel frequency so the most common color becomes
/// the base color at index 0. The result depends only on the input.
pub fn quantize(img: &RgbImage, k: usize) -> Result<PalettedImage, ImagingError> {
    if k == 0 || k > MAX_PALETTE_SIZE {
        return Err(ImagingError::PaletteSize(k));
    }

    let mut histogram: HashMap<Rgb, u64> = HashMap::new();
    for &p in &img.pixels {
        *histogram.entry(p).or_default() += 1;
    }
    let mut colors: Colors = histogram.into_iter().collect();
    colors.sort_unstable();

    let mut boxes = vec![Cluster::of(&colors)];
    let mut members = vec![colors.clone()];
    while boxes.len() < k {
        let Some(i) = (0..boxes.len())
            .filter(|&i| members[i].len() > 1)
            .max_by(|&a, &b| boxes[a].sse().total_cmp(&boxes[b].sse()).then(b.cmp(&a)))
        else {
            break;
        };
        let (lo, hi) = best_cut(&members[i]);
        boxes[i] = Cluster::of(&lo);
        members[i] = lo;
        boxes.push(Cluster::of(&hi));
        members.push(hi);
    }
    let centers = refine(&colors, boxes.iter().map(Cluster::mean).collect());

    let mut entries: Vec<Rgb> = Vec::with_capacity(centers.len());
    for c in centers {
        let [r, g, b] = c.map(|v| v.round().clamp(0.0, 255.0) as u8);
        let rgb = Rgb::new(r, g, b);
        if !entries.contains(&rgb) {
            entries.push(rgb);
        }
    }

    // Drop unused entries, then order by frequency. Remapping after a reorder
    // can only move exact ties, so a couple of passes settles the order.
    let mut palette = Palette::new(entries)?;
    for _ in 0..4 {
        let counts = frequencies(&img.pixels, &palette);
        let mut order: Vec<usize> = (0..palette.len()).filter(|&i| counts[i] > 0).collect();
        order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
        let stable = order.len() == palette.len() && order.iter().enumerate().all(|(i, &j)| i == j);
        palette = Palette::new(order.iter().map(|&i| palette.colors[i]).collect())?;
        if stable {
            break;
        }
    }

    let indices = img.pixels.iter().map(|&p| palette.nearest(p)).collect();
    PalettedImage::new(img.width, img.height, indices, palette)
}

fn frequencies(pixels: &[Rgb], palette: &Palette) -> Vec<u64> {
    let mut cache: HashMap<Rgb, u8> = HashMap::new();
    let mut counts = vec![0u64; palette.len()];
    for &p in pixels {
        let i = *cache.entry(p).or_insert_with(|| palette.nearest(p));
        counts[i as usize] += 1;
    }
    counts
}

/// Distinct colors with their pixel counts.
type Colors = Vec<(Rgb, u64)>;

fn as_f64(c: Rgb) -> [f64; 3] {
    c.channels().map(f64::from)
}

fn dist_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

/// Weighted moments of a set of colors.
#[derive(Clone, Copy, Debug, Default)]
struct Cluster {
    n: f64,
    sum: [f64; 3],
    sum_sq: f64,
}

impl Cluster {
    fn of(colors: &[(Rgb, u64)]) -> Self {
        let mut c = Cluster::default();
        for &(rgb, n) in colors {
            c.add(rgb, n);
        }
        c
    }

    fn add(&mut self, rgb: Rgb, n: u64) {
        let (v, w) = (as_f64(rgb), n as f64);
        self.n += w;
        for (s, x) in self.sum.iter_mut().zip(v) {
            *s += x * w;
        }
        self.sum_sq += (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * w;
    }

    fn mean(&self) -> [f64; 3] {
        self.sum.map(|s| s / self.n)
    }

    /// Squared error about the mean.
    fn sse(&self) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        let norm = self.sum.iter().map(|s| s * s).sum::<f64>() / self.n;
        (self.sum_sq - norm).max(0.0)
    }
}

/// Dominant eigenvector of the color covariance, by power iteration.
fn principal_axis(colors: &[(Rgb, u64)]) -> [f64; 3] {
    let m = Cluster::of(colors).mean();
    let mut cov = [[0.0; 3]; 3];
    for &(rgb, n) in colors {
        let v = as_f64(rgb);
        let d = [v[0] - m[0], v[1] - m[1], v[2] - m[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j] * n as f64;
            }
        }
    }
    let mut axis = [0.6, 0.7, 0.4];
    for _ in 0..64 {
        let next: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| cov[i][j] * axis[j]).sum());
        let len = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            break;
        }
        axis = next.map(|x| x / len);
    }
    axis
}

/// Splits `colors` (at least two distinct) into two non-empty parts, sorted
/// along one axis, minimizing the summed squared error of the parts.
fn best_cut(colors: &[(Rgb, u64)]) -> (Colors, Colors) {
    let axis = principal_axis(colors);
    let keys: [&dyn Fn(Rgb) -> f64; 4] = [
        &|c: Rgb| c.r as f64,
        &|c: Rgb| c.g as f64,
        &|c: Rgb| c.b as f64,
        &|c: Rgb| (0..3).map(|i| as_f64(c)[i] * axis[i]).sum(),
    ];
    let total = Cluster::of(colors);
    let mut best: Option<(f64, Colors, usize)> = None;
    for key in keys {
        let mut sorted = colors.to_vec();
        sorted.sort_by(|a, b| key(a.0).total_cmp(&key(b.0)).then(a.0.cmp(&b.0)));
        let mut left = Cluster::default();
        for cut in 1..sorted.len() {
            left.add(sorted[cut - 1].0, sorted[cut - 1].1);
            if key(sorted[cut].0) == key(sorted[cut - 1].0) {
                continue;
            }
            let right = Cluster {
                n: total.n - left.n,
                sum: std::array::from_fn(|i| total.sum[i] - left.sum[i]),
                sum_sq: total.sum_sq - left.sum_sq,
            };
            let err = left.sse() + right.sse();
            if best.as_ref().is_none_or(|b| err < b.0) {
                best = Some((err, sorted.clone(), cut));
            }
        }
    }
    // Distinct colors always differ on some channel, so a cut exists.
    let (_, mut sorted, cut) = best.expect("at least two distinct colors");
    let hi = sorted.split_off(cut);
    (sorted, hi)
}

/// Index of the nearest center, lowest index on ties.
fn nearest_center(c: [f64; 3], centers: &[[f64; 3]]) -> usize {
    let mut best = 0;
    for (i, &m) in centers.iter().enumerate().skip(1) {
        if dist_sq(c, m) < dist_sq(c, centers[best]) {
            best = i;
        }
    }
    best
}

/// Lloyd iterations to convergence. Empty clusters are dropped.
fn lloyd(colors: &[(Rgb, u64)], mut centers: Vec<[f64; 3]>) -> (Vec<[f64; 3]>, Vec<usize>) {
    let mut assignment: Vec<usize> = Vec::new();
    for _ in 0..256 {
        let next: Vec<usize> = colors
            .iter()
            .map(|&(c, _)| nearest_center(as_f64(c), &centers))
            .collect();
        if next == assignment {
            break;
        }
        let mut clusters = vec![Cluster::default(); centers.len()];
        for (&(c, n), &j) in colors.iter().zip(&next) {
            clusters[j].add(c, n);
        }
        let used: Vec<usize> = (0..centers.len()).filter(|&j| clusters[j].n > 0.0).collect();
        let mut renumber = vec![0; centers.len()];
        for (new, &old) in used.iter().enumerate() {
            renumber[old] = new;
        }
        centers = used.iter().map(|&j| clusters[j].mean()).collect();
        assignment = next.iter().map(|&j| renumber[j]).collect();
    }
    (centers, assignment)
}

/// How many nearby clusters each cluster tries to re-cut jointly with.
const RECUT_NEIGHBORS: usize = 4;

fn refine(colors: &[(Rgb, u64)], seeds: Vec<[f64; 3]>) -> Vec<[f64; 3]> {
    let (mut centers, mut assignment) = lloyd(colors, seeds);
    for _ in 0..4 * MAX_PALETTE_SIZE {
        let mut groups: Vec<Colors> = vec![Vec::new(); centers.len()];
        for (&c, &j) in colors.iter().zip(&assignment) {
            groups[j].push(c);
        }
        let Some((i, j, lo, hi)) = find_recut(&centers, &groups) else {
            break;
        };
        centers[i] = Cluster::of(&lo).mean();
        centers[j] = Cluster::of(&hi).mean();
        (centers, assignment) = lloyd(colors, centers);
    }
    centers
}

/// First pair of neighboring clusters whose union can be cut into two parts
/// with less total error than the pair has now.
fn find_recut(centers: &[[f64; 3]], groups: &[Colors]) -> Option<(usize, usize, Colors, Colors)> {
    for i in 0..centers.len() {
        let mut others: Vec<usize> = (0..centers.len()).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| {
            dist_sq(centers[i], centers[a])
                .total_cmp(&dist_sq(centers[i], centers[b]))
                .then(a.cmp(&b))
        });
        for &j in others.iter().take(RECUT_NEIGHBORS) {
            let union: Colors = groups[i].iter().chain(&groups[j]).copied().collect();
            if union.len() < 2 {
                continue;
            }
            let before = Cluster::of(&groups[i]).sse() + Cluster::of(&groups[j]).sse();
            let (lo, hi) = best_cut(&union);
            let after = Cluster::of(&lo).sse() + Cluster::of(&hi).sse();
            if after < before * (1.0 - 1e-12) - 1e-9 {
                return Some((i, j, lo, hi));
            }
        }
    }
    None
}
