//! Rasterizes a (representation, interpreter) pair into palette indices.
//!
//! Every shape is opaque and painted in genome order, so on overlap the later
//! shape wins. Pixels no shape touches keep the base color, index 0. All
//! geometry is done in integer arithmetic.

use thiserror::Error;

use crate::genomes::{Genome, InterpreterGenome, Point, RepresentationGenome, SetupKind};
use crate::imaging::{ImagingError, Palette, PalettedImage};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("representation is {0} but interpreter is {1}")]
    KindMismatch(SetupKind, SetupKind),
    #[error("representation has {0} genes but interpreter has {1}")]
    LengthMismatch(usize, usize),
    #[error("polygons need {needed} vertices but the pool holds {available}")]
    PoolExhausted { needed: usize, available: usize },
    #[error("color {color} outside palette of {palette_size}")]
    ColorOutOfRange { color: u8, palette_size: usize },
    #[error("empty canvas")]
    EmptyCanvas,
}

/// A row-major grid of palette indices, base color 0 where nothing is painted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Canvas {
    width: u32,
    height: u32,
    indices: Vec<u8>,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Self {
        Canvas {
            width,
            height,
            indices: vec![0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn into_indices(self) -> Vec<u8> {
        self.indices
    }

    /// Attaches a palette, producing an image.
    pub fn into_image(self, palette: Palette) -> Result<PalettedImage, ImagingError> {
        PalettedImage::new(self.width, self.height, self.indices, palette)
    }

    fn clear(&mut self) {
        self.indices.fill(0);
    }

    /// Paints columns `x0..x1` of row `y`.
    fn span(&mut self, y: u32, x0: u32, x1: u32, color: u8) {
        let row = y as usize * self.width as usize;
        self.indices[row + x0 as usize..row + x1 as usize].fill(color);
    }
}

fn check_color(color: u8, palette_size: usize) -> Result<(), RenderError> {
    if color as usize >= palette_size {
        return Err(RenderError::ColorOutOfRange { color, palette_size });
    }
    Ok(())
}

/// Renders any pair, dispatching on the setup.
pub fn render(
    rep: &RepresentationGenome,
    interp: &InterpreterGenome,
    width: u32,
    height: u32,
    palette_size: usize,
) -> Result<Canvas, RenderError> {
    let mut canvas = Canvas::new(width, height);
    render_into(&mut canvas, rep, interp, palette_size)?;
    Ok(canvas)
}

/// Like [`render`], reusing an existing canvas buffer.
pub fn render_into(
    canvas: &mut Canvas,
    rep: &RepresentationGenome,
    interp: &InterpreterGenome,
    palette_size: usize,
) -> Result<(), RenderError> {
    if canvas.indices.is_empty() {
        return Err(RenderError::EmptyCanvas);
    }
    canvas.clear();
    match (rep, interp) {
        (RepresentationGenome::Chunks(starts), InterpreterGenome::Chunks(genes)) => {
            if starts.len() != genes.len() {
                return Err(RenderError::LengthMismatch(starts.len(), genes.len()));
            }
            let n = canvas.indices.len();
            for (&start, g) in starts.iter().zip(genes) {
                check_color(g.color, palette_size)?;
                let start = (start as usize).min(n);
                let end = start.saturating_add(g.len as usize).min(n);
                canvas.indices[start..end].fill(g.color);
            }
        }
        (RepresentationGenome::Polygons(pool), InterpreterGenome::Polygons(genes)) => {
            let needed: usize = genes.iter().map(|g| g.sides as usize).sum();
            if needed > pool.len() {
                return Err(RenderError::PoolExhausted {
                    needed,
                    available: pool.len(),
                });
            }
            let mut cursor = 0;
            let mut scratch = Vec::new();
            for g in genes {
                check_color(g.color, palette_size)?;
                let vertices = &pool[cursor..cursor + g.sides as usize];
                cursor += g.sides as usize;
                fill_polygon(canvas, vertices, g.color, &mut scratch);
            }
        }
        (RepresentationGenome::Circles(centers), InterpreterGenome::Circles(genes)) => {
            if centers.len() != genes.len() {
                return Err(RenderError::LengthMismatch(centers.len(), genes.len()));
            }
            for (&c, g) in centers.iter().zip(genes) {
                check_color(g.color, palette_size)?;
                fill_disk(canvas, c, g.radius, g.color);
            }
        }
        (r, i) => return Err(RenderError::KindMismatch(r.kind(), i.kind())),
    }
    Ok(())
}

/// Chunks: chunk `j` paints row-major pixels `p_j .. p_j + b_j`, clamped at the
/// last pixel.
pub fn render_chunks(
    rep: &RepresentationGenome,
    interp: &InterpreterGenome,
    width: u32,
    height: u32,
    palette_size: usize,
) -> Result<Canvas, RenderError> {
    expect_kind(rep, interp, SetupKind::Chunks)?;
    render(rep, interp, width, height, palette_size)
}

/// Polygons: polygon `j` takes the next `s_j` vertices from the pool; whatever
/// is left at the end is unused.
pub fn render_polygons(
    rep: &RepresentationGenome,
    interp: &InterpreterGenome,
    width: u32,
    height: u32,
    palette_size: usize,
) -> Result<Canvas, RenderError> {
    expect_kind(rep, interp, SetupKind::Polygons)?;
    render(rep, interp, width, height, palette_size)
}

/// Circles: closed disks `dx² + dy² <= r²`, clipped to the canvas.
pub fn render_circles(
    rep: &RepresentationGenome,
    interp: &InterpreterGenome,
    width: u32,
    height: u32,
    palette_size: usize,
) -> Result<Canvas, RenderError> {
    expect_kind(rep, interp, SetupKind::Circles)?;
    render(rep, interp, width, height, palette_size)
}

fn expect_kind(rep: &RepresentationGenome, interp: &InterpreterGenome, kind: SetupKind) -> Result<(), RenderError> {
    if rep.kind() != kind {
        return Err(RenderError::KindMismatch(rep.kind(), kind));
    }
    if interp.kind() != kind {
        return Err(RenderError::KindMismatch(kind, interp.kind()));
    }
    Ok(())
}

/// Even-odd fill sampled at pixel centers.
///
/// Coordinates are doubled so that the center of pixel `(x, y)` sits at the
/// odd integers `(2x+1, 2y+1)`. An edge is active on a scanline when the
/// center row lies in `[min(y1, y2), max(y1, y2))`. For each active edge we
/// compute how many leading pixels of the row have their center strictly left
/// of the crossing; a pixel is inside when an odd number of crossings lie to
/// its right.
fn fill_polygon(canvas: &mut Canvas, vertices: &[Point], color: u8, thresholds: &mut Vec<i64>) {
    let Some((min_y, max_y)) = vertices.iter().fold(None, |acc: Option<(u32, u32)>, p| {
        Some(acc.map_or((p.y, p.y), |(lo, hi)| (lo.min(p.y), hi.max(p.y))))
    }) else {
        return;
    };
    let width = canvas.width as i64;
    let max_row = max_y.min(canvas.height.saturating_sub(1));

    for y in min_y..=max_row {
        let yc = 2 * y as i64 + 1;
        thresholds.clear();
        for (i, a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            let (ay, by) = (2 * a.y as i64, 2 * b.y as i64);
            if yc < ay.min(by) || yc >= ay.max(by) {
                continue;
            }
            let (mut dy, dx) = (b.y as i64 - a.y as i64, b.x as i64 - a.x as i64);
            // Doubled crossing abscissa is num / dy.
            let mut num = 2 * a.x as i64 * dy + (yc - ay) * dx;
            if dy < 0 {
                dy = -dy;
                num = -num;
            }
            // Pixel x is left of the crossing iff (2x + 1) * dy < num.
            let m = num - dy;
            let t = if m <= 0 { 0 } else { (m + 2 * dy - 1) / (2 * dy) };
            thresholds.push(t.min(width));
        }
        if thresholds.is_empty() {
            continue;
        }
        thresholds.sort_unstable();
        let n = thresholds.len();
        let mut start = 0;
        for (j, &t) in thresholds.iter().enumerate() {
            // Pixels in [start, t) have n - j crossings to their right.
            if (n - j) % 2 == 1 && t > start {
                canvas.span(y, start as u32, t as u32, color);
            }
            start = start.max(t);
        }
    }
}

fn fill_disk(canvas: &mut Canvas, center: Point, radius: u32, color: u8) {
    let (cx, cy, r) = (center.x as i64, center.y as i64, radius as i64);
    let y0 = (cy - r).max(0);
    let y1 = (cy + r).min(canvas.height as i64 - 1);
    for y in y0..=y1 {
        let dy = y - cy;
        let half = ((r * r - dy * dy) as u64).isqrt() as i64;
        let x0 = (cx - half).max(0);
        let x1 = (cx + half).min(canvas.width as i64 - 1);
        if x0 <= x1 {
            canvas.span(y as u32, x0 as u32, x1 as u32 + 1, color);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genomes::{ChunkGene, CircleGene, PolygonGene};

    fn chunks(starts: &[u32], genes: &[(u32, u8)]) -> (RepresentationGenome, InterpreterGenome) {
        (
            RepresentationGenome::Chunks(starts.to_vec()),
            InterpreterGenome::Chunks(genes.iter().map(|&(len, color)| ChunkGene { len, color }).collect()),
        )
    }

    #[test]
    fn disjoint_chunks() {
        let (r, i) = chunks(&[0, 2], &[(2, 1), (2, 2)]);
        assert_eq!(render_chunks(&r, &i, 4, 1, 4).unwrap().indices(), &[1, 1, 2, 2]);
    }

    #[test]
    fn overlapping_chunks_leave_base() {
        let (r, i) = chunks(&[0, 1], &[(3, 1), (2, 2)]);
        assert_eq!(render_chunks(&r, &i, 4, 1, 4).unwrap().indices(), &[1, 2, 2, 0]);
    }

    #[test]
    fn chunk_clamped_at_end() {
        let (r, i) = chunks(&[3], &[(10, 1)]);
        assert_eq!(render_chunks(&r, &i, 4, 1, 4).unwrap().indices(), &[0, 0, 0, 1]);
    }

    #[test]
    fn chunk_errors() {
        let (r, i) = chunks(&[0, 1], &[(3, 1)]);
        assert_eq!(render_chunks(&r, &i, 4, 1, 4), Err(RenderError::LengthMismatch(2, 1)));
        let (r, i) = chunks(&[0], &[(3, 4)]);
        assert!(matches!(
            render_chunks(&r, &i, 4, 1, 4),
            Err(RenderError::ColorOutOfRange { .. })
        ));
        let c = InterpreterGenome::Circles(vec![]);
        assert!(matches!(
            render_chunks(&r, &c, 4, 1, 4),
            Err(RenderError::KindMismatch(..))
        ));
    }

    fn polygon(points: &[(u32, u32)], color: u8) -> (RepresentationGenome, InterpreterGenome) {
        (
            RepresentationGenome::Polygons(points.iter().map(|&(x, y)| Point::new(x, y)).collect()),
            InterpreterGenome::Polygons(vec![PolygonGene {
                sides: points.len() as u32,
                color,
            }]),
        )
    }

    #[test]
    fn axis_aligned_square() {
        let (r, i) = polygon(&[(0, 0), (4, 0), (4, 4), (0, 4)], 1);
        let c = render_polygons(&r, &i, 6, 6, 4).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                let want = u8::from(x < 4 && y < 4);
                assert_eq!(c.indices()[y * 6 + x], want, "({x},{y})");
            }
        }
    }

    #[test]
    fn degenerate_polygon_paints_nothing() {
        let (r, i) = polygon(&[(2, 2); 5], 1);
        assert!(render_polygons(&r, &i, 6, 6, 4)
            .unwrap()
            .indices()
            .iter()
            .all(|&v| v == 0));
        // Collinear vertices have zero area too.
        let (r, i) = polygon(&[(0, 0), (2, 2), (4, 4)], 1);
        assert!(render_polygons(&r, &i, 6, 6, 4)
            .unwrap()
            .indices()
            .iter()
            .all(|&v| v == 0));
    }

    #[test]
    fn self_intersecting_bowtie() {
        // Two triangles meeting at (2, 2); even-odd fills both lobes.
        let (r, i) = polygon(&[(0, 0), (4, 4), (4, 0), (0, 4)], 3);
        let c = render_polygons(&r, &i, 4, 4, 4).unwrap();
        // Centers exactly on a crossing are not strictly left of it, so they
        // fall on its right side: x = 0.5 on row 0 is out, x = 3.5 is in.
        #[rustfmt::skip]
        let expected = [
            0, 0, 0, 3,
            3, 0, 3, 3,
            3, 0, 3, 3,
            0, 0, 0, 3,
        ];
        assert_eq!(c.indices(), &expected[..], "{:?}", c.indices());
    }

    #[test]
    fn leftover_vertices_unused() {
        let rep = RepresentationGenome::Polygons(vec![
            Point::new(0, 0),
            Point::new(2, 0),
            Point::new(2, 2),
            Point::new(0, 2),
            Point::new(3, 3),
        ]);
        let interp = InterpreterGenome::Polygons(vec![PolygonGene { sides: 4, color: 2 }]);
        let c = render_polygons(&rep, &interp, 3, 3, 4).unwrap();
        assert_eq!(c.indices(), &[2, 2, 0, 2, 2, 0, 0, 0, 0]);

        let greedy = InterpreterGenome::Polygons(vec![PolygonGene { sides: 6, color: 2 }]);
        assert_eq!(
            render_polygons(&rep, &greedy, 3, 3, 4),
            Err(RenderError::PoolExhausted {
                needed: 6,
                available: 5
            })
        );
    }

    fn circles(items: &[((u32, u32), u32, u8)]) -> (RepresentationGenome, InterpreterGenome) {
        (
            RepresentationGenome::Circles(items.iter().map(|&((x, y), _, _)| Point::new(x, y)).collect()),
            InterpreterGenome::Circles(
                items
                    .iter()
                    .map(|&(_, radius, color)| CircleGene { color, radius })
                    .collect(),
            ),
        )
    }

    #[test]
    fn radius_one_is_a_cross() {
        let (r, i) = circles(&[((2, 2), 1, 1)]);
        let c = render_circles(&r, &i, 5, 5, 4).unwrap();
        let painted: Vec<(usize, usize)> = (0..25)
            .filter(|&k| c.indices()[k] == 1)
            .map(|k| (k % 5, k / 5))
            .collect();
        assert_eq!(painted, vec![(2, 1), (1, 2), (2, 2), (3, 2), (2, 3)]);
    }

    #[test]
    fn corner_circle_is_clipped() {
        let (r, i) = circles(&[((0, 0), 3, 1)]);
        let c = render_circles(&r, &i, 5, 5, 4).unwrap();
        for y in 0..5i64 {
            for x in 0..5i64 {
                let inside = x * x + y * y <= 9;
                assert_eq!(c.indices()[(y * 5 + x) as usize] == 1, inside, "({x},{y})");
            }
        }
    }

    #[test]
    fn later_circle_wins() {
        let (r, i) = circles(&[((1, 2), 2, 1), ((3, 2), 2, 2)]);
        let c = render_circles(&r, &i, 5, 5, 4).unwrap();
        // (2, 2) is inside both.
        assert_eq!(c.indices()[2 * 5 + 2], 2);
        // (0, 2) only in the first.
        assert_eq!(c.indices()[2 * 5], 1);
    }

    #[test]
    fn render_into_clears_previous_contents() {
        let (r, i) = circles(&[((2, 2), 1, 1)]);
        let mut canvas = Canvas::new(5, 5);
        canvas.indices.fill(3);
        render_into(&mut canvas, &r, &i, 4).unwrap();
        assert_eq!(canvas, render(&r, &i, 5, 5, 4).unwrap());
    }
}
