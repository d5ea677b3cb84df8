//! Area of a union of rectangles by bracketing rasterization.
//!
//! Cells of a quadtree over the bounding square are classified as inside
//! (contained in one rectangle), outside (disjoint from all of them) or
//! boundary. Inside cells bound the area from below, inside plus boundary
//! from above. The quadtree is deepened until the bracket is narrow enough.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::geometry::{margin, scale_of, Kernel, Rect};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AreaMethod {
    Raster,
    MonteCarlo,
}

impl AreaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AreaMethod::Raster => "raster",
            AreaMethod::MonteCarlo => "montecarlo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaEstimate {
    pub value: f64,
    /// Certified for raster, a 99% confidence half-width for Monte-Carlo.
    pub abs_error: f64,
    pub lower: f64,
    pub upper: f64,
    /// Final cell side (raster) or bounding-box side (Monte-Carlo).
    pub resolution: f64,
    pub method: AreaMethod,
}

impl AreaEstimate {
    fn from_bracket(lower: f64, upper: f64, resolution: f64) -> Self {
        AreaEstimate {
            value: (lower + upper) / 2.0,
            abs_error: (upper - lower) / 2.0,
            lower,
            upper,
            resolution,
            method: AreaMethod::Raster,
        }
    }

    pub fn rel_width(&self) -> f64 {
        if self.value > 0.0 {
            (self.upper - self.lower) / self.value
        } else {
            f64::INFINITY
        }
    }
}

/// Default cap on classified cells per area computation.
pub const DEFAULT_CELL_BUDGET: u64 = 4_000_000_000;
const MAX_DEPTH: u32 = 40;

/// Bracketed union area, refined until `(upper - lower) / value <=
/// target_rel_err`.
pub fn union_area(rects: &[Rect], target_rel_err: f64) -> Result<AreaEstimate> {
    union_area_with_budget(rects, target_rel_err, DEFAULT_CELL_BUDGET)
}

pub fn union_area_with_budget(
    rects: &[Rect],
    target_rel_err: f64,
    budget: u64,
) -> Result<AreaEstimate> {
    if rects.is_empty() {
        return Err(Error::InvalidArgument("empty rectangle family".into()));
    }
    if !(target_rel_err > 1e-6 && target_rel_err < 0.1) {
        return Err(Error::InvalidArgument(format!(
            "target_rel_err {target_rel_err} outside (1e-6, 0.1)"
        )));
    }
    let q = Quadtree::new(rects);
    let mut spent = 0u64;
    for depth in 0..=MAX_DEPTH {
        let est = q.bracket(depth, budget, &mut spent)?;
        if est.upper - est.lower <= target_rel_err * est.value {
            return Ok(est);
        }
    }
    Err(Error::BudgetExceeded(format!(
        "depth {MAX_DEPTH} reached before relative width {target_rel_err}"
    )))
}

/// Bracket at a fixed quadtree depth; useful to watch refinement.
pub fn union_area_at_depth(rects: &[Rect], depth: u32) -> Result<AreaEstimate> {
    if rects.is_empty() {
        return Err(Error::InvalidArgument("empty rectangle family".into()));
    }
    Quadtree::new(rects).bracket(depth.min(MAX_DEPTH), DEFAULT_CELL_BUDGET, &mut 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    Inside,
    Outside,
    Boundary,
}

/// Classification of one axis-aligned box against a union.
pub(crate) struct Classifier {
    kernels: Vec<Kernel>,
}

impl Classifier {
    pub(crate) fn new(rects: &[Rect]) -> Self {
        let eps = margin(scale_of(rects));
        Classifier {
            kernels: rects.iter().map(|r| Kernel::new(r, eps)).collect(),
        }
    }

    pub(crate) fn classify(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> CellClass {
        let mut touched = false;
        for k in &self.kernels {
            if k.disjoint_box(x0, y0, x1, y1) {
                continue;
            }
            if k.contains_box(x0, y0, x1, y1) {
                return CellClass::Inside;
            }
            touched = true;
        }
        if touched {
            CellClass::Boundary
        } else {
            CellClass::Outside
        }
    }

    pub(crate) fn contains(&self, p: (f64, f64)) -> bool {
        self.kernels.iter().any(|k| k.contains(p))
    }

    pub(crate) fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }
}

struct Quadtree {
    kernels: Vec<Kernel>,
    x0: f64,
    y0: f64,
    side: f64,
}

struct Tally {
    inside: u128,
    boundary: u128,
    cells: u64,
    budget: u64,
}

impl Quadtree {
    fn new(rects: &[Rect]) -> Self {
        let eps = margin(scale_of(rects));
        let kernels: Vec<Kernel> = rects.iter().map(|r| Kernel::new(r, eps)).collect();
        let b = kernels.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |b, k| {
                (
                    b.0.min(k.bbox.0),
                    b.1.min(k.bbox.1),
                    b.2.max(k.bbox.2),
                    b.3.max(k.bbox.3),
                )
            },
        );
        let side = (b.2 - b.0).max(b.3 - b.1) * (1.0 + 1e-9) + 4.0 * eps;
        Quadtree {
            kernels,
            x0: b.0 - 2.0 * eps,
            y0: b.1 - 2.0 * eps,
            side,
        }
    }

    fn bracket(&self, depth: u32, budget: u64, spent: &mut u64) -> Result<AreaEstimate> {
        let mut t = Tally {
            inside: 0,
            boundary: 0,
            cells: 0,
            budget: budget.saturating_sub(*spent),
        };
        let mut arena: Vec<u32> = (0..self.kernels.len() as u32).collect();
        let n = arena.len();
        self.visit(0, 0, 0, depth, 0, n, &mut arena, &mut t)?;
        *spent += t.cells;
        let cell = self.side / (1u64 << depth) as f64;
        let unit = cell * cell;
        let lower = t.inside as f64 * unit;
        let upper = (t.inside + t.boundary) as f64 * unit;
        Ok(AreaEstimate::from_bracket(lower, upper, cell))
    }

    /// Cell `(ix, iy)` at `level`; its candidate rectangles are
    /// `arena[lo..hi]`.
    #[allow(clippy::too_many_arguments)]
    fn visit(
        &self,
        ix: u64,
        iy: u64,
        level: u32,
        depth: u32,
        lo: usize,
        hi: usize,
        arena: &mut Vec<u32>,
        t: &mut Tally,
    ) -> Result<()> {
        t.cells += 1;
        if t.cells > t.budget {
            return Err(Error::BudgetExceeded(format!(
                "more than {} raster cells",
                t.budget
            )));
        }
        let cell = self.side / (1u64 << level) as f64;
        let (x0, y0) = (self.x0 + ix as f64 * cell, self.y0 + iy as f64 * cell);
        let (x1, y1) = (x0 + cell, y0 + cell);
        let start = arena.len();
        for q in lo..hi {
            let k = &self.kernels[arena[q] as usize];
            if k.disjoint_box(x0, y0, x1, y1) {
                continue;
            }
            if k.contains_box(x0, y0, x1, y1) {
                arena.truncate(start);
                t.inside += 1u128 << (2 * (depth - level));
                return Ok(());
            }
            arena.push(arena[q]);
        }
        let end = arena.len();
        if end > start {
            if level == depth {
                t.boundary += 1;
            } else {
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    self.visit(
                        2 * ix + dx,
                        2 * iy + dy,
                        level + 1,
                        depth,
                        start,
                        end,
                        arena,
                        t,
                    )?;
                }
            }
        }
        arena.truncate(start);
        Ok(())
    }
}

/// Monte-Carlo estimate over the bounding box with a seeded generator.
pub fn union_area_montecarlo(rects: &[Rect], samples: u64, seed: u64) -> Result<AreaEstimate> {
    if rects.is_empty() || samples == 0 {
        return Err(Error::InvalidArgument(
            "empty family or zero samples".into(),
        ));
    }
    let c = Classifier::new(rects);
    let b = c.kernels().iter().fold(
        (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
        |b, k| {
            (
                b.0.min(k.bbox.0),
                b.1.min(k.bbox.1),
                b.2.max(k.bbox.2),
                b.3.max(k.bbox.3),
            )
        },
    );
    let (w, h) = (b.2 - b.0, b.3 - b.1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |r: &mut ChaCha8Rng| (r.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let hits = (0..samples)
        .filter(|_| {
            let p = (b.0 + w * unit(&mut rng), b.1 + h * unit(&mut rng));
            c.contains(p)
        })
        .count() as f64;
    let p = hits / samples as f64;
    let area = w * h;
    let half = 2.576 * libm::sqrt(p * (1.0 - p) / samples as f64) * area;
    Ok(AreaEstimate {
        value: p * area,
        abs_error: half,
        lower: p * area - half,
        upper: p * area + half,
        resolution: w.max(h),
        method: AreaMethod::MonteCarlo,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowRatio {
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub numerator: AreaEstimate,
    pub denominator: AreaEstimate,
}

/// `|⋃ dilate(R_i, factor)| / |⋃ R_i|` with bounds from both brackets.
pub fn blow_ratio(rects: &[Rect], factor: f64, target_rel_err: f64) -> Result<BlowRatio> {
    if !(factor > 0.0) {
        return Err(Error::InvalidArgument(
            "dilation factor must be positive".into(),
        ));
    }
    let den = union_area(rects, target_rel_err)?;
    let grown: Vec<Rect> = rects.iter().map(|r| r.dilate(factor)).collect();
    let num = union_area(&grown, target_rel_err)?;
    Ok(BlowRatio {
        ratio: num.value / den.value,
        lower: num.lower / den.upper,
        upper: if den.lower > 0.0 {
            num.upper / den.lower
        } else {
            f64::INFINITY
        },
        numerator: num,
        denominator: den,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square() {
        let a = union_area(&[Rect::axis_aligned(0.0, 0.0, 1.0, 1.0)], 1e-3).unwrap();
        assert!(a.lower <= 1.0 && 1.0 <= a.upper);
        assert!(a.rel_width() <= 1e-3);
    }

    #[test]
    fn refinement_tightens() {
        let r = [
            Rect::new((0.3, 0.1), 2.0, 0.5, 0.7),
            Rect::new((1.0, 0.4), 1.0, 0.2, 2.0),
        ];
        let mut prev = union_area_at_depth(&r, 0).unwrap();
        for d in 1..10 {
            let e = union_area_at_depth(&r, d).unwrap();
            assert!(e.lower >= prev.lower && e.upper <= prev.upper);
            prev = e;
        }
    }

    #[test]
    fn argument_checks() {
        assert!(union_area(&[], 0.01).is_err());
        assert!(union_area(&[Rect::axis_aligned(0.0, 0.0, 1.0, 1.0)], 0.5).is_err());
        let r = [Rect::new((0.0, 0.0), 1.0, 0.3, 0.4)];
        assert!(matches!(
            union_area_with_budget(&r, 1e-4, 100),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
