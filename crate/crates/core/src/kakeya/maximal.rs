//! A lower bound for the directional maximal function of an indicator on a
//! grid, and the level-set probe built on it.
//!
//! The supremum over all rectangles with slopes in `U` is replaced by the
//! maximum over a finite generated family: every grid cell center as the
//! rectangle center, every slope, dyadic lengths and widths, plus the
//! rectangles making up `X`. Averages of `1_X` are bounded below by the fine
//! cells lying inside both the rectangle and one rectangle of `X`. The field
//! is therefore a lower bound at every cell center.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use super::construct::{construct_blow_family, RectFamily, Scheme, SizeParams};
use super::geometry::{margin, scale_of, Kernel, Rect};
use super::raster::{union_area, AreaEstimate, CellClass, Classifier};
use crate::error::{Error, Result};
use crate::slopes::{hr_coefficient, perron_factor, IndexConvention, SlopeSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    /// Lower-left corner.
    pub origin: (f64, f64),
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridParams {
    /// Square cells covering the family's bounding box padded by `pad`,
    /// `cells` cells along the longer side.
    pub fn around(family: &RectFamily, cells: usize, pad: f64) -> Self {
        let b = family.bounding_box();
        let (w, h) = (b.2 - b.0 + 2.0 * pad, b.3 - b.1 + 2.0 * pad);
        let cell = w.max(h) / cells as f64;
        GridParams {
            origin: (b.0 - pad, b.1 - pad),
            cell,
            nx: libm::ceil(w / cell) as usize,
            ny: libm::ceil(h / cell) as usize,
        }
    }

    pub fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.cell,
            self.origin.1 + (iy as f64 + 0.5) * self.cell,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    /// Longest generated length; shorter ones halve down from it.
    pub max_length: f64,
    pub length_levels: u32,
    /// Widths `L / 2^j` for `j = 0..=width_levels`.
    pub width_levels: u32,
    /// Fine cells per grid cell side, for the averages.
    pub subdivision: usize,
    /// Include the rectangles of `X` themselves.
    pub include_family: bool,
    /// Cap on row evaluations.
    pub budget: u64,
}

impl GeneratorParams {
    /// Lengths halving from the diameter of `X` down to the grid cell.
    pub fn for_family(x: &RectFamily, grid: &GridParams) -> Self {
        let b = x.bounding_box();
        let max_length = libm::hypot(b.2 - b.0, b.3 - b.1);
        let length_levels = libm::floor(libm::log2(max_length / grid.cell)).max(0.0) as u32;
        GeneratorParams {
            max_length,
            length_levels,
            width_levels: 6,
            subdivision: 4,
            include_family: true,
            budget: 5_000_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximalField {
    pub grid: GridParams,
    /// Row-major, `ny` rows of `nx`.
    pub values: Vec<f64>,
}

impl MaximalField {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Measure of `{value > threshold}` counting whole cells.
    pub fn level_set_measure(&self, threshold: f64) -> f64 {
        let n = self.values.iter().filter(|&&v| v > threshold).count();
        n as f64 * self.grid.cell * self.grid.cell
    }
}

/// Cells of `X` fully inside one of its rectangles, with row prefix sums.
struct InnerBitmap {
    origin: (f64, f64),
    h: f64,
    nx: usize,
    ny: usize,
    /// `(nx + 1)` entries per row.
    prefix: Vec<u32>,
}

impl InnerBitmap {
    fn new(x: &[Kernel], origin: (f64, f64), h: f64, nx: usize, ny: usize) -> Self {
        let mut bits = vec![false; nx * ny];
        for k in x {
            let (fy0, fy1) = row_span(k.bbox.1, k.bbox.3, origin.1, h, ny);
            for fy in fy0..fy1 {
                if let Some((a, b)) = cells_inside(k, origin, h, nx, fy) {
                    bits[fy * nx + a..fy * nx + b].fill(true);
                }
            }
        }
        let mut prefix = vec![0u32; (nx + 1) * ny];
        for fy in 0..ny {
            for fx in 0..nx {
                prefix[fy * (nx + 1) + fx + 1] =
                    prefix[fy * (nx + 1) + fx] + bits[fy * nx + fx] as u32;
            }
        }
        InnerBitmap {
            origin,
            h,
            nx,
            ny,
            prefix,
        }
    }

    /// Area of inner cells lying inside `k`.
    fn covered(&self, k: &Kernel, rows: &mut u64) -> f64 {
        let (fy0, fy1) = row_span(k.bbox.1, k.bbox.3, self.origin.1, self.h, self.ny);
        let mut count = 0u64;
        for fy in fy0..fy1 {
            if let Some((a, b)) = cells_inside(k, self.origin, self.h, self.nx, fy) {
                let row = &self.prefix[fy * (self.nx + 1)..(fy + 1) * (self.nx + 1)];
                count += (row[b] - row[a]) as u64;
            }
        }
        *rows += (fy1 - fy0) as u64;
        count as f64 * self.h * self.h
    }
}

/// Rows of cells of side `h` meeting `[y0, y1]`.
fn row_span(y0: f64, y1: f64, oy: f64, h: f64, ny: usize) -> (usize, usize) {
    let a = libm::floor((y0 - oy) / h).max(0.0) as usize;
    let b = (libm::ceil((y1 - oy) / h).max(0.0) as usize).min(ny);
    (a.min(b), b)
}

/// Column range `[a, b)` of row `fy` whose cells lie inside `k`.
fn cells_inside(
    k: &Kernel,
    origin: (f64, f64),
    h: f64,
    nx: usize,
    fy: usize,
) -> Option<(usize, usize)> {
    let y0 = origin.1 + fy as f64 * h;
    let (l0, r0) = k.row_interval(y0)?;
    let (l1, r1) = k.row_interval(y0 + h)?;
    let (l, r) = (l0.max(l1), r0.min(r1));
    let a = libm::ceil((l - origin.0) / h).max(0.0);
    let b = (libm::floor((r - origin.0) / h) - 1.0).min(nx as f64 - 1.0);
    (a <= b).then(|| (a as usize, b as usize + 1))
}

/// Column range `[a, b)` of grid row `iy` whose centers lie inside `k`.
fn centers_inside(k: &Kernel, g: &GridParams, iy: usize) -> Option<(usize, usize)> {
    let y = g.origin.1 + (iy as f64 + 0.5) * g.cell;
    let (l, r) = k.row_interval(y)?;
    let a = libm::ceil((l - g.origin.0) / g.cell - 0.5).max(0.0);
    let b = libm::floor((r - g.origin.0) / g.cell - 0.5).min(g.nx as f64 - 1.0);
    (a <= b).then(|| (a as usize, b as usize + 1))
}

fn raise(field: &mut [f64], k: &Kernel, g: &GridParams, v: f64) {
    let y = (g.origin.1, g.cell);
    let lo = libm::ceil((k.bbox.1 - y.0) / y.1 - 0.5).max(0.0) as usize;
    let hi = (libm::floor((k.bbox.3 - y.0) / y.1 - 0.5) + 1.0).clamp(0.0, g.ny as f64) as usize;
    for iy in lo..hi {
        if let Some((a, b)) = centers_inside(k, g, iy) {
            for c in &mut field[iy * g.nx + a..iy * g.nx + b] {
                if *c < v {
                    *c = v;
                }
            }
        }
    }
}

/// Lower bound of `M_U 1_X` at the grid cell centers.
pub fn maximal_field(
    u: &SlopeSet,
    x: &RectFamily,
    grid: &GridParams,
    gen: &GeneratorParams,
) -> Result<MaximalField> {
    if grid.nx == 0 || grid.ny == 0 || !(grid.cell > 0.0) || gen.subdivision == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let all: Vec<Rect> = x.rects.clone();
    let eps = margin(scale_of(&all).max(grid.cell * (grid.nx + grid.ny) as f64));
    let xk: Vec<Kernel> = all.iter().map(|r| Kernel::new(r, eps)).collect();
    let h = grid.cell / gen.subdivision as f64;
    let bitmap = InnerBitmap::new(
        &xk,
        grid.origin,
        h,
        grid.nx * gen.subdivision,
        grid.ny * gen.subdivision,
    );
    let xb = xk.iter().fold(
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

    let mut field = vec![0.0f64; grid.nx * grid.ny];
    if gen.include_family {
        for k in &xk {
            raise(&mut field, k, grid, 1.0);
        }
    }
    let angles: Vec<f64> = u
        .to_f64()
        .iter()
        .map(|&s| {
            let a = libm::atan(s);
            if a < 0.0 {
                a + core::f64::consts::PI
            } else {
                a
            }
        })
        .collect();
    let mut rows = 0u64;
    for lk in 0..=gen.length_levels {
        let len = gen.max_length / (1u64 << lk) as f64;
        for wj in 0..=gen.width_levels {
            let wid = len / (1u64 << wj) as f64;
            for &angle in &angles {
                for iy in 0..grid.ny {
                    for ix in 0..grid.nx {
                        let r = Rect {
                            center: grid.center(ix, iy),
                            length: len,
                            width: wid,
                            angle,
                        };
                        let k = Kernel::new(&r, eps);
                        let b = k.bbox;
                        if b.2 < xb.0 || b.0 > xb.2 || b.3 < xb.1 || b.1 > xb.3 {
                            continue;
                        }
                        let v = (bitmap.covered(&k, &mut rows) / r.area()).min(1.0);
                        if v > 0.0 {
                            raise(&mut field, &k, grid, v);
                        }
                        if rows > gen.budget {
                            return Err(Error::BudgetExceeded(format!(
                                "more than {} row evaluations",
                                gen.budget
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(MaximalField {
        grid: *grid,
        values: field,
    })
}

/// Area of the grid cells fully inside `X` and of those meeting its
/// boundary.
pub fn grid_classification(x: &RectFamily, grid: &GridParams) -> (f64, f64) {
    let c = Classifier::new(&x.rects);
    let (mut inner, mut boundary) = (0usize, 0usize);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let x0 = grid.origin.0 + ix as f64 * grid.cell;
            let y0 = grid.origin.1 + iy as f64 * grid.cell;
            match c.classify(x0, y0, x0 + grid.cell, y0 + grid.cell) {
                CellClass::Inside => inner += 1,
                CellClass::Boundary => boundary += 1,
                CellClass::Outside => {}
            }
        }
    }
    let a = grid.cell * grid.cell;
    (inner as f64 * a, boundary as f64 * a)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeParams {
    pub size: SizeParams,
    /// Grid cells along the longer side.
    pub cells: usize,
    /// Padding around `X` as a fraction of its longest rectangle.
    pub pad_fraction: f64,
    pub target_rel_err: f64,
    /// Number of halvings below the diameter of `X`; `None` goes down to the
    /// grid cell.
    pub length_levels: Option<u32>,
    pub width_levels: u32,
    pub subdivision: usize,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams {
            size: SizeParams::default(),
            cells: 64,
            pad_fraction: 0.5,
            target_rel_err: 0.01,
            length_levels: None,
            width_levels: 6,
            subdivision: 4,
        }
    }
}

/// Both sides of `|X| <= [α^{2N} + G_U(1-α)^2]·|{M_U 1_X > 1/4}|` for a
/// constructed `X`, with the level set measured on the lower-bound field.
/// The measured level set can only be too small, so the probe is evidence,
/// never a refutation.
#[derive(Clone, Debug, PartialEq)]
pub struct HrProbeReport {
    pub n: u32,
    pub alpha: f64,
    pub perron_factor: f64,
    pub coefficient: f64,
    pub x_area: AreaEstimate,
    pub level_set_measure: f64,
    /// Area of grid cells meeting the boundary of `X`.
    pub discretization_error: f64,
    /// `coefficient · level_set_measure`.
    pub rhs: f64,
    /// `level_set_measure / |X|`.
    pub level_ratio: f64,
    /// `|X| <= rhs` on the measured values.
    pub inequality_observed: bool,
    /// `level_set_measure >= |X| - discretization_error`, up to the area
    /// bracket.
    pub level_set_covers_x: bool,
    pub field: MaximalField,
}

pub fn hr_probe(
    u: &SlopeSet,
    alpha: f64,
    scheme: Scheme,
    params: &ProbeParams,
) -> Result<HrProbeReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    let x = construct_blow_family(u, scheme, &params.size)?;
    let n = u.len().trailing_zeros();
    let g = perron_factor(u, IndexConvention::AllKl)?.g;
    let g_f = g.to_f64();
    let alpha_q =
        BigRational::from_float(alpha).ok_or_else(|| Error::InvalidArgument("alpha".into()))?;
    let g_q = g.mid();
    let coefficient = crate::real::rational_to_f64(&hr_coefficient(&alpha_q, 2 * n, &g_q));

    let longest = x.rects.iter().map(|r| r.length).fold(0.0, f64::max);
    let grid = GridParams::around(&x, params.cells, params.pad_fraction * longest);
    let base = GeneratorParams::for_family(&x, &grid);
    let gen = GeneratorParams {
        length_levels: params.length_levels.unwrap_or(base.length_levels),
        width_levels: params.width_levels,
        subdivision: params.subdivision,
        ..base
    };
    let field = maximal_field(u, &x, &grid, &gen)?;
    let x_area = union_area(&x.rects, params.target_rel_err)?;
    let (_, boundary) = grid_classification(&x, &grid);
    let level = field.level_set_measure(0.25);
    let rhs = coefficient * level;
    Ok(HrProbeReport {
        n,
        alpha,
        perron_factor: g_f,
        coefficient,
        level_set_measure: level,
        discretization_error: boundary,
        rhs,
        level_ratio: level / x_area.value,
        inequality_observed: x_area.value <= rhs,
        level_set_covers_x: level >= x_area.lower - boundary,
        x_area,
        field,
    })
}
