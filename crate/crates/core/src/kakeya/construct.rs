//! Rectangle families with prescribed slopes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::geometry::Rect;
use crate::error::{Error, Result};
use crate::slopes::SlopeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Bush,
    PerronTree,
    Custom,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Bush => "bush",
            Scheme::PerronTree => "perron_tree",
            Scheme::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bush" => Ok(Scheme::Bush),
            "perron_tree" | "perron-tree" => Ok(Scheme::PerronTree),
            "custom" => Ok(Scheme::Custom),
            _ => Err(Error::InvalidArgument(format!(
                "unknown scheme {s:?}; expected bush or perron_tree"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RectFamily {
    pub rects: Vec<Rect>,
    pub slope_set: SlopeSet,
    pub scheme: Scheme,
}

/// Relative tolerance for `tan(angle)` against the slope set.
pub const SLOPE_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

impl RectFamily {
    /// A family of given rectangles; every slope must match an element of
    /// `slope_set` within [`SLOPE_TOLERANCE`].
    pub fn custom(rects: Vec<Rect>, slope_set: SlopeSet) -> Result<Self> {
        let fam = RectFamily {
            rects,
            slope_set,
            scheme: Scheme::Custom,
        };
        if let Some(i) = fam.slope_violation() {
            return Err(Error::InvalidArgument(format!(
                "rectangle {i} has no matching slope"
            )));
        }
        Ok(fam)
    }

    /// Index of the first rectangle whose slope is not in the slope set.
    pub fn slope_violation(&self) -> Option<usize> {
        let u = self.slope_set.to_f64();
        self.rects.iter().position(|r| {
            let t = r.slope();
            !u.iter()
                .any(|&s| (t - s).abs() <= SLOPE_TOLERANCE * s.abs().max(1.0))
        })
    }

    pub fn dilated(&self, factor: f64) -> Vec<Rect> {
        self.rects.iter().map(|r| r.dilate(factor)).collect()
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let pts: Vec<(f64, f64)> = self.rects.iter().flat_map(|r| r.corners()).collect();
        super::geometry::bbox(&pts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizeParams {
    /// Length scale: the rectangle length in the bush, the tree height in
    /// the Perron tree.
    pub length: f64,
    /// Perron tree: fraction of the lower part kept when two halves are slid
    /// together. Each merge overlaps the halves above that height.
    pub overlap: f64,
    /// Perron tree: rectangle width as a fraction of its triangle's width.
    pub width_fraction: f64,
}

impl Default for SizeParams {
    fn default() -> Self {
        SizeParams {
            length: 1.0,
            overlap: 0.85,
            width_fraction: 0.3,
        }
    }
}

pub fn construct_blow_family(
    u: &SlopeSet,
    scheme: Scheme,
    params: &SizeParams,
) -> Result<RectFamily> {
    let n = u.len();
    if !n.is_power_of_two() {
        return Err(Error::CardinalityNotPowerOfTwo(n));
    }
    if !(params.length > 0.0)
        || !(params.overlap > 0.0 && params.overlap < 1.0)
        || !(params.width_fraction > 0.0)
    {
        return Err(Error::InvalidArgument(
            "size parameters out of range".into(),
        ));
    }
    let slopes = u.to_f64();
    let rects = match scheme {
        Scheme::Bush => bush(&slopes, params.length),
        Scheme::PerronTree => perron_tree(&slopes, params),
        Scheme::Custom => {
            return Err(Error::InvalidArgument(
                "custom families are built with RectFamily::custom".into(),
            ))
        }
    };
    Ok(RectFamily {
        rects,
        slope_set: u.clone(),
        scheme,
    })
}

fn angle_of(slope: f64) -> f64 {
    let a = libm::atan(slope);
    if a < 0.0 {
        a + PI
    } else {
        a
    }
}

/// Rectangles sharing the corner at the origin, of common length and width
/// equal to the smallest gap between adjacent slopes times the length.
fn bush(slopes: &[f64], length: f64) -> Vec<Rect> {
    let gap = slopes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let width = (gap * length).min(length);
    slopes
        .iter()
        .map(|&s| {
            let a = angle_of(s);
            let (c, si) = (libm::cos(a), libm::sin(a));
            // the origin is the corner at local (-length/2, -width/2)
            let center = (
                length / 2.0 * c - width / 2.0 * si,
                length / 2.0 * si + width / 2.0 * c,
            );
            Rect {
                center,
                length,
                width,
                angle: a,
            }
        })
        .collect()
}

/// Binary-merge Perron tree.
///
/// Work in a frame rotated so the mean direction is vertical. Slope `i`
/// gets the triangle with apex at height 1 above its own point `m_i` on the
/// base line and base the interval between the midpoints to its neighbours.
/// Adjacent groups are merged pairwise, the right group slid left so that
/// the two hearts overlap above height `overlap` (relative to the current
/// heart height); the heart of the merged group is the common upper part.
/// Each triangle is then replaced by a rectangle along its median.
fn perron_tree(slopes: &[f64], p: &SizeParams) -> Vec<Rect> {
    let n = slopes.len();
    if n == 1 {
        let a = angle_of(slopes[0]);
        let center = (p.length / 2.0 * libm::cos(a), p.length / 2.0 * libm::sin(a));
        return vec![Rect {
            center,
            length: p.length,
            width: p.width_fraction * p.length,
            angle: a,
        }];
    }
    let theta: Vec<f64> = slopes.iter().map(|&s| libm::atan(s)).collect();
    let mean = (theta[0] + theta[n - 1]) / 2.0;
    let m: Vec<f64> = theta.iter().map(|&t| libm::tan(t - mean)).collect();
    let mut bnd = vec![0.0; n + 1];
    for i in 1..n {
        bnd[i] = (m[i - 1] + m[i]) / 2.0;
    }
    bnd[0] = m[0] - (bnd[1] - m[0]);
    bnd[n] = m[n - 1] + (m[n - 1] - bnd[n - 1]);

    let mut shift = vec![0.0; n];
    // heart of a group: base interval (left, right) and apex position, height
    let mut hearts: Vec<(f64, f64, f64, f64)> =
        (0..n).map(|i| (bnd[i], bnd[i + 1], 0.0, 1.0)).collect();
    let mut size = 1;
    while hearts.len() > 1 {
        let mut next = Vec::with_capacity(hearts.len() / 2);
        for (g, pair) in hearts.chunks(2).enumerate() {
            let (xl, _, alx, h) = pair[0];
            let (_, xr2, arx, _) = pair[1];
            let t = xr2 - xl + p.overlap * (arx - xr2 - alx + xl);
            let right = (2 * g + 1) * size;
            for s in &mut shift[right..right + size] {
                *s -= t;
            }
            next.push((xl, xr2 - t, xl + p.overlap * (alx - xl), p.overlap * h));
        }
        hearts = next;
        size *= 2;
    }

    let rot = mean - PI / 2.0;
    let (c, s) = (libm::cos(rot), libm::sin(rot));
    (0..n)
        .map(|i| {
            let b = bnd[i + 1] - bnd[i];
            // median from the base point (m_i + shift, 0) to the apex (shift, 1)
            let (dx, dy) = (-m[i], 1.0);
            let len = libm::hypot(dx, dy);
            let width = p.width_fraction * b * dy / len;
            let (cx, cy) = (m[i] + shift[i] + dx / 2.0, 0.5);
            let center = (p.length * (c * cx - s * cy), p.length * (s * cx + c * cy));
            Rect {
                center,
                length: p.length * len,
                width: p.length * width,
                angle: angle_of(slopes[i]),
            }
        })
        .collect()
}
