//! Rectangles in the plane and the predicates used to rasterize them.

use core::f64::consts::PI;

/// A rectangle given by its center, side lengths and the angle of its
/// longest side with the x-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub center: (f64, f64),
    /// Longest side.
    pub length: f64,
    pub width: f64,
    /// In `[0, π)`.
    pub angle: f64,
}

impl Rect {
    /// Normalizes the angle into `[0, π)` and swaps sides so that
    /// `width <= length`.
    pub fn new(center: (f64, f64), length: f64, width: f64, angle: f64) -> Self {
        let (mut length, mut width, mut angle) = (length, width, angle);
        if width > length {
            core::mem::swap(&mut length, &mut width);
            angle += PI / 2.0;
        }
        angle = libm::fmod(angle, PI);
        if angle < 0.0 {
            angle += PI;
        }
        if angle >= PI {
            angle -= PI;
        }
        Rect {
            center,
            length,
            width,
            angle,
        }
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn axis_aligned(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect::new(((x0 + x1) / 2.0, (y0 + y1) / 2.0), x1 - x0, y1 - y0, 0.0)
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    pub fn direction(&self) -> (f64, f64) {
        if self.angle == 0.0 {
            (1.0, 0.0)
        } else {
            (libm::cos(self.angle), libm::sin(self.angle))
        }
    }

    /// Counter-clockwise corners.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let (c, s) = self.direction();
        let (hl, hw) = (self.length / 2.0, self.width / 2.0);
        let (x, y) = self.center;
        [(-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw)]
            .map(|(u, v)| (x + u * c - v * s, y + u * s + v * c))
    }

    /// Scaled about its center.
    pub fn dilate(&self, factor: f64) -> Rect {
        Rect {
            length: self.length * factor,
            width: self.width * factor,
            ..*self
        }
    }

    pub fn slope(&self) -> f64 {
        libm::tan(self.angle)
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        Kernel::new(self, 0.0).contains(p)
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        bbox(&self.corners())
    }
}

pub(crate) fn bbox(pts: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    pts.iter().fold(
        (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
        |b, p| (b.0.min(p.0), b.1.min(p.1), b.2.max(p.0), b.3.max(p.1)),
    )
}

/// A rectangle prepared for repeated tests. Every predicate is decided with
/// a guard band `eps`: `contains_*` only answers true when the answer holds
/// with room `eps` to spare, and `disjoint` likewise, so rounding in the
/// coordinate transform (far below `eps`) cannot flip an answer.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Kernel {
    cx: f64,
    cy: f64,
    c: f64,
    s: f64,
    hl: f64,
    hw: f64,
    pub(crate) bbox: (f64, f64, f64, f64),
    eps: f64,
}

impl Kernel {
    pub(crate) fn new(r: &Rect, eps: f64) -> Self {
        let (c, s) = r.direction();
        Kernel {
            cx: r.center.0,
            cy: r.center.1,
            c,
            s,
            hl: r.length / 2.0,
            hw: r.width / 2.0,
            bbox: r.bounding_box(),
            eps,
        }
    }

    #[inline]
    fn local(&self, p: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = (p.0 - self.cx, p.1 - self.cy);
        (dx * self.c + dy * self.s, -dx * self.s + dy * self.c)
    }

    /// Inside with margin.
    #[inline]
    pub(crate) fn contains(&self, p: (f64, f64)) -> bool {
        let (u, v) = self.local(p);
        u.abs() <= self.hl - self.eps && v.abs() <= self.hw - self.eps
    }

    /// The box `[x0, x1] × [y0, y1]` lies inside.
    #[inline]
    pub(crate) fn contains_box(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> bool {
        self.contains((x0, y0))
            && self.contains((x1, y0))
            && self.contains((x1, y1))
            && self.contains((x0, y1))
    }

    /// Separated from the box by more than the margin (separating axes).
    #[inline]
    pub(crate) fn disjoint_box(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> bool {
        let e = self.eps;
        let b = self.bbox;
        if b.2 < x0 - e || b.0 > x1 + e || b.3 < y0 - e || b.1 > y1 + e {
            return true;
        }
        let pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)].map(|p| self.local(p));
        let (umin, vmin, umax, vmax) = bbox(&pts);
        umin > self.hl + e || umax < -self.hl - e || vmin > self.hw + e || vmax < -self.hw - e
    }

    /// `x`-interval where the horizontal line at height `y` lies inside with
    /// margin.
    pub(crate) fn row_interval(&self, y: f64) -> Option<(f64, f64)> {
        let dy = y - self.cy;
        // |dx·c + dy·s| <= hl - eps and |-dx·s + dy·c| <= hw - eps
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b, h) in [
            (self.c, dy * self.s, self.hl),
            (-self.s, dy * self.c, self.hw),
        ] {
            let h = h - self.eps;
            if h < 0.0 {
                return None;
            }
            if a.abs() < 1e-300 {
                if b.abs() > h {
                    return None;
                }
                continue;
            }
            let (p, q) = ((-h - b) / a, (h - b) / a);
            let (p, q) = if p <= q { (p, q) } else { (q, p) };
            lo = lo.max(p);
            hi = hi.min(q);
        }
        // the interval ends carry rounding of order eps·ulp; shrink by eps
        let (lo, hi) = (self.cx + lo + self.eps, self.cx + hi - self.eps);
        (lo <= hi).then_some((lo, hi))
    }
}

/// Guard band for a family spanning coordinates up to `scale`.
pub(crate) fn margin(scale: f64) -> f64 {
    1e-12 * scale.max(1e-300)
}

/// Largest coordinate magnitude or side length over the rectangles.
pub(crate) fn scale_of(rects: &[Rect]) -> f64 {
    rects.iter().fold(0.0f64, |m, r| {
        let b = r.bounding_box();
        m.max(b.0.abs())
            .max(b.1.abs())
            .max(b.2.abs())
            .max(b.3.abs())
            .max(r.length)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let r = Rect::new((0.0, 0.0), 1.0, 2.0, 0.25);
        assert_eq!(r.length, 2.0);
        assert!((r.angle - (0.25 + PI / 2.0)).abs() < 1e-15);
        let r = Rect::new((0.0, 0.0), 2.0, 1.0, -0.5);
        assert!((r.angle - (PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn dilation() {
        let r = Rect::axis_aligned(0.0, 0.0, 1.0, 1.0);
        let d = r.dilate(4.0);
        assert_eq!(d.center, r.center);
        assert_eq!(d.area(), 16.0);
        assert_eq!(r.dilate(1.0), r);
        assert_eq!(r.dilate(2.0).dilate(2.0), r.dilate(4.0));
    }

    #[test]
    fn predicates() {
        let r = Rect::new((0.0, 0.0), 2.0, 1.0, PI / 4.0);
        let k = Kernel::new(&r, 1e-12);
        let shifted = Kernel::new(&Rect::new((3.0, -1.0), 2.0, 1.0, 0.3), 1e-12);
        let (lo, hi) = shifted.row_interval(-0.8).unwrap();
        assert!(shifted.contains((lo, -0.8)) && shifted.contains((hi, -0.8)));
        assert!(!shifted.contains((lo - 1e-9, -0.8)) && !shifted.contains((hi + 1e-9, -0.8)));
        assert!(k.contains((0.5, 0.5)));
        assert!(!k.contains((0.9, -0.9)));
        assert!(k.contains_box(-0.1, -0.1, 0.1, 0.1));
        assert!(k.disjoint_box(2.0, -3.0, 3.0, -2.0));
        assert!(!k.disjoint_box(0.5, 0.5, 3.0, 3.0));
        let (lo, hi) = k.row_interval(0.0).unwrap();
        assert!(k.contains((lo, 0.0)) && k.contains((hi, 0.0)));
        assert!(!k.contains((lo - 1e-9, 0.0)) && !k.contains((hi + 1e-9, 0.0)));
    }
}
