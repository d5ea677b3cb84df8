//! Fixed-precision interval ("ball") arithmetic on big integers.
//!
//! A [`Ball`] at precision `p` encloses the closed interval
//! `[(mid - rad) / 2^p, (mid + rad) / 2^p]`. Every operation returns a ball
//! that is guaranteed to contain the exact result of the operation applied to
//! any points of its inputs, so comparisons made on balls are certified.

use alloc::string::String;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decimal;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    rad: BigUint,
    prec: u32,
}

/// `round(n / d)` for `d > 0`, ties toward +inf. Second value is true when the
/// division was exact.
pub(crate) fn round_div(n: &BigInt, d: &BigInt) -> (BigInt, bool) {
    debug_assert!(d.is_positive());
    let (q, r) = n.div_mod_floor(d);
    if r.is_zero() {
        return (q, true);
    }
    let twice: BigInt = &r << 1usize;
    if twice >= *d {
        (q + 1, false)
    } else {
        (q, false)
    }
}

fn ceil_div_u(n: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = n.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

fn shr_round(x: &BigInt, k: u32) -> (BigInt, bool) {
    if k == 0 {
        return (x.clone(), true);
    }
    let d = BigInt::one() << k as usize;
    round_div(x, &d)
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball {
            mid: BigInt::zero(),
            rad: BigUint::zero(),
            prec,
        }
    }

    pub fn from_int<T: Into<BigInt>>(v: T, prec: u32) -> Self {
        Ball {
            mid: v.into() << prec as usize,
            rad: BigUint::zero(),
            prec,
        }
    }

    /// Encloses a rational; the radius is zero when `q` is representable.
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let num: BigInt = q.numer() << prec as usize;
        let (mid, exact) = round_div(&num, q.denom());
        let rad = if exact {
            BigUint::zero()
        } else {
            BigUint::one()
        };
        Ball { mid, rad, prec }
    }

    /// Ball from raw scaled parts.
    pub fn from_parts(mid: BigInt, rad: BigUint, prec: u32) -> Self {
        Ball { mid, rad, prec }
    }

    /// Ball covering `[lo, hi]` given exactly.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, prec: u32) -> Self {
        let scale = BigInt::one() << prec as usize;
        let lo_s = (lo * BigRational::from_integer(scale.clone()))
            .floor()
            .to_integer();
        let hi_s = (hi * BigRational::from_integer(scale)).ceil().to_integer();
        Self::from_scaled_bounds(lo_s, hi_s, prec)
    }

    fn from_scaled_bounds(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        let mid: BigInt = (&lo + &hi) >> 1usize;
        let rad = (&hi - &mid).max(&mid - &lo);
        Ball {
            mid,
            rad: rad.to_biguint().unwrap_or_default(),
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mid_scaled(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad_scaled(&self) -> &BigUint {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Re-expresses the ball at another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                Ball {
                    mid: &self.mid << s,
                    rad: &self.rad << s,
                    prec,
                }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let (mid, exact) = shr_round(&self.mid, s);
                let d = BigUint::one() << s as usize;
                let mut rad = ceil_div_u(&self.rad, &d);
                if !exact {
                    rad += 1u32;
                }
                Ball { mid, rad, prec }
            }
        }
    }

    fn lo_scaled(&self) -> BigInt {
        &self.mid - BigInt::from(self.rad.clone())
    }

    fn hi_scaled(&self) -> BigInt {
        &self.mid + BigInt::from(self.rad.clone())
    }

    fn scale(&self) -> BigRational {
        BigRational::from_integer(BigInt::one() << self.prec as usize)
    }

    pub fn lower(&self) -> BigRational {
        BigRational::from_integer(self.lo_scaled()) / self.scale()
    }

    pub fn upper(&self) -> BigRational {
        BigRational::from_integer(self.hi_scaled()) / self.scale()
    }

    pub fn mid_rational(&self) -> BigRational {
        BigRational::from_integer(self.mid.clone()) / self.scale()
    }

    pub fn radius(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.rad.clone())) / self.scale()
    }

    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec)
    }

    pub fn radius_f64(&self) -> f64 {
        scaled_to_f64(&BigInt::from(self.rad.clone()), self.prec)
    }

    /// `log2` of the radius, `None` for an exact ball.
    pub fn radius_log2(&self) -> Option<f64> {
        if self.rad.is_zero() {
            return None;
        }
        let bits = self.rad.bits();
        let top = if bits > 60 {
            &self.rad >> (bits - 60) as usize
        } else {
            self.rad.clone()
        };
        let shift = bits.saturating_sub(60) as f64;
        Some(libm::log2(top.to_f64().unwrap_or(1.0)) + shift - self.prec as f64)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.magnitude() <= &self.rad
    }

    pub fn is_positive(&self) -> bool {
        self.lo_scaled().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi_scaled().is_negative()
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Certified comparison with a rational; `None` when the ball straddles it.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        if self.upper() < *q {
            Some(Ordering::Less)
        } else if self.lower() > *q {
            Some(Ordering::Greater)
        } else if self.is_exact() && self.mid_rational() == *q {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison of two balls.
    pub fn cmp_ball(&self, other: &Ball) -> Option<Ordering> {
        let d = self - other;
        if d.is_positive() {
            Some(Ordering::Greater)
        } else if d.is_negative() {
            Some(Ordering::Less)
        } else if d.is_exact() && d.mid.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Ball {
            mid: &self.mid * k,
            rad: &self.rad * k.magnitude(),
            prec: self.prec,
        }
    }

    pub fn div_int(&self, k: u64) -> Self {
        assert!(k > 0, "division by zero integer");
        let d = BigInt::from(k);
        let (mid, exact) = round_div(&self.mid, &d);
        let mut rad = ceil_div_u(&self.rad, &BigUint::from(k));
        if !exact {
            rad += 1u32;
        }
        Ball {
            mid,
            rad,
            prec: self.prec,
        }
    }

    /// Multiplies by `2^e`.
    pub fn mul_pow2(&self, e: i32) -> Self {
        if e >= 0 {
            Ball {
                mid: &self.mid << e as usize,
                rad: &self.rad << e as usize,
                prec: self.prec,
            }
        } else {
            let s = e.unsigned_abs();
            let (mid, exact) = shr_round(&self.mid, s);
            let d = BigUint::one() << s as usize;
            let mut rad = ceil_div_u(&self.rad, &d);
            if !exact {
                rad += 1u32;
            }
            Ball {
                mid,
                rad,
                prec: self.prec,
            }
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn checked_div(&self, other: &Ball) -> Result<Ball> {
        assert_eq!(self.prec, other.prec, "precision mismatch");
        if other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.prec as usize;
        let m2_abs = other.mid.magnitude();
        let lower = m2_abs - &other.rad;
        let num: BigInt = &self.mid << p;
        let (mid, _) = if other.mid.is_negative() {
            round_div(&-num, &-other.mid.clone())
        } else {
            round_div(&num, &other.mid)
        };
        let err_num: BigUint = (&self.rad * m2_abs + self.mid.magnitude() * &other.rad) << p;
        let err_den = m2_abs * &lower;
        let rad = ceil_div_u(&err_num, &err_den) + 1u32;
        Ok(Ball {
            mid,
            rad,
            prec: self.prec,
        })
    }

    pub fn recip(&self) -> Result<Ball> {
        Ball::from_int(1, self.prec).checked_div(self)
    }

    /// Enclosure of `max(x, y)` over `x ∈ self`, `y ∈ other`.
    pub fn max_hull(&self, other: &Ball) -> Ball {
        assert_eq!(self.prec, other.prec, "precision mismatch");
        let lo = self.lo_scaled().max(other.lo_scaled());
        let hi = self.hi_scaled().max(other.hi_scaled());
        Self::from_scaled_bounds(lo, hi, self.prec)
    }

    /// Smallest ball containing both.
    pub fn union(&self, other: &Ball) -> Ball {
        assert_eq!(self.prec, other.prec, "precision mismatch");
        let lo = self.lo_scaled().min(other.lo_scaled());
        let hi = self.hi_scaled().max(other.hi_scaled());
        Self::from_scaled_bounds(lo, hi, self.prec)
    }

    /// Widens the radius by `extra` units of `2^-prec`.
    pub fn inflate(&self, extra: &BigUint) -> Ball {
        Ball {
            mid: self.mid.clone(),
            rad: &self.rad + extra,
            prec: self.prec,
        }
    }

    /// Decimal rendering of the midpoint, trimmed to the digits the radius
    /// supports (never more than `max_sig` significant digits).
    pub fn to_decimal(&self, max_sig: usize) -> String {
        let mut sig = max_sig.max(1);
        if let Some(rl2) = self.radius_log2() {
            let mag = libm::log10(self.to_f64().abs().max(f64::MIN_POSITIVE));
            let rad10 = rl2 * core::f64::consts::LOG10_2;
            let supported = libm::floor(mag - rad10) as i64 + 1;
            if supported < sig as i64 {
                sig = supported.max(1) as usize;
            }
        }
        decimal::rational_to_decimal(&self.mid_rational(), sig)
    }
}

fn scaled_to_f64(x: &BigInt, prec: u32) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let v = x.to_f64().unwrap_or(f64::NAN);
        return libm::ldexp(v, -(prec as i32));
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift as usize;
    libm::ldexp(top.to_f64().unwrap_or(f64::NAN), shift as i32 - prec as i32)
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            mid: -self.mid,
            rad: self.rad,
            prec: self.prec,
        }
    }
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, rhs: &Ball) -> Ball {
        assert_eq!(self.prec, rhs.prec, "precision mismatch");
        Ball {
            mid: &self.mid + &rhs.mid,
            rad: &self.rad + &rhs.rad,
            prec: self.prec,
        }
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, rhs: &Ball) -> Ball {
        assert_eq!(self.prec, rhs.prec, "precision mismatch");
        Ball {
            mid: &self.mid - &rhs.mid,
            rad: &self.rad + &rhs.rad,
            prec: self.prec,
        }
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, rhs: &Ball) -> Ball {
        assert_eq!(self.prec, rhs.prec, "precision mismatch");
        let p = self.prec;
        let prod = &self.mid * &rhs.mid;
        let (mid, exact) = shr_round(&prod, p);
        let err: BigUint = self.mid.magnitude() * &rhs.rad
            + rhs.mid.magnitude() * &self.rad
            + &self.rad * &rhs.rad;
        let mut rad = ceil_div_u(&err, &(BigUint::one() << p as usize));
        if !exact {
            rad += 1u32;
        }
        Ball { mid, rad, prec: p }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Ball> for Ball {
            type Output = Ball;
            fn $m(self, rhs: &Ball) -> Ball {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Series for `sin r` and `1 - cos r` on a reduced argument `|r| <= 1`.
/// The truncation error of each alternating tail is folded into the radius.
pub(crate) fn sin_versine(r: &Ball) -> (Ball, Ball) {
    let r2 = r.square();
    // a term is negligible once its whole enclosure is a few units in the last place
    let small = |t: &Ball| t.mid.magnitude() + &t.rad < BigUint::from(16u32);

    // sin r = r - r^3/3! + ...
    let mut term = r.clone();
    let mut sin = r.clone();
    let mut k: u64 = 1;
    loop {
        term = (&term * &r2).div_int((2 * k) * (2 * k + 1));
        if k % 2 == 1 {
            sin = &sin - &term;
        } else {
            sin = &sin + &term;
        }
        k += 1;
        if small(&term) {
            break;
        }
    }
    let tail = (&term * &r2).div_int((2 * k) * (2 * k + 1));
    let sin = sin.inflate(&(tail.mid.magnitude() + &tail.rad + 1u32));

    // 1 - cos r = r^2/2! - r^4/4! + ...
    let mut term = r2.div_int(2);
    let mut vers = term.clone();
    let mut k: u64 = 1;
    loop {
        term = (&term * &r2).div_int((2 * k + 1) * (2 * k + 2));
        if k % 2 == 1 {
            vers = &vers - &term;
        } else {
            vers = &vers + &term;
        }
        k += 1;
        if small(&term) {
            break;
        }
    }
    let tail = (&term * &r2).div_int((2 * k + 1) * (2 * k + 2));
    let vers = vers.inflate(&(tail.mid.magnitude() + &tail.rad + 1u32));
    (sin, vers)
}

/// A real number that is either known exactly or enclosed by a ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Exact(BigRational),
    Approx(Ball),
}

impl Real {
    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    pub fn lower(&self) -> BigRational {
        match self {
            Real::Exact(q) => q.clone(),
            Real::Approx(b) => b.lower(),
        }
    }

    pub fn upper(&self) -> BigRational {
        match self {
            Real::Exact(q) => q.clone(),
            Real::Approx(b) => b.upper(),
        }
    }

    /// Midpoint, or the value itself.
    pub fn mid(&self) -> BigRational {
        match self {
            Real::Exact(q) => q.clone(),
            Real::Approx(b) => b.mid_rational(),
        }
    }

    /// Error radius (zero when exact).
    pub fn radius(&self) -> BigRational {
        match self {
            Real::Exact(_) => BigRational::zero(),
            Real::Approx(b) => b.radius(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => rational_to_f64(q),
            Real::Approx(b) => b.to_f64(),
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Real::Exact(q) => Ball::from_rational(q, prec),
            Real::Approx(b) => b.with_prec(prec),
        }
    }

    /// Decimal string; exact values print in full when they terminate within
    /// `max_sig` digits.
    pub fn to_decimal(&self, max_sig: usize) -> String {
        match self {
            Real::Exact(q) => decimal::rational_to_decimal(q, max_sig),
            Real::Approx(b) => b.to_decimal(max_sig),
        }
    }
}

/// Nearest double to an exact rational (up to a couple of ulps).
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let b = Ball::from_rational(q, 1100);
        b.to_f64()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_rationals_have_zero_radius() {
        let b = Ball::from_rational(&q(3, 4), 64);
        assert!(b.is_exact());
        assert_eq!(b.mid_rational(), q(3, 4));
        let third = Ball::from_rational(&q(1, 3), 64);
        assert!(!third.is_exact());
        assert!(third.lower() <= q(1, 3) && q(1, 3) <= third.upper());
    }

    #[test]
    fn arithmetic_encloses_exact_results() {
        let a = Ball::from_rational(&q(1, 3), 80);
        let b = Ball::from_rational(&q(-2, 7), 80);
        let cases = [
            (&a + &b, q(1, 3) + q(-2, 7)),
            (&a - &b, q(1, 3) - q(-2, 7)),
            (&a * &b, q(1, 3) * q(-2, 7)),
            (a.checked_div(&b).unwrap(), q(1, 3) / q(-2, 7)),
            (b.recip().unwrap(), q(-7, 2)),
            (a.div_int(5), q(1, 15)),
            (a.mul_pow2(-3), q(1, 24)),
        ];
        for (ball, exact) in cases {
            assert!(
                ball.lower() <= exact && exact <= ball.upper(),
                "{ball:?} vs {exact}"
            );
            assert!(ball.radius_f64() < 1e-20);
        }
    }

    #[test]
    fn division_by_zero_ball_is_an_error() {
        let z = Ball::from_parts(BigInt::from(1), BigUint::from(2u32), 10);
        assert_eq!(
            Ball::from_int(1, 10).checked_div(&z),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn certified_comparisons_refuse_overlap() {
        let a = Ball::from_parts(BigInt::from(100), BigUint::from(3u32), 8);
        assert_eq!(a.cmp_rational(&q(25, 64)), None);
        assert_eq!(a.cmp_rational(&q(1, 1)), Some(Ordering::Less));
        assert_eq!(a.cmp_rational(&q(1, 4)), Some(Ordering::Greater));
    }

    #[test]
    fn precision_change_keeps_enclosure() {
        let a = Ball::from_rational(&q(5, 7), 120);
        let b = a.with_prec(40);
        assert!(b.lower() <= q(5, 7) && q(5, 7) <= b.upper());
        let c = b.with_prec(200);
        assert_eq!(c.mid_rational(), b.mid_rational());
    }

    #[test]
    fn series_match_libm_on_small_arguments() {
        for &x in &[0.0f64, 1e-8, 0.125, -0.5, 0.785, 1.0] {
            let r = Ball::from_rational(&BigRational::from_float(x).unwrap(), 200);
            let (s, v) = sin_versine(&r);
            assert!((s.to_f64() - libm::sin(x)).abs() < 1e-15);
            assert!((v.to_f64() - (1.0 - libm::cos(x))).abs() < 1e-15);
            assert!(s.radius_f64() < 1e-55 && v.radius_f64() < 1e-55);
        }
    }

    #[test]
    fn decimal_rendering_respects_radius() {
        let third = Ball::from_rational(&q(1, 3), 256);
        assert!(third.to_decimal(20).starts_with("0.3333333333333333333"));
        let rough = Ball::from_parts(BigInt::from(1000), BigUint::from(10u32), 10);
        // 1000/1024 = 0.9765625 with radius ~0.01
        assert_eq!(rough.to_decimal(30), "0.977");
    }
}
