//! Rational approximation of 2π: continued fractions, the sets
//! `E(N) = {n >= 1 : exists m, |n + 2πm| < 2^-N}`, and argument-reduced
//! cosine and sine of large integers.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::constants::HighPrecisionConstant;
use crate::error::{Error, Result};
use crate::real::{round_div, sin_versine, Ball};

/// Partial quotients of the constant. Exact constants give their finite
/// expansion (which may be shorter than `depth`). Truncated constants only
/// yield quotients shared by every value within one ulp of the digits.
pub fn continued_fraction(c: &HighPrecisionConstant, depth: usize) -> Result<Vec<BigInt>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(depth);
    if c.exact {
        let mut x = c.value().clone();
        while out.len() < depth {
            let a = x.floor().to_integer();
            let f = &x - BigRational::from_integer(a.clone());
            out.push(a);
            if f.is_zero() {
                break;
            }
            x = f.recip();
        }
        return Ok(out);
    }
    let u = c.uncertainty();
    let mut lo = c.value() - &u;
    let mut hi = c.value() + &u;
    while out.len() < depth {
        let a = lo.floor().to_integer();
        if hi.floor().to_integer() != a {
            break;
        }
        let a_q = BigRational::from_integer(a.clone());
        let flo = &lo - &a_q;
        let fhi = &hi - &a_q;
        out.push(a);
        if flo.is_zero() {
            break;
        }
        lo = fhi.recip();
        hi = flo.recip();
    }
    if out.len() < depth {
        return Err(Error::PrecisionExhausted(format!(
            "only {} partial quotients of {} are certified by the digits",
            out.len(),
            c.name
        )));
    }
    Ok(out)
}

/// `p/q` approximating the constant, with `error = |p - c·q|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub error: Ball,
}

/// Convergents of the quotient list, errors measured against 2π.
pub fn convergents(quotients: &[BigInt], precision_bits: u32) -> Vec<Convergent> {
    convergents_of(&HighPrecisionConstant::two_pi(), quotients, precision_bits)
}

pub fn convergents_of(
    c: &HighPrecisionConstant,
    quotients: &[BigInt],
    precision_bits: u32,
) -> Vec<Convergent> {
    let cb = c.ball(precision_bits);
    let (mut p0, mut p1) = (BigInt::one(), BigInt::zero());
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        p1 = core::mem::replace(&mut p0, p.clone());
        q1 = core::mem::replace(&mut q0, q.clone());
        let error = (Ball::from_int(p.clone(), precision_bits) - cb.mul_int(&q)).abs();
        out.push(Convergent { p, q, error });
    }
    out
}

/// Proof that `n` lies in `E(level)`: `gap = |n + 2πm| < 2^-level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationWitness {
    pub n: u64,
    pub m: i64,
    /// The signed residual `n + 2πm`.
    pub residual: Ball,
    pub gap: Ball,
    pub level: u32,
}

/// Reduction context: 2π and π/2 held at a fixed working precision.
#[derive(Clone, Debug)]
pub struct Reducer {
    prec: u32,
    two_pi: Ball,
    half_pi: Ball,
}

/// Guard bits carried above the requested precision.
pub const GUARD_BITS: u32 = 64;

fn bits_of(n: u64) -> u32 {
    64 - n.leading_zeros()
}

impl Reducer {
    /// A context good for integers below `2^max_bits` at `precision_bits`.
    pub fn new(precision_bits: u32, max_bits: u32) -> Self {
        Self::with_guard(precision_bits, max_bits, GUARD_BITS)
    }

    fn with_guard(precision_bits: u32, max_bits: u32, guard: u32) -> Self {
        let prec = precision_bits + guard + max_bits;
        let two_pi = HighPrecisionConstant::two_pi().ball(prec);
        let half_pi = two_pi.mul_pow2(-2);
        Reducer {
            prec,
            two_pi,
            half_pi,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn two_pi(&self) -> &Ball {
        &self.two_pi
    }

    pub fn half_pi(&self) -> &Ball {
        &self.half_pi
    }

    /// `(k, x - k·period)` with `k = round(x / period)` taken from midpoints.
    fn reduce(&self, x: &Ball, period: &Ball) -> (BigInt, Ball) {
        let (k, _) = round_div(x.mid_scaled(), period.mid_scaled());
        let r = x - &period.mul_int(&k);
        (k, r)
    }

    /// Signed residual `n - 2π·round(n/2π)`, i.e. `n + 2πm` with `m = -round(n/2π)`.
    pub fn residual(&self, n: u64) -> (i64, Ball) {
        let x = Ball::from_int(n, self.prec);
        let (k, r) = self.reduce(&x, &self.two_pi);
        (-k.to_i64().expect("quotient fits i64"), r)
    }

    /// Distance data of `x - offset` modulo 2π.
    pub fn residual_offset(&self, n: u64, offset: &Ball) -> (i64, Ball) {
        let x = Ball::from_int(n, self.prec) - offset;
        let (k, r) = self.reduce(&x, &self.two_pi);
        (-k.to_i64().expect("quotient fits i64"), r)
    }

    /// `(cos n, sin n, 1 - cos n)` by reduction modulo π/2.
    pub fn trig(&self, n: u64) -> Trig {
        let x = Ball::from_int(n, self.prec);
        let (k, r) = self.reduce(&x, &self.half_pi);
        let (s, v) = sin_versine(&r);
        let one = Ball::from_int(1, self.prec);
        let c = &one - &v;
        let quadrant = k.mod_floor(&BigInt::from(4u8)).to_u8().unwrap_or(0);
        let (cos, sin) = match quadrant {
            0 => (c, s),
            1 => (-&s, c),
            2 => (-&c, -&s),
            _ => (s, -&c),
        };
        let vers = if quadrant == 0 { v } else { &one - &cos };
        Trig { cos, sin, vers }
    }
}

#[derive(Clone, Debug)]
pub struct Trig {
    pub cos: Ball,
    pub sin: Ball,
    /// `1 - cos`, evaluated without cancellation near multiples of 2π.
    pub vers: Ball,
}

/// Relative error bound `radius <= |value| · 2^-bits`.
fn relative_ok(b: &Ball, bits: i64) -> bool {
    if b.contains_zero() {
        return false;
    }
    let Some(rl) = b.radius_log2() else {
        return true;
    };
    let mag = libm::log2(b.abs().lower().to_f64().unwrap_or(0.0));
    rl <= mag - bits as f64
}

fn trig_certified(n: u64, precision_bits: u32, pick: impl Fn(&Trig) -> &Ball) -> Result<Trig> {
    trig_certified_from(None, n, precision_bits, pick)
}

/// Tries `first` (when it covers the precision), then widening guard bits.
fn trig_certified_from(
    first: Option<&Reducer>,
    n: u64,
    precision_bits: u32,
    pick: impl Fn(&Trig) -> &Ball,
) -> Result<Trig> {
    let needed = precision_bits as i64 - 8;
    if let Some(red) = first {
        if red.prec >= precision_bits + GUARD_BITS + bits_of(n) {
            let t = red.trig(n);
            if relative_ok(pick(&t), needed) {
                return Ok(t);
            }
        }
    }
    for guard in [GUARD_BITS, 2 * GUARD_BITS, 4 * GUARD_BITS] {
        let t = Reducer::with_guard(precision_bits, bits_of(n), guard).trig(n);
        if relative_ok(pick(&t), needed) {
            return Ok(t);
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "trigonometric value of {n} not certified to {precision_bits} bits"
    )))
}

/// `cos n` with certified relative error below `2^(-precision_bits + 8)`.
pub fn reduced_cos(n: u64, precision_bits: u32) -> Result<Ball> {
    check_precision(precision_bits)?;
    Ok(trig_certified(n, precision_bits, |t| &t.cos)?.cos)
}

/// `sin n` with certified relative error below `2^(-precision_bits + 8)`.
pub fn reduced_sin(n: u64, precision_bits: u32) -> Result<Ball> {
    check_precision(precision_bits)?;
    Ok(trig_certified(n, precision_bits, |t| &t.sin)?.sin)
}

/// `1 - cos n`, accurate in relative terms even when `cos n` is close to 1.
pub fn one_minus_cos(n: u64, precision_bits: u32) -> Result<Ball> {
    check_precision(precision_bits)?;
    Ok(trig_certified(n, precision_bits, |t| &t.vers)?.vers)
}

fn check_precision(precision_bits: u32) -> Result<()> {
    if precision_bits < 64 {
        Err(Error::InvalidArgument(format!(
            "precision_bits {precision_bits} < 64"
        )))
    } else {
        Ok(())
    }
}

pub(crate) fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Certified `b < q`; `None` when the ball straddles `q`.
pub(crate) fn certified_lt(b: &Ball, q: &BigRational) -> Option<bool> {
    match b.cmp_rational(q) {
        Some(Ordering::Less) => Some(true),
        Some(_) => Some(false),
        None => None,
    }
}

/// Certified `b <= q`.
pub(crate) fn certified_le(b: &Ball, q: &BigRational) -> Option<bool> {
    if b.upper() <= *q {
        Some(true)
    } else if b.lower() > *q {
        Some(false)
    } else {
        None
    }
}

/// Membership of `n` in `E(level)` with `m = -round(n/2π)`.
pub fn in_e(n: u64, level: u32, precision_bits: u32) -> Result<Option<ApproximationWitness>> {
    check_precision(precision_bits)?;
    in_e_with(&Reducer::new(precision_bits, bits_of(n)), n, level)
}

/// As [`in_e`], reusing a reduction context (which must cover `n`).
pub fn in_e_with(red: &Reducer, n: u64, level: u32) -> Result<Option<ApproximationWitness>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (m, residual) = red.residual(n);
    let gap = residual.abs();
    let radius_cap = pow2(-(level as i64) - 4);
    if gap.radius() >= radius_cap {
        return Err(Error::PrecisionExhausted(format!(
            "gap of {n} at level {level}"
        )));
    }
    match certified_lt(&gap, &pow2(-(level as i64))) {
        Some(true) => Ok(Some(ApproximationWitness {
            n,
            m,
            residual,
            gap,
            level,
        })),
        Some(false) => Ok(None),
        None => Err(Error::PrecisionExhausted(format!(
            "gap of {n} not separated from 2^-{level}"
        ))),
    }
}

/// Precision used by [`find_in_e`] and the scans.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Largest `max_n` for which the direct scan runs.
pub const SCAN_LIMIT: u64 = 1_000_000;

/// Cheap double-precision estimate of `|n - 2π·round(n/2π)|`, accurate to a
/// few units of `1e-16·n`.
pub fn approx_gap(n: u64) -> f64 {
    const TAU_HI: f64 = 6.283185307179586;
    const TAU_LO: f64 = 2.4492935982947064e-16;
    let x = n as f64;
    let k = libm::round(x / TAU_HI);
    ((x - k * TAU_HI) - k * TAU_LO).abs()
}

/// Certified scan of `lo..=hi` for members of `E(level)`.
pub fn scan_e_range(
    red: &Reducer,
    level: u32,
    lo: u64,
    hi: u64,
) -> Result<Vec<ApproximationWitness>> {
    let threshold = libm::ldexp(1.0, -(level as i32)) + 1e-9;
    let mut out = Vec::new();
    for n in lo.max(1)..=hi {
        if approx_gap(n) < threshold {
            if let Some(w) = in_e_with(red, n, level)? {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Members of `E(level)` up to `max_n`, from convergent numerators of 2π and
/// their multiples, plus a certified direct scan when `max_n <= 10^6`.
pub fn find_in_e(level: u32, max_n: u64) -> Result<Vec<ApproximationWitness>> {
    find_in_e_at(level, max_n, DEFAULT_PRECISION_BITS)
}

pub fn find_in_e_at(
    level: u32,
    max_n: u64,
    precision_bits: u32,
) -> Result<Vec<ApproximationWitness>> {
    check_precision(precision_bits)?;
    let red = Reducer::new(precision_bits, bits_of(max_n));
    let mut found: Vec<ApproximationWitness> = Vec::new();
    for n in convergent_candidates(level, max_n, precision_bits)? {
        if let Some(w) = in_e_with(&red, n, level)? {
            found.push(w);
        }
    }
    if max_n <= SCAN_LIMIT {
        found.extend(scan_e_range(&red, level, 1, max_n)?);
    }
    found.sort_by_key(|w| w.n);
    found.dedup_by_key(|w| w.n);
    Ok(found)
}

/// Multiples `k·p` of convergent numerators whose scaled error stays below
/// `2^-level`.
fn convergent_candidates(level: u32, max_n: u64, precision_bits: u32) -> Result<Vec<u64>> {
    let cf = continued_fraction(&HighPrecisionConstant::two_pi(), 200)?;
    let bound = pow2(-(level as i64));
    let mut out = Vec::new();
    for c in convergents(&cf, precision_bits) {
        let Some(p) = c.p.to_u64() else { break };
        if p > max_n {
            break;
        }
        if p == 0 {
            continue;
        }
        let err = c.error.upper();
        let mut k: u64 = 1;
        while k.checked_mul(p).is_some_and(|kp| kp <= max_n) {
            if BigRational::from_integer(BigInt::from(k)) * &err >= bound {
                break;
            }
            out.push(k * p);
            k += 1;
        }
    }
    Ok(out)
}

/// `1 < 1/cos n <= 1 + 2^(-2·level)` with certified comparisons.
pub fn claim2_check(w: &ApproximationWitness, precision_bits: u32) -> Result<bool> {
    check_precision(precision_bits)?;
    claim2_check_inner(None, w, precision_bits)
}

/// As [`claim2_check`], reusing a reduction context.
pub fn claim2_check_with(
    red: &Reducer,
    w: &ApproximationWitness,
    precision_bits: u32,
) -> Result<bool> {
    check_precision(precision_bits)?;
    claim2_check_inner(Some(red), w, precision_bits)
}

fn claim2_check_inner(
    red: Option<&Reducer>,
    w: &ApproximationWitness,
    precision_bits: u32,
) -> Result<bool> {
    let eps = secant_excess_from(red, w.n, precision_bits)?;
    let positive = if eps.is_positive() {
        true
    } else if eps.upper() <= BigRational::zero() {
        false
    } else {
        return Err(Error::PrecisionExhausted(format!(
            "sign of 1/cos {} - 1",
            w.n
        )));
    };
    let within = certified_le(&eps, &pow2(-2 * w.level as i64)).ok_or_else(|| {
        Error::PrecisionExhausted(format!("1/cos {} against 2^-{}", w.n, 2 * w.level))
    })?;
    Ok(positive && within)
}

/// `1/cos n - 1 = (1 - cos n)/cos n`.
pub fn secant_excess(n: u64, precision_bits: u32) -> Result<Ball> {
    check_precision(precision_bits)?;
    secant_excess_from(None, n, precision_bits)
}

pub(crate) fn secant_excess_from(
    red: Option<&Reducer>,
    n: u64,
    precision_bits: u32,
) -> Result<Ball> {
    let t = trig_certified_from(red, n, precision_bits, |t| &t.vers)?;
    t.vers
        .checked_div(&t.cos)
        .map_err(|_| Error::PrecisionExhausted(format!("cos {n} not separated from 0")))
}

/// `1/sin n - 1 = (1 - sin n)/sin n`.
pub fn cosecant_excess(n: u64, precision_bits: u32) -> Result<Ball> {
    check_precision(precision_bits)?;
    let t = trig_certified(n, precision_bits, |t| &t.sin)?;
    let one = Ball::from_int(1, t.sin.prec());
    (&one - &t.sin)
        .checked_div(&t.sin)
        .map_err(|_| Error::PrecisionExhausted(format!("sin {n} not separated from 0")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn exact_constants_expand_exactly() {
        let c = HighPrecisionConstant::exact("x", "1.5").unwrap();
        assert_eq!(continued_fraction(&c, 2).unwrap(), ints(&[1, 2]));
        let c = HighPrecisionConstant::exact("x", "7").unwrap();
        assert_eq!(continued_fraction(&c, 1).unwrap(), ints(&[7]));
    }

    #[test]
    fn two_pi_quotients() {
        let c = HighPrecisionConstant::two_pi();
        let cf = continued_fraction(&c, 20).unwrap();
        assert_eq!(
            cf,
            ints(&[6, 3, 1, 1, 7, 2, 146, 3, 6, 1, 1, 2, 7, 5, 5, 1, 4, 1, 2, 42])
        );
        // a 310-digit value supports roughly 300 quotients, not thousands
        assert!(matches!(
            continued_fraction(&c, 5000),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn short_truncations_run_out() {
        let c = HighPrecisionConstant::new("two_pi", "6.2831853", "", false).unwrap();
        let err = continued_fraction(&c, 20).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted(_)));
        assert_eq!(continued_fraction(&c, 4).unwrap(), ints(&[6, 3, 1, 1]));
    }

    #[test]
    fn residual_sign_and_quotient() {
        let red = Reducer::new(128, 20);
        let (m, r) = red.residual(44);
        assert_eq!(m, -7);
        assert!(r.is_positive());
        assert!((r.to_f64() - 0.0177028497428947).abs() < 1e-15);
    }
}
