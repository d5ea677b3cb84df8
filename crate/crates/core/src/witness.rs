//! Homogeneous sets `{first + (k-1)·step}`, their multiplicative
//! perturbations, and the witness pipeline showing that `{n / cos n}` (and
//! `{n / sin n}`) contains `2^N`-point subsets of Perron factor at most 6.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::diophantine::{
    self, approx_gap, in_e_with, pow2, secant_excess_from, ApproximationWitness, Reducer,
};
use crate::error::{Error, Result};
use crate::real::{Ball, Real};
use crate::slopes::{perron_factor, perron_factor_with_table, IndexConvention, SlopeSet};

/// The progression `first, first + step, ..., first + (2^n - 1)·step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomogeneousSet {
    pub first: u64,
    pub step: u64,
    pub n: u32,
}

/// `{k·a : 1 <= k <= 2^n}`.
pub fn homogeneous(a: u64, n: u32) -> Result<HomogeneousSet> {
    HomogeneousSet::new(a, a, n)
}

impl HomogeneousSet {
    pub fn new(first: u64, step: u64, n: u32) -> Result<Self> {
        if first == 0 || step == 0 || n == 0 {
            return Err(Error::InvalidArgument(
                "first, step and n must be positive".into(),
            ));
        }
        let count = 1u64.checked_shl(n).filter(|_| n < 40);
        let last = count
            .and_then(|c| (c - 1).checked_mul(step))
            .and_then(|x| x.checked_add(first));
        if last.is_none() {
            return Err(Error::InvalidArgument(format!(
                "2^{n} terms of step {step} overflow"
            )));
        }
        Ok(HomogeneousSet { first, step, n })
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> Vec<u64> {
        (0..self.len() as u64)
            .map(|k| self.first + k * self.step)
            .collect()
    }

    pub fn to_slope_set(&self) -> SlopeSet {
        let v: Vec<i64> = self.elements().into_iter().map(|x| x as i64).collect();
        SlopeSet::from_ints(&v).expect("progression is increasing")
    }
}

/// `{(1 + ε(x))·x : x ∈ base}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedHomogeneousSet {
    pub base: HomogeneousSet,
    /// `ε` in element order.
    pub eps: Vec<Real>,
    /// Perturbed values, sorted.
    pub perturbed_values: SlopeSet,
    pub eps_sup: Real,
    /// `(1 + ε(x))·x` is certified strictly increasing in `x`.
    pub ordered: bool,
}

fn real_mul_int(x: &Real, k: u64) -> Real {
    match x {
        Real::Exact(q) => Real::Exact(q * BigRational::from_integer(k.into())),
        Real::Approx(b) => Real::Approx(b.mul_int(&BigInt::from(k))),
    }
}

fn real_add_int(x: &Real, k: u64) -> Real {
    match x {
        Real::Exact(q) => Real::Exact(q + BigRational::from_integer(k.into())),
        Real::Approx(b) => Real::Approx(b + &Ball::from_int(k, b.prec())),
    }
}

fn real_max(a: &Real, b: &Real) -> Real {
    match (a, b) {
        (Real::Exact(x), Real::Exact(y)) => Real::Exact(x.max(y).clone()),
        _ => {
            let p = match (a, b) {
                (Real::Approx(x), _) => x.prec(),
                (_, Real::Approx(y)) => y.prec(),
                _ => unreachable!(),
            };
            Real::Approx(a.to_ball(p).max_hull(&b.to_ball(p)))
        }
    }
}

/// Applies `ε`, given per element of `h`. The map must cover exactly the
/// elements of `h` with values in `(0, 1)`.
pub fn perturb(h: &HomogeneousSet, eps: &BTreeMap<u64, Real>) -> Result<PerturbedHomogeneousSet> {
    let elems = h.elements();
    if eps.len() != elems.len() || elems.iter().any(|x| !eps.contains_key(x)) {
        return Err(Error::DomainMismatch);
    }
    let list: Vec<Real> = elems.iter().map(|x| eps[x].clone()).collect();
    perturb_list(h, list)
}

pub(crate) fn perturb_list(h: &HomogeneousSet, eps: Vec<Real>) -> Result<PerturbedHomogeneousSet> {
    let elems = h.elements();
    let zero = BigRational::zero();
    let one = BigRational::one();
    for (x, e) in elems.iter().zip(&eps) {
        if e.lower() <= zero || e.upper() >= one {
            return Err(Error::EpsOutOfRange { element: *x });
        }
    }
    let prec = eps
        .iter()
        .filter_map(|e| match e {
            Real::Approx(b) => Some(b.prec()),
            Real::Exact(_) => None,
        })
        .max();
    let values: Vec<Real> = elems
        .iter()
        .zip(&eps)
        .map(|(&x, e)| real_add_int(&real_mul_int(e, x), x))
        .collect();
    let ordered = values.windows(2).all(|w| w[0].upper() < w[1].lower());
    let eps_sup = eps
        .iter()
        .skip(1)
        .fold(eps[0].clone(), |m, e| real_max(&m, e));
    let prec_bits = prec.unwrap_or(crate::slopes::DEFAULT_PRECISION_BITS);
    let perturbed_values = if ordered {
        SlopeSet::new(values, None, prec_bits)?
    } else {
        SlopeSet::from_unsorted(values, None, prec_bits)?
    };
    Ok(PerturbedHomogeneousSet {
        base: *h,
        eps,
        perturbed_values,
        eps_sup,
        ordered,
    })
}

/// Outcome of testing the bound `G <= 6` under `2^n·sup ε <= 1/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P2Report {
    pub hypothesis: bool,
    /// `None` when the set has fewer than three points (no admissible pair).
    pub g: Option<Real>,
    /// Largest single difference ratio (forward or backward).
    pub max_single_ratio: Option<Real>,
    /// `max_single_ratio <= 3`, certified.
    pub ratio_bound_holds: bool,
    pub pass: bool,
}

/// `hypothesis = 2^n·sup ε <= 1/2`; `pass = !hypothesis || G <= 6`. Under the
/// hypothesis each single ratio is also checked against 3.
pub fn p2_check(p: &PerturbedHomogeneousSet, convention: IndexConvention) -> Result<P2Report> {
    let half = BigRational::new(1.into(), 2.into());
    let scaled_sup_upper = p.eps_sup.upper() * pow2(p.base.n as i64);
    let hypothesis = scaled_sup_upper <= half;
    if p.perturbed_values.len() < 3 {
        return Ok(P2Report {
            hypothesis,
            g: None,
            max_single_ratio: None,
            ratio_bound_holds: true,
            pass: true,
        });
    }
    let (report, max_ratio) = match p.perturbed_values.rationals() {
        // the maximising pair also carries the largest single ratio
        Some(q) => {
            let report = perron_factor(&p.perturbed_values, convention)?;
            let (k, l) = (report.argmax_k, report.argmax_l);
            let a = &q[k + l - 1] - &q[k - 1];
            let b = &q[k + 2 * l - 1] - &q[k + l - 1];
            let r = if a >= b { a / b } else { b / a };
            (report, Some(Real::Exact(r)))
        }
        None => {
            let report = perron_factor_with_table(&p.perturbed_values, convention)?;
            let mut max_ratio: Option<Real> = None;
            for e in report.ratio_table.as_deref().expect("requested") {
                for r in [&e.forward, &e.backward] {
                    max_ratio = Some(match max_ratio {
                        None => r.clone(),
                        Some(m) => real_max(&m, r),
                    });
                }
            }
            (report, max_ratio)
        }
    };
    let three = BigRational::from_integer(3.into());
    let six = BigRational::from_integer(6.into());
    let ratio_bound_holds = max_ratio.as_ref().is_some_and(|m| m.upper() <= three);
    let g_ok = report.g.upper() <= six;
    Ok(P2Report {
        hypothesis,
        g: Some(report.g),
        max_single_ratio: max_ratio,
        ratio_bound_holds,
        pass: !hypothesis || g_ok,
    })
}

/// Every arrow of the pipeline, checked separately.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClaimChecks {
    /// Every element lies within `2^-n` of the target lattice.
    pub claim3: bool,
    /// Every `ε(x)` lies in `(0, 2^-2n]`.
    pub claim2: bool,
    /// `2^n·sup ε <= 2^-n <= 1/2`.
    pub hypothesis_chain: bool,
    /// Every single difference ratio is at most 3.
    pub ratio_bound: bool,
    /// `G <= 6` (vacuous for two-point sets).
    pub g_le_6: bool,
    /// Perturbed values agree with `x / cos x` (or `x / sin x`) computed
    /// independently.
    pub identity: bool,
}

impl ClaimChecks {
    pub fn all(&self) -> bool {
        self.claim3
            && self.claim2
            && self.hypothesis_chain
            && self.ratio_bound
            && self.g_le_6
            && self.identity
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// A finished witness for one `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaWitness {
    pub trig: Trig,
    pub n: u32,
    /// First element of the progression and its lattice witness.
    pub first: ApproximationWitness,
    /// Step of the progression and its lattice witness (level `2n`, or
    /// `2n + 1` for the sine variant).
    pub step: ApproximationWitness,
    /// Lattice witness of each element at level `n`.
    pub element_witnesses: Vec<ApproximationWitness>,
    pub set: PerturbedHomogeneousSet,
    pub p2: P2Report,
    pub claims: ClaimChecks,
}

impl OmegaWitness {
    pub fn a(&self) -> u64 {
        self.step.n
    }

    pub fn pass(&self) -> bool {
        self.claims.all() && self.p2.pass && self.set.ordered
    }
}

/// Smallest `a <= max_search` in `E(level)`.
pub fn smallest_in_e(
    level: u32,
    max_search: u64,
    precision_bits: u32,
) -> Result<ApproximationWitness> {
    let red = Reducer::new(precision_bits, 64 - max_search.leading_zeros());
    let threshold = libm::ldexp(1.0, -(level as i32)) + 1e-9;
    for n in 1..=max_search {
        if approx_gap(n) < threshold {
            if let Some(w) = in_e_with(&red, n, level)? {
                return Ok(w);
            }
        }
    }
    Err(Error::NoWitnessFound { level, max_search })
}

/// Double-precision distance from `n` to `π/2 + 2πℤ`.
fn approx_gap_half_pi(n: u64) -> f64 {
    const TAU_HI: f64 = 6.283185307179586;
    const TAU_LO: f64 = 2.4492935982947064e-16;
    let x = n as f64 - core::f64::consts::FRAC_PI_2;
    let k = libm::round(x / TAU_HI);
    ((x - k * TAU_HI) - k * TAU_LO).abs()
}

/// Certified membership of `n` in `{x : |x - π/2 - 2πj| < 2^-level}`; the
/// witness records `m = -j`.
pub fn near_half_pi_with(
    red: &Reducer,
    n: u64,
    level: u32,
) -> Result<Option<ApproximationWitness>> {
    let (m, residual) = red.residual_offset(n, red.half_pi());
    let gap = residual.abs();
    if gap.radius() >= pow2(-(level as i64) - 4) {
        return Err(Error::PrecisionExhausted(format!(
            "distance of {n} to pi/2 at level {level}"
        )));
    }
    match diophantine::certified_lt(&gap, &pow2(-(level as i64))) {
        Some(true) => Ok(Some(ApproximationWitness {
            n,
            m,
            residual,
            gap,
            level,
        })),
        Some(false) => Ok(None),
        None => Err(Error::PrecisionExhausted(format!(
            "distance of {n} to pi/2 against 2^-{level}"
        ))),
    }
}

/// Smallest `b <= max_search` within `2^-level` of `π/2 + 2πℤ`.
pub fn smallest_near_half_pi(
    level: u32,
    max_search: u64,
    precision_bits: u32,
) -> Result<ApproximationWitness> {
    let red = Reducer::new(precision_bits, 64 - max_search.leading_zeros());
    let threshold = libm::ldexp(1.0, -(level as i32)) + 1e-9;
    for n in 1..=max_search {
        if approx_gap_half_pi(n) < threshold {
            if let Some(w) = near_half_pi_with(&red, n, level)? {
                return Ok(w);
            }
        }
    }
    Err(Error::NoWitnessFound { level, max_search })
}

fn cosecant_excess_from(red: &Reducer, x: u64) -> Result<Ball> {
    let t = red.trig(x);
    let one = Ball::from_int(1, t.sin.prec());
    (&one - &t.sin)
        .checked_div(&t.sin)
        .map_err(|_| Error::PrecisionExhausted(format!("sin {x} not separated from 0")))
}

/// The homogeneous witness `H_{a,n}` with `a` the smallest element of
/// `E(2n)` and `1 + ε(x) = 1/cos x`.
pub fn omega_e_witness(n: u32, max_search: u64, precision_bits: u32) -> Result<OmegaWitness> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let step = smallest_in_e(2 * n, max_search, precision_bits)?;
    let h = homogeneous(step.n, n)?;
    let last = *h.elements().last().expect("non-empty");
    let red = Reducer::new(precision_bits, 64 - last.leading_zeros());

    let mut element_witnesses = Vec::with_capacity(h.len());
    let mut claim3 = true;
    for x in h.elements() {
        match in_e_with(&red, x, n)? {
            Some(w) => element_witnesses.push(w),
            None => claim3 = false,
        }
    }

    let eps: Vec<Real> = h
        .elements()
        .into_iter()
        .map(|x| secant_excess_from(Some(&red), x, precision_bits).map(Real::Approx))
        .collect::<Result<_>>()?;
    finish(
        Trig::Cos,
        n,
        step.clone(),
        step,
        h,
        element_witnesses,
        claim3,
        eps,
        precision_bits,
    )
}

/// Sine variant: the progression `b, b + a, ..., b + (2^n - 1)a` with `b`
/// the smallest integer within `2^-(2n+1)` of `π/2 + 2πℤ`, `a` the smallest
/// element of `E(2n + 1)`, and `1 + ε(x) = 1/sin x`. Every element is then
/// within `2^-n` of `π/2 + 2πℤ`; this is checked per element.
pub fn omega_s_witness(n: u32, max_search: u64, precision_bits: u32) -> Result<OmegaWitness> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let first = smallest_near_half_pi(2 * n + 1, max_search, precision_bits)?;
    let step = smallest_in_e(2 * n + 1, max_search, precision_bits)?;
    let h = HomogeneousSet::new(first.n, step.n, n)?;
    let last = *h.elements().last().expect("non-empty");
    let red = Reducer::new(precision_bits, 64 - last.leading_zeros());

    let mut element_witnesses = Vec::with_capacity(h.len());
    let mut claim3 = true;
    for x in h.elements() {
        match near_half_pi_with(&red, x, n)? {
            Some(w) => element_witnesses.push(w),
            None => claim3 = false,
        }
    }
    let eps: Vec<Real> = h
        .elements()
        .into_iter()
        .map(|x| cosecant_excess_from(&red, x).map(Real::Approx))
        .collect::<Result<_>>()?;
    finish(
        Trig::Sin,
        n,
        first,
        step,
        h,
        element_witnesses,
        claim3,
        eps,
        precision_bits,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    trig: Trig,
    n: u32,
    first: ApproximationWitness,
    step: ApproximationWitness,
    h: HomogeneousSet,
    element_witnesses: Vec<ApproximationWitness>,
    claim3: bool,
    eps: Vec<Real>,
    precision_bits: u32,
) -> Result<OmegaWitness> {
    let eps_cap = pow2(-2 * n as i64);
    let mut claim2 = true;
    for (x, e) in h.elements().into_iter().zip(&eps) {
        let below = if e.upper() <= eps_cap {
            true
        } else if e.lower() > eps_cap {
            false
        } else {
            return Err(Error::PrecisionExhausted(format!(
                "eps({x}) against 2^-{}",
                2 * n
            )));
        };
        claim2 &= e.lower() > BigRational::zero() && below;
    }

    // ε must be strictly positive; perturb_list fails loudly otherwise
    let set = perturb_list(&h, eps)?;
    let scaled = set.eps_sup.upper() * pow2(n as i64);
    let hypothesis_chain =
        scaled <= pow2(-(n as i64)) && pow2(-(n as i64)) <= BigRational::new(1.into(), 2.into());

    let p2 = p2_check(&set, IndexConvention::AllKl)?;
    let g_le_6 =
        p2.g.as_ref()
            .is_none_or(|g| g.upper() <= BigRational::from_integer(6.into()));
    let ratio_bound = p2.g.is_none() || p2.ratio_bound_holds;
    let identity = check_identity(trig, &h, &set, precision_bits)?;

    let claims = ClaimChecks {
        claim3,
        claim2,
        hypothesis_chain,
        ratio_bound,
        g_le_6,
        identity,
    };
    Ok(OmegaWitness {
        trig,
        n,
        first,
        step,
        element_witnesses,
        set,
        p2,
        claims,
    })
}

/// Compares each perturbed value with `x / cos x` (or `x / sin x`) built from
/// an independent evaluation of the trigonometric value.
fn check_identity(
    trig: Trig,
    h: &HomogeneousSet,
    set: &PerturbedHomogeneousSet,
    precision_bits: u32,
) -> Result<bool> {
    if !set.ordered {
        return Ok(false);
    }
    let tol_exp = -(precision_bits as i64) + 8;
    for (x, v) in h.elements().into_iter().zip(set.perturbed_values.values()) {
        let t = match trig {
            Trig::Cos => diophantine::reduced_cos(x, precision_bits)?,
            Trig::Sin => diophantine::reduced_sin(x, precision_bits)?,
        };
        let direct = Ball::from_int(x, t.prec()).checked_div(&t)?;
        let diff = (&direct - &v.to_ball(t.prec())).abs();
        let tol = direct.abs().upper() * pow2(tol_exp);
        if diff.upper() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One line of the certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateRecord {
    pub n: u32,
    pub witness: Option<OmegaWitness>,
    pub failure: Option<Error>,
}

impl CertificateRecord {
    pub fn pass(&self) -> bool {
        self.witness.as_ref().is_some_and(OmegaWitness::pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Certificate {
    pub records: Vec<CertificateRecord>,
    /// Maximum over records of the certified upper end of `G`; `None` when a
    /// record failed or no record carries a Perron factor.
    pub conclusion: Option<BigRational>,
}

impl Theorem1Certificate {
    pub fn pass(&self) -> bool {
        self.records.iter().all(CertificateRecord::pass)
            && self
                .conclusion
                .as_ref()
                .is_some_and(|c| *c <= BigRational::from_integer(6.into()))
    }

    /// First failure, if any.
    pub fn first_failure(&self) -> Option<&Error> {
        self.records.iter().find_map(|r| r.failure.as_ref())
    }
}

/// Runs [`omega_e_witness`] for each `N`; failing `N` leave a marked record.
pub fn theorem1_certificate(
    n_list: &[u32],
    max_search: u64,
    precision_bits: u32,
) -> Result<Theorem1Certificate> {
    validate_n_list(n_list)?;
    let records = n_list
        .iter()
        .map(|&n| record_for(n, omega_e_witness(n, max_search, precision_bits)))
        .collect();
    Ok(assemble(records))
}

pub fn validate_n_list(n_list: &[u32]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("N list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidArgument(
            "N list must be positive and increasing".into(),
        ));
    }
    Ok(())
}

pub fn record_for(n: u32, r: Result<OmegaWitness>) -> CertificateRecord {
    match r {
        Ok(w) => CertificateRecord {
            n,
            witness: Some(w),
            failure: None,
        },
        Err(e) => CertificateRecord {
            n,
            witness: None,
            failure: Some(e),
        },
    }
}

/// Combines per-`N` records (in the order given) into a certificate.
pub fn assemble(records: Vec<CertificateRecord>) -> Theorem1Certificate {
    let ok = records.iter().all(CertificateRecord::pass);
    let conclusion = if ok {
        records
            .iter()
            .filter_map(|r| r.witness.as_ref()?.p2.g.as_ref().map(Real::upper))
            .max()
    } else {
        None
    };
    Theorem1Certificate {
        records,
        conclusion,
    }
}

/// Short human summary of one record.
pub fn describe(r: &CertificateRecord) -> String {
    match (&r.witness, &r.failure) {
        (Some(w), _) => format!(
            "N={} a={} eps_sup~{:.3e} g~{} pass={}",
            r.n,
            w.a(),
            w.set.eps_sup.to_f64(),
            w.p2.g
                .as_ref()
                .map_or_else(|| String::from("-"), |g| g.to_decimal(12)),
            w.pass()
        ),
        (None, Some(e)) => format!("N={} failed: {e}", r.n),
        (None, None) => format!("N={} empty", r.n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_elements() {
        assert_eq!(homogeneous(44, 2).unwrap().elements(), [44, 88, 132, 176]);
        assert_eq!(homogeneous(1, 1).unwrap().elements(), [1, 2]);
        assert!(homogeneous(0, 2).is_err());
        assert!(homogeneous(u64::MAX / 2, 3).is_err());
    }

    #[test]
    fn perturb_checks_domain_and_range() {
        let h = homogeneous(2, 1).unwrap();
        let tiny = Real::Exact(BigRational::new(1.into(), 1000.into()));
        let mut eps = BTreeMap::new();
        eps.insert(2, tiny.clone());
        assert_eq!(perturb(&h, &eps), Err(Error::DomainMismatch));
        eps.insert(4, Real::Exact(BigRational::one()));
        assert_eq!(perturb(&h, &eps), Err(Error::EpsOutOfRange { element: 4 }));
        eps.insert(4, tiny);
        let p = perturb(&h, &eps).unwrap();
        assert!(p.ordered);
    }
}
