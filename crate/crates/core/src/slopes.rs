//! Slope sets, the Perron factor, Perron-capacity bounds and the `L^p`
//! lower-bound diagnostic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decimal::parse_rational;
use crate::error::{Error, Result};
use crate::real::{Ball, Real};

/// Default working precision for non-rational sets.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// A finite, strictly increasing set of slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeSet {
    values: Vec<Real>,
    labels: Option<Vec<String>>,
    precision_bits: u32,
}

impl SlopeSet {
    /// Exact set; errors unless strictly increasing.
    pub fn from_rationals(values: Vec<BigRational>) -> Result<Self> {
        Self::new(
            values.into_iter().map(Real::Exact).collect(),
            None,
            DEFAULT_PRECISION_BITS,
        )
    }

    /// Exact set from integers.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::from_rationals(
            values
                .iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        )
    }

    /// Exact set from decimal (or `p/q`) strings.
    pub fn from_decimal_strs<S: AsRef<str>>(values: &[S]) -> Result<Self> {
        let v = values
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(v)
    }

    /// Each double is taken as the exact rational it represents.
    pub fn from_f64(values: &[f64]) -> Result<Self> {
        let v = values
            .iter()
            .map(|&x| BigRational::from_float(x).ok_or_else(|| Error::Parse(alloc::format!("{x}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(v)
    }

    /// Set of enclosures; order must be certified by disjoint balls.
    pub fn from_balls(values: Vec<Ball>, precision_bits: u32) -> Result<Self> {
        Self::new(
            values.into_iter().map(Real::Approx).collect(),
            None,
            precision_bits,
        )
    }

    pub fn new(
        values: Vec<Real>,
        labels: Option<Vec<String>>,
        precision_bits: u32,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::CardinalityTooSmall {
                found: 0,
                required: 1,
            });
        }
        if precision_bits == 0 {
            return Err(Error::InvalidArgument(
                "precision_bits must be positive".into(),
            ));
        }
        if let Some(l) = &labels {
            if l.len() != values.len() {
                return Err(Error::InvalidArgument(
                    "one label per value required".into(),
                ));
            }
        }
        for i in 1..values.len() {
            if !certified_less(&values[i - 1], &values[i]) {
                return Err(Error::NotSorted { index: i });
            }
        }
        Ok(SlopeSet {
            values,
            labels,
            precision_bits,
        })
    }

    /// Sorts and builds; duplicate values are an error.
    pub fn from_unsorted(
        mut values: Vec<Real>,
        labels: Option<Vec<String>>,
        precision_bits: u32,
    ) -> Result<Self> {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].mid().cmp(&values[b].mid()));
        let mut sorted = Vec::with_capacity(values.len());
        let mut slots: Vec<Option<Real>> = values.drain(..).map(Some).collect();
        for &i in &idx {
            sorted.push(slots[i].take().expect("each index once"));
        }
        let labels = labels.map(|l| idx.iter().map(|&i| l[i].clone()).collect());
        Self::new(sorted, labels, precision_bits)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::InvalidArgument(
                "one label per value required".into(),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Real::is_exact)
    }

    /// Exact values, when every element is exact.
    pub fn rationals(&self) -> Option<Vec<BigRational>> {
        self.values.iter().map(|v| v.exact().cloned()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Real::to_f64).collect()
    }

    /// Subset picked by sorted indices.
    pub fn subset(&self, indices: &[usize]) -> Result<SlopeSet> {
        let values = indices.iter().map(|&i| self.values[i].clone()).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        SlopeSet::new(values, labels, self.precision_bits)
    }
}

fn certified_less(a: &Real, b: &Real) -> bool {
    match (a, b) {
        (Real::Exact(x), Real::Exact(y)) => x < y,
        _ => a.upper() < b.lower(),
    }
}

/// Which index pairs `(k, l)` enter the supremum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum IndexConvention {
    /// All `k, l >= 1` with `k + 2l <= |U|`.
    #[default]
    AllKl,
    /// Additionally `l <= k`.
    LLeK,
}

impl IndexConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndexConvention::AllKl => "all_kl",
            IndexConvention::LLeK => "l_le_k",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all_kl" => Ok(IndexConvention::AllKl),
            "l_le_k" => Ok(IndexConvention::LLeK),
            _ => Err(Error::InvalidArgument(alloc::format!(
                "unknown index convention {s:?}"
            ))),
        }
    }

    fn admits(&self, k: usize, l: usize) -> bool {
        match self {
            IndexConvention::AllKl => true,
            IndexConvention::LLeK => l <= k,
        }
    }
}

/// One row of the ratio table (indices are 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioEntry {
    pub k: usize,
    pub l: usize,
    /// `(u_{k+2l} - u_{k+l}) / (u_{k+l} - u_k)`.
    pub forward: Real,
    pub backward: Real,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronReport {
    pub g: Real,
    pub argmax_k: usize,
    pub argmax_l: usize,
    pub ratio_table: Option<Vec<RatioEntry>>,
    pub index_convention: IndexConvention,
}

/// Admissible `(k, l)` pairs in lexicographic order, 1-based.
pub fn admissible_pairs(
    len: usize,
    convention: IndexConvention,
) -> impl Iterator<Item = (usize, usize)> {
    (1..=len).flat_map(move |k| {
        (1..=len)
            .map_while(move |l| (k + 2 * l <= len).then_some((k, l)))
            .filter(move |&(k, l)| convention.admits(k, l))
    })
}

/// Integer image of an exact set under a common denominator.
enum Scaled {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

fn scale_to_integers(q: &[BigRational]) -> Scaled {
    let mut den = BigInt::one();
    for v in q {
        den = den.lcm(v.denom());
    }
    let ints: Vec<BigInt> = q.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    let limit = BigInt::one() << 62usize;
    if ints.iter().all(|v| v.abs() < limit) {
        Scaled::Small(ints.iter().map(|v| v.to_i128().expect("bounded")).collect())
    } else {
        Scaled::Big(ints)
    }
}

/// Gaps `(a, b) = (u_{k+l} - u_k, u_{k+2l} - u_{k+l})` maximising
/// `max(a,b)/min(a,b)`; first pair in lexicographic order wins ties.
fn best_pair<T>(v: &[T], convention: IndexConvention) -> Option<(T, T, usize, usize)>
where
    T: Clone + Ord,
    for<'a> &'a T: Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let mut best: Option<(T, T, usize, usize)> = None;
    // best ratio as (hi, lo)
    let mut best_hl: Option<(T, T)> = None;
    for (k, l) in admissible_pairs(v.len(), convention) {
        let a = &v[k + l - 1] - &v[k - 1];
        let b = &v[k + 2 * l - 1] - &v[k + l - 1];
        let (hi, lo) = if a >= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        let better = match &best_hl {
            None => true,
            Some((bh, bl)) => &hi * bl > bh * &lo,
        };
        if better {
            best_hl = Some((hi, lo));
            best = Some((a, b, k, l));
        }
    }
    best
}

fn g_of(a: BigInt, b: BigInt) -> BigRational {
    let num = &a * &a + &b * &b;
    BigRational::new(num, a * b)
}

/// `G_U = sup (x + 1/x)` over admissible pairs, `x = (u_{k+2l} - u_{k+l}) / (u_{k+l} - u_k)`.
pub fn perron_factor(u: &SlopeSet, convention: IndexConvention) -> Result<PerronReport> {
    perron_factor_impl(u, convention, false)
}

/// As [`perron_factor`], also returning the full ratio table.
pub fn perron_factor_with_table(u: &SlopeSet, convention: IndexConvention) -> Result<PerronReport> {
    perron_factor_impl(u, convention, true)
}

fn perron_factor_impl(
    u: &SlopeSet,
    convention: IndexConvention,
    table: bool,
) -> Result<PerronReport> {
    let n = u.len();
    if n < 3 {
        return Err(Error::CardinalityTooSmall {
            found: n,
            required: 3,
        });
    }
    if let Some(q) = u.rationals() {
        let (a, b, k, l) = match scale_to_integers(&q) {
            Scaled::Small(v) => {
                let (a, b, k, l) = best_pair(&v, convention).expect("n >= 3 has a pair");
                (BigInt::from(a), BigInt::from(b), k, l)
            }
            Scaled::Big(v) => best_pair(&v, convention).expect("n >= 3 has a pair"),
        };
        let ratio_table = table.then(|| exact_table(&q, convention));
        return Ok(PerronReport {
            g: Real::Exact(g_of(a, b)),
            argmax_k: k,
            argmax_l: l,
            ratio_table,
            index_convention: convention,
        });
    }
    ball_perron_factor(u, convention, table)
}

fn exact_table(q: &[BigRational], convention: IndexConvention) -> Vec<RatioEntry> {
    admissible_pairs(q.len(), convention)
        .map(|(k, l)| {
            let a = &q[k + l - 1] - &q[k - 1];
            let b = &q[k + 2 * l - 1] - &q[k + l - 1];
            RatioEntry {
                k,
                l,
                forward: Real::Exact(&b / &a),
                backward: Real::Exact(a / b),
            }
        })
        .collect()
}

fn ball_perron_factor(
    u: &SlopeSet,
    convention: IndexConvention,
    table: bool,
) -> Result<PerronReport> {
    let prec = u.precision_bits().max(64);
    let v: Vec<Ball> = u.values().iter().map(|x| x.to_ball(prec)).collect();
    let mut hull: Option<Ball> = None;
    let mut best: Option<(BigRational, usize, usize)> = None;
    let mut rows = Vec::new();
    for (k, l) in admissible_pairs(v.len(), convention) {
        let a = &v[k + l - 1] - &v[k - 1];
        let b = &v[k + 2 * l - 1] - &v[k + l - 1];
        let fwd = b.checked_div(&a)?;
        let bwd = a.checked_div(&b)?;
        let g = &fwd + &bwd;
        let mid = g.mid_rational();
        if best.as_ref().is_none_or(|(m, _, _)| mid > *m) {
            best = Some((mid, k, l));
        }
        hull = Some(match hull {
            None => g,
            Some(h) => h.max_hull(&g),
        });
        if table {
            rows.push(RatioEntry {
                k,
                l,
                forward: Real::Approx(fwd),
                backward: Real::Approx(bwd),
            });
        }
    }
    let (_, k, l) = best.expect("n >= 3 has a pair");
    Ok(PerronReport {
        g: Real::Approx(hull.expect("n >= 3 has a pair")),
        argmax_k: k,
        argmax_l: l,
        ratio_table: table.then_some(rows),
        index_convention: convention,
    })
}

/// Consecutive gaps agree to within `rel_tol · |first gap|`. With
/// `rel_tol = 0` the comparison is exact, and never true for inexact sets.
pub fn is_arithmetic_progression(u: &SlopeSet, rel_tol: &BigRational) -> Result<bool> {
    if u.len() < 2 {
        return Err(Error::CardinalityTooSmall {
            found: u.len(),
            required: 2,
        });
    }
    if rel_tol.is_negative() {
        return Err(Error::InvalidArgument(
            "rel_tol must be non-negative".into(),
        ));
    }
    let v = u.values();
    if let Some(q) = u.rationals() {
        let d0 = &q[1] - &q[0];
        let tol = rel_tol * &d0;
        return Ok(q.windows(2).all(|w| (&w[1] - &w[0] - &d0).abs() <= tol));
    }
    if rel_tol.is_zero() {
        return Ok(false);
    }
    let prec = u.precision_bits().max(64);
    let b: Vec<Ball> = v.iter().map(|x| x.to_ball(prec)).collect();
    let d0 = &b[1] - &b[0];
    let tol = d0.lower() * rel_tol;
    Ok(b.windows(2)
        .all(|w| (&(&w[1] - &w[0]) - &d0).abs().upper() <= tol))
}

/// `{1/u : u ∈ U}`, sorted increasingly; labels follow their elements.
pub fn reciprocal_set(u: &SlopeSet) -> Result<SlopeSet> {
    let v = u.values();
    if v.iter().any(|x| match x {
        Real::Exact(q) => q.is_zero(),
        Real::Approx(b) => b.contains_zero(),
    }) {
        return Err(Error::ContainsZero);
    }
    let positive = v[0].lower().is_positive();
    if v.iter().any(|x| x.lower().is_positive() != positive) {
        return Err(Error::MixedSigns);
    }
    // x -> 1/x reverses order within one sign
    let out: Vec<Real> = v
        .iter()
        .rev()
        .map(|x| match x {
            Real::Exact(q) => Ok(Real::Exact(q.recip())),
            Real::Approx(b) => b.recip().map(Real::Approx),
        })
        .collect::<Result<_>>()?;
    let labels = u.labels().map(|l| l.iter().rev().cloned().collect());
    SlopeSet::new(out, labels, u.precision_bits())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityMethod {
    Witness,
    BruteForce,
}

/// Per-`N` best witness value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CapacityRecord {
    /// Smallest Perron factor among the witnesses for this `N`.
    Bound(Real),
    /// `N = 1`: a two-element set has no admissible pair, so it constrains
    /// nothing.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityEstimate {
    pub upper_bounds: BTreeMap<u32, CapacityRecord>,
    pub method: CapacityMethod,
    /// Rational upper bound on the maximum of the per-`N` minima; `None`
    /// stands for +∞ (no informative record).
    pub certified_bound: Option<BigRational>,
}

/// Per-`N` minima of the Perron factor over the supplied witnesses and their
/// maximum. Each set must have exactly `2^N` elements, `N` non-decreasing.
pub fn capacity_upper_bound(
    witnesses: &[(u32, SlopeSet)],
    convention: IndexConvention,
) -> Result<CapacityEstimate> {
    if witnesses.is_empty() {
        return Err(Error::EmptyWitnessList);
    }
    let mut upper_bounds: BTreeMap<u32, CapacityRecord> = BTreeMap::new();
    let mut prev = 0u32;
    for (n, set) in witnesses {
        if *n == 0 || *n >= 64 {
            return Err(Error::InvalidArgument(alloc::format!(
                "N = {n} out of range"
            )));
        }
        if *n < prev {
            return Err(Error::InvalidArgument(
                "N values must be non-decreasing".into(),
            ));
        }
        prev = *n;
        let expected = 1usize << n;
        if set.len() != expected {
            return Err(Error::CardinalityMismatch {
                n: *n,
                expected,
                found: set.len(),
            });
        }
        let rec = if expected < 3 {
            CapacityRecord::Vacuous
        } else {
            CapacityRecord::Bound(perron_factor(set, convention)?.g)
        };
        let keep = match (upper_bounds.get(n), &rec) {
            (None, _) => true,
            (Some(CapacityRecord::Bound(old)), CapacityRecord::Bound(new)) => {
                new.upper() < old.upper()
            }
            _ => false,
        };
        if keep {
            upper_bounds.insert(*n, rec);
        }
    }
    let certified_bound = upper_bounds
        .values()
        .filter_map(|r| match r {
            CapacityRecord::Bound(g) => Some(g.upper()),
            CapacityRecord::Vacuous => None,
        })
        .max();
    Ok(CapacityEstimate {
        upper_bounds,
        method: CapacityMethod::Witness,
        certified_bound,
    })
}

/// Guard on the size of sets searched exhaustively.
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceResult {
    pub g: Real,
    /// Sorted indices into the input of the minimising subset.
    pub indices: Vec<usize>,
    pub subset: SlopeSet,
}

/// Exact minimum of the Perron factor over all `2^n`-element subsets;
/// ties go to the lexicographically smallest index set.
pub fn capacity_brute_force(
    omega: &SlopeSet,
    n: u32,
    convention: IndexConvention,
) -> Result<BruteForceResult> {
    if omega.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            size: omega.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n >= 63 {
        return Err(Error::CardinalityTooSmall {
            found: omega.len(),
            required: usize::MAX,
        });
    }
    let size = 1usize << n;
    if size < 3 {
        return Err(Error::CardinalityTooSmall {
            found: size,
            required: 3,
        });
    }
    if size > omega.len() {
        return Err(Error::CardinalityTooSmall {
            found: omega.len(),
            required: size,
        });
    }
    let mut best: Option<(Real, Vec<usize>)> = None;
    let scaled = omega.rationals().map(|q| scale_to_integers(&q));
    let mut comb: Vec<usize> = (0..size).collect();
    let mut buf_small: Vec<i128> = Vec::with_capacity(size);
    let mut buf_big: Vec<BigInt> = Vec::with_capacity(size);
    // for exact data compare ratios hi/lo directly
    let mut best_hl: Option<(BigInt, BigInt)> = None;
    loop {
        match &scaled {
            Some(Scaled::Small(v)) => {
                buf_small.clear();
                buf_small.extend(comb.iter().map(|&i| v[i]));
                let (a, b, _, _) = best_pair(&buf_small, convention).expect("size >= 3");
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                let (hi, lo) = (BigInt::from(hi), BigInt::from(lo));
                if best_hl.as_ref().is_none_or(|(bh, bl)| &hi * bl < bh * &lo) {
                    best = Some((Real::Exact(g_of(hi.clone(), lo.clone())), comb.clone()));
                    best_hl = Some((hi, lo));
                }
            }
            Some(Scaled::Big(v)) => {
                buf_big.clear();
                buf_big.extend(comb.iter().map(|&i| v[i].clone()));
                let (a, b, _, _) = best_pair(&buf_big, convention).expect("size >= 3");
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                if best_hl.as_ref().is_none_or(|(bh, bl)| &hi * bl < bh * &lo) {
                    best = Some((Real::Exact(g_of(hi.clone(), lo.clone())), comb.clone()));
                    best_hl = Some((hi, lo));
                }
            }
            None => {
                let sub = omega.subset(&comb)?;
                let g = perron_factor(&sub, convention)?.g;
                if best.as_ref().is_none_or(|(bg, _)| g.mid() < bg.mid()) {
                    best = Some((g, comb.clone()));
                }
            }
        }
        if !next_combination(&mut comb, omega.len()) {
            break;
        }
    }
    let (g, indices) = best.expect("at least one subset");
    let subset = omega.subset(&indices)?;
    Ok(BruteForceResult { g, indices, subset })
}

/// Advances to the next k-combination of `0..n` in lexicographic order.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpBoundQuery {
    pub g: BigRational,
    /// The exponent `2N`.
    pub n: u32,
    pub p: f64,
    pub alpha_grid: Vec<BigRational>,
}

impl LpBoundQuery {
    /// `{j/m : 1 <= j < m}`.
    pub fn uniform_grid(m: u32) -> Vec<BigRational> {
        (1..m)
            .map(|j| BigRational::new(j.into(), m.into()))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.g < BigRational::from_integer(2.into()) {
            return Err(Error::InvalidArgument("g must be at least 2".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument("p must lie in (1, inf)".into()));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidArgument("alpha grid is empty".into()));
        }
        let one = BigRational::one();
        if self
            .alpha_grid
            .iter()
            .any(|a| !a.is_positive() || *a >= one)
        {
            return Err(Error::InvalidArgument(
                "alpha grid entries must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// `max over the grid of 1/(α^n + g(1-α)^2)`, computed exactly; the first
/// maximising α is returned. The `p`-dependent constant is not included.
pub fn lp_lower_bound(q: &LpBoundQuery) -> Result<(BigRational, BigRational)> {
    q.validate()?;
    let one = BigRational::one();
    let mut best: Option<(BigRational, BigRational)> = None;
    for a in &q.alpha_grid {
        let om = &one - a;
        let den = num_traits::pow::pow(a.clone(), q.n as usize) + &q.g * &om * &om;
        let val = den.recip();
        if best.as_ref().is_none_or(|(_, b)| val > *b) {
            best = Some((a.clone(), val));
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Coefficient `α^n + g(1-α)^2` of the level-set inequality.
pub fn hr_coefficient(alpha: &BigRational, n: u32, g: &BigRational) -> BigRational {
    let om = BigRational::one() - alpha;
    num_traits::pow::pow(alpha.clone(), n as usize) + g * &om * &om
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pairs_follow_the_convention() {
        let all: Vec<_> = admissible_pairs(5, IndexConvention::AllKl).collect();
        assert_eq!(all, [(1, 1), (1, 2), (2, 1), (3, 1)]);
        let lk: Vec<_> = admissible_pairs(5, IndexConvention::LLeK).collect();
        assert_eq!(lk, [(1, 1), (2, 1), (3, 1)]);
    }

    #[test]
    fn small_examples() {
        let r = perron_factor(
            &SlopeSet::from_ints(&[1, 2, 4]).unwrap(),
            IndexConvention::AllKl,
        )
        .unwrap();
        assert_eq!(r.g, Real::Exact(q(5, 2)));
        assert_eq!((r.argmax_k, r.argmax_l), (1, 1));
        let r = perron_factor(
            &SlopeSet::from_ints(&[0, 1, 2]).unwrap(),
            IndexConvention::AllKl,
        )
        .unwrap();
        assert_eq!(r.g, Real::Exact(q(2, 1)));
        let err = perron_factor(
            &SlopeSet::from_ints(&[1, 2]).unwrap(),
            IndexConvention::AllKl,
        );
        assert_eq!(
            err,
            Err(Error::CardinalityTooSmall {
                found: 2,
                required: 3
            })
        );
    }

    #[test]
    fn unsorted_input_is_rejected() {
        assert_eq!(
            SlopeSet::from_ints(&[1, 3, 2]),
            Err(Error::NotSorted { index: 2 })
        );
        assert_eq!(
            SlopeSet::from_ints(&[1, 1]),
            Err(Error::NotSorted { index: 1 })
        );
    }

    #[test]
    fn huge_denominators_take_the_bigint_path() {
        let v: Vec<BigRational> = (1..=5)
            .map(|k| q(k, 1) + q(1, 1 << 40) * q(1, 1 << 40) * q(k * k, 1))
            .collect();
        let r = perron_factor(
            &SlopeSet::from_rationals(v.clone()).unwrap(),
            IndexConvention::AllKl,
        )
        .unwrap();
        let t = perron_factor_with_table(
            &SlopeSet::from_rationals(v).unwrap(),
            IndexConvention::AllKl,
        )
        .unwrap();
        let max = t
            .ratio_table
            .unwrap()
            .into_iter()
            .map(|e| e.forward.mid() + e.backward.mid())
            .max()
            .unwrap();
        assert_eq!(r.g, Real::Exact(max));
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let mut c = [0, 1];
        let mut seen = alloc::vec![c.to_vec()];
        while next_combination(&mut c, 4) {
            seen.push(c.to_vec());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[5], [2, 3]);
    }

    #[test]
    fn lp_bound_on_a_single_grid_point() {
        let query = LpBoundQuery {
            g: q(2, 1),
            n: 2,
            p: 2.0,
            alpha_grid: alloc::vec![q(1, 2)],
        };
        assert_eq!(lp_lower_bound(&query).unwrap(), (q(1, 2), q(4, 3)));
    }
}
