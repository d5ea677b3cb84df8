//! Lacunary sequences and the lacunary order of finite sets.
//!
//! A set has order 0 when it has at most one point. It has order at most
//! `N + 1` when some lacunary sequence `L` converging to `ℓ` cuts it so that
//! every gap of `L ∪ {ℓ} ∪ {±∞}` meets the set in a set of order at most `N`.
//! Points lying on `L ∪ {ℓ}` belong to no gap.
//!
//! The search runs over a normalized family. The limit `ℓ` is a point of the
//! set or a midpoint between consecutive points, and `L` is one of:
//!
//! - a one-sided sequence made of points of the set plus the geometric fill
//!   `ℓ ± d·r^q` hung off them, which refines every monotone selection from
//!   the set (extra cuts never raise the order); everything beyond `ℓ` is a
//!   single gap;
//! - a selection of points of the set on both sides of `ℓ`, lacunary in the
//!   order of decreasing distance.
//!
//! The result is exact relative to this family.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::real::rational_to_f64;
use crate::slopes::SlopeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LacunaritySpec {
    /// Contraction ratio in `(0, 1)`.
    pub ratio: BigRational,
    pub max_order: u32,
    /// Number of parts allowed in a finite cover.
    pub max_cover: usize,
    /// Work budget (candidate point evaluations, or order checks for covers).
    pub budget: u64,
}

impl Default for LacunaritySpec {
    fn default() -> Self {
        LacunaritySpec {
            ratio: BigRational::new(1.into(), 2.into()),
            max_order: 16,
            max_cover: 4,
            budget: 20_000_000_000,
        }
    }
}

impl LacunaritySpec {
    pub fn validate(&self) -> Result<()> {
        if !self.ratio.is_positive() || self.ratio >= BigRational::one() {
            return Err(Error::InvalidArgument("ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// `|ℓ - s_{k+1}| <= ratio·|ℓ - s_k|` for every consecutive pair.
pub fn is_lacunary_sequence(
    seq: &[BigRational],
    limit: &BigRational,
    spec: &LacunaritySpec,
) -> bool {
    seq.windows(2)
        .all(|w| (limit - &w[1]).abs() <= &spec.ratio * (limit - &w[0]).abs())
}

/// Largest set handled by the exhaustive search.
pub const EXACT_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u32),
    /// Larger than the given `max_order`.
    Exceeds(u32),
}

/// Where the cutting sequence lies relative to its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Limit of a cutting sequence: a point of the set or a midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// The point with this index (absorbed).
    Point(usize),
    /// Midpoint of points `i` and `i + 1`.
    Mid(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessNode {
    /// Inclusive index range into the sorted set.
    pub first: usize,
    pub last: usize,
    pub order: u32,
    /// `None` for leaves (at most one point).
    pub cut: Option<Cut>,
    pub children: Vec<WitnessNode>,
}

/// Shape of a cutting sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutKind {
    /// The point cuts plus the geometric fill `ℓ ± d·r^q` hung off them:
    /// outward from the outermost point cut, between consecutive point cuts
    /// down to the last position that still reaches the next one, and inward
    /// from the innermost.
    Fill(Side),
    /// Exactly the point cuts, on either side.
    Selection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub anchor: Anchor,
    pub limit: BigRational,
    pub kind: CutKind,
    /// Indices of the set lying on the sequence, outermost first.
    pub point_cuts: Vec<usize>,
    /// Indices lying on `L ∪ {ℓ}`.
    pub absorbed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LacunarityReport {
    pub order: Order,
    pub witness_tree: Option<WitnessNode>,
    /// Exhaustive over the normalized family (false for the greedy mode).
    pub exact: bool,
    /// Candidate evaluations performed.
    pub work: u64,
    /// The family of cutting sequences searched.
    pub normalization: &'static str,
}

pub const NORMALIZATION: &str = "limit at a point or a midpoint of the set; cutting sequence \
either one-sided, made of points of the set plus the geometric fill l ± d·r^q between and beyond \
them (the far side of the limit is a single gap), or a two-sided selection of points of the set";

#[derive(Clone, Debug, PartialEq, Eq)]
struct Plan {
    anchor: Anchor,
    kind: CutKind,
    cuts: Vec<usize>,
}

/// Per-set precomputation shared by every run.
struct Geometry<'a> {
    x: &'a [BigRational],
    /// `ln(1/r)`.
    log_inv_r: f64,
    ratio: &'a BigRational,
    /// `ln |x_j - x_i|` for `i != j`.
    ln_pt: Vec<f64>,
    /// `ln |x_j - m_i|` with `m_i` the midpoint of `x_i, x_{i+1}`.
    ln_mid: Vec<f64>,
    n: usize,
}

const NEAR_INTEGER: f64 = 1e-9;

fn half(q: BigRational) -> BigRational {
    q / BigRational::from_integer(BigInt::from(2))
}

impl<'a> Geometry<'a> {
    fn new(x: &'a [BigRational], ratio: &'a BigRational) -> Self {
        let n = x.len();
        let mut ln_pt = vec![f64::NAN; n * n];
        let mut ln_mid = vec![f64::NAN; n * n];
        for i in 0..n {
            let m = (i + 1 < n).then(|| half(&x[i] + &x[i + 1]));
            for j in 0..n {
                if i != j {
                    ln_pt[i * n + j] = libm::log(rational_to_f64(&(&x[j] - &x[i]).abs()));
                }
                if let Some(m) = &m {
                    ln_mid[i * n + j] = libm::log(rational_to_f64(&(&x[j] - m).abs()));
                }
            }
        }
        let log_inv_r = -libm::log(rational_to_f64(ratio));
        Geometry {
            x,
            log_inv_r,
            ratio,
            ln_pt,
            ln_mid,
            n,
        }
    }

    fn limit(&self, a: Anchor) -> BigRational {
        match a {
            Anchor::Point(i) => self.x[i].clone(),
            Anchor::Mid(i) => half(&self.x[i] + &self.x[i + 1]),
        }
    }

    fn ln_dist(&self, a: Anchor, j: usize) -> f64 {
        match a {
            Anchor::Point(i) => self.ln_pt[i * self.n + j],
            Anchor::Mid(i) => self.ln_mid[i * self.n + j],
        }
    }

    /// Lattice position of point `j` relative to point `p`:
    /// `(floor(log_{1/r}(d_p/d_j)), on_lattice)`, positive for `j` closer to
    /// the limit.
    fn shell(&self, a: Anchor, p: usize, j: usize) -> (i64, bool) {
        let q = (self.ln_dist(a, p) - self.ln_dist(a, j)) / self.log_inv_r;
        let k = libm::round(q);
        if (q - k).abs() > NEAR_INTEGER * (1.0 + k.abs()) {
            return (libm::floor(q) as i64, false);
        }
        // settle near-integer cases exactly: compare d_j/d_p with r^k
        let k = k as i64;
        let l = self.limit(a);
        let ratio = (&self.x[j] - &l).abs() / (&self.x[p] - &l).abs();
        let rk = rpow(self.ratio, k);
        match ratio.cmp(&rk) {
            // d_j = d_p r^k
            core::cmp::Ordering::Equal => (k, true),
            // d_j > d_p r^k: q < k
            core::cmp::Ordering::Greater => (k - 1, false),
            core::cmp::Ordering::Less => (k, false),
        }
    }
}

fn rpow(r: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow::pow(r.clone(), k as usize)
    } else {
        num_traits::pow::pow(r.recip(), (-k) as usize)
    }
}

/// The gap on the far side of the limit (if non-empty) and the indices on
/// the cut side, outermost first.
fn split(i: usize, j: usize, a: Anchor, side: Side) -> (Option<(usize, usize)>, Vec<usize>) {
    let range = |lo: usize, hi: Option<usize>| hi.filter(|&h| lo <= h).map(|h| (lo, h));
    match (a, side) {
        (Anchor::Point(e), Side::Above) => {
            (range(i, e.checked_sub(1)), (e + 1..=j).rev().collect())
        }
        (Anchor::Point(e), Side::Below) => (range(e + 1, Some(j)), (i..e).collect()),
        (Anchor::Mid(e), Side::Above) => (range(i, Some(e)), (e + 1..=j).rev().collect()),
        (Anchor::Mid(e), Side::Below) => (range(e + 1, Some(j)), (i..=e).collect()),
    }
}

/// Pieces cut from run `[i, j]` by a plan, as inclusive index ranges, with
/// the absorbed indices.
fn plan_pieces(g: &Geometry, i: usize, j: usize, plan: &Plan) -> (Vec<(usize, usize)>, Vec<usize>) {
    match plan.kind {
        CutKind::Fill(side) => fill_pieces(g, i, j, plan, side),
        CutKind::Selection => selection_pieces(i, j, plan),
    }
}

fn fill_pieces(
    g: &Geometry,
    i: usize,
    j: usize,
    plan: &Plan,
    side: Side,
) -> (Vec<(usize, usize)>, Vec<usize>) {
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Key {
        Shell(usize, i64),
        Tail(usize),
    }
    let (other, pts) = split(i, j, plan.anchor, side);
    let mut out: Vec<(usize, usize)> = other.into_iter().collect();
    let mut absorbed = Vec::new();
    if let Anchor::Point(e) = plan.anchor {
        absorbed.push(e);
    }
    let pos: Vec<usize> = plan
        .cuts
        .iter()
        .map(|c| pts.iter().position(|p| p == c).expect("cut on its side"))
        .collect();
    let a = plan.anchor;
    let mut cur: Option<(Key, usize, usize)> = None;
    let flush = |cur: &mut Option<(Key, usize, usize)>, out: &mut Vec<(usize, usize)>| {
        if let Some((_, u, v)) = cur.take() {
            out.push((u.min(v), u.max(v)));
        }
    };
    for (p, &pt) in pts.iter().enumerate() {
        let key = if pos.is_empty() {
            Some(Key::Tail(0))
        } else if pos.contains(&p) {
            None
        } else if p < pos[0] {
            let (f, on) = g.shell(a, pts[pos[0]], pt);
            (!on).then_some(Key::Shell(0, f))
        } else {
            let s = pos
                .iter()
                .rposition(|&c| c < p)
                .expect("after the first cut");
            let k = pts[pos[s]];
            let (f, on) = g.shell(a, k, pt);
            match pos.get(s + 1) {
                Some(&nx) => {
                    let lim = g.shell(a, k, pts[nx]).0 - 1;
                    if f < lim || (on && f == lim) {
                        (!on).then_some(Key::Shell(s + 1, f))
                    } else {
                        Some(Key::Tail(s + 1))
                    }
                }
                None => (!on).then_some(Key::Shell(s + 1, f)),
            }
        };
        match key {
            None => {
                absorbed.push(pt);
                flush(&mut cur, &mut out);
            }
            Some(k) => match &mut cur {
                Some((ck, _, v)) if *ck == k => *v = pt,
                _ => {
                    flush(&mut cur, &mut out);
                    cur = Some((k, pt, pt));
                }
            },
        }
    }
    flush(&mut cur, &mut out);
    absorbed.sort_unstable();
    (out, absorbed)
}

struct Table {
    n: usize,
    ord: Vec<u32>,
    plan: Vec<Option<Plan>>,
}

impl Table {
    fn get(&self, i: usize, j: usize) -> u32 {
        if i >= j || j >= self.n {
            0
        } else {
            self.ord[i * self.n + j]
        }
    }
}

/// Groups of consecutive off-lattice positions sharing a shell:
/// `(start, end, order)` over `range` (positions into `pts`).
fn shell_groups(
    t: &Table,
    pts: &[usize],
    fl: &[i64],
    on: &[bool],
    range: core::ops::Range<usize>,
) -> Vec<(usize, usize, u32)> {
    let ordp = |u: usize, v: usize| t.get(pts[u].min(pts[v]), pts[u].max(pts[v]));
    let mut out = Vec::new();
    let mut cur: Option<(i64, usize)> = None;
    let end = range.end;
    for q in range {
        if on[q] {
            if let Some((_, st)) = cur.take() {
                out.push((st, q - 1, ordp(st, q - 1)));
            }
            continue;
        }
        match cur {
            Some((f, _)) if f == fl[q] => {}
            Some((_, st)) => {
                out.push((st, q - 1, ordp(st, q - 1)));
                cur = Some((fl[q], q));
            }
            None => cur = Some((fl[q], q)),
        }
    }
    if let Some((_, st)) = cur {
        out.push((st, end - 1, ordp(st, end - 1)));
    }
    out
}

/// Best plan for a fixed limit and side: the largest piece order it leaves
/// (the gap beyond the limit included) and its point cuts.
fn best_plan(
    g: &Geometry,
    t: &Table,
    i: usize,
    j: usize,
    a: Anchor,
    side: Side,
) -> (u32, Vec<usize>, u64) {
    let (other, pts) = split(i, j, a, side);
    let base = other.map_or(0, |(u, v)| t.get(u, v));
    let m = pts.len();
    if m == 0 {
        return (base, Vec::new(), 1);
    }
    let ordp = |u: usize, v: usize| t.get(pts[u].min(pts[v]), pts[u].max(pts[v]));
    let mut fl = vec![0i64; m * m];
    let mut on = vec![false; m * m];
    for k in 0..m {
        for q in 0..m {
            if q != k {
                let (f, o) = g.shell(a, pts[k], pts[q]);
                fl[k * m + q] = f;
                on[k * m + q] = o;
            }
        }
    }
    // f[k]: best over what lies inward of a point cut at position k
    let mut f = vec![0u32; m];
    let mut next = vec![usize::MAX; m];
    for k in (0..m).rev() {
        let row_f = &fl[k * m..(k + 1) * m];
        let row_on = &on[k * m..(k + 1) * m];
        let groups = shell_groups(t, &pts, row_f, row_on, k + 1..m);
        let mut best = groups.iter().map(|x| x.2).max().unwrap_or(0);
        let mut nx = usize::MAX;
        let (mut s, mut gi, mut pre) = (k + 1, 0, 0u32);
        for mm in k + 1..m {
            // the next point cut must lie within ratio of this one
            if row_f[mm] < 1 {
                continue;
            }
            let lim = row_f[mm] - 1;
            while s < mm && (row_f[s] < lim || (row_on[s] && row_f[s] == lim)) {
                s += 1;
            }
            while gi < groups.len() && groups[gi].1 < s {
                pre = pre.max(groups[gi].2);
                gi += 1;
            }
            let tail = if s < mm { ordp(s, mm - 1) } else { 0 };
            let v = pre.max(tail).max(f[mm]);
            if v < best {
                best = v;
                nx = mm;
            }
        }
        f[k] = best;
        next[k] = nx;
    }
    let mut best: Option<(u32, usize)> = None;
    for k in 0..m {
        let up = shell_groups(
            t,
            &pts,
            &fl[k * m..(k + 1) * m],
            &on[k * m..(k + 1) * m],
            0..k,
        )
        .iter()
        .map(|x| x.2)
        .max()
        .unwrap_or(0);
        let v = up.max(f[k]);
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, k));
        }
    }
    let (v, mut k) = best.expect("m > 0");
    let mut cuts = vec![pts[k]];
    while next[k] != usize::MAX {
        k = next[k];
        cuts.push(pts[k]);
    }
    (v.max(base), cuts, (m * m) as u64)
}

/// Points strictly between two cuts on one side of the limit; `None` stands
/// for infinity as the outer end and for the limit as the inner end.
#[derive(Clone, Copy)]
struct SideSpan {
    above: bool,
    /// Innermost and outermost indices on this side.
    inner: isize,
    outer: isize,
}

impl SideSpan {
    fn piece(&self, outer_cut: Option<usize>, inner_cut: Option<usize>) -> Option<(usize, usize)> {
        let (lo, hi) = if self.above {
            (
                inner_cut.map_or(self.inner, |c| c as isize + 1),
                outer_cut.map_or(self.outer, |c| c as isize - 1),
            )
        } else {
            (
                outer_cut.map_or(self.outer, |c| c as isize + 1),
                inner_cut.map_or(self.inner, |c| c as isize - 1),
            )
        };
        (lo <= hi).then_some((lo as usize, hi as usize))
    }
}

fn spans(i: usize, j: usize, a: Anchor) -> (SideSpan, SideSpan) {
    let (below_inner, above_inner) = match a {
        Anchor::Point(e) => (e as isize - 1, e as isize + 1),
        Anchor::Mid(e) => (e as isize, e as isize + 1),
    };
    (
        SideSpan {
            above: false,
            inner: below_inner,
            outer: i as isize,
        },
        SideSpan {
            above: true,
            inner: above_inner,
            outer: j as isize,
        },
    )
}

fn anchor_pos(a: Anchor) -> (usize, bool) {
    match a {
        Anchor::Point(e) => (e, true),
        Anchor::Mid(e) => (e, false),
    }
}

fn selection_pieces(i: usize, j: usize, plan: &Plan) -> (Vec<(usize, usize)>, Vec<usize>) {
    let (below, above) = spans(i, j, plan.anchor);
    let (e, on_point) = anchor_pos(plan.anchor);
    let mut out = Vec::new();
    let mut absorbed: Vec<usize> = plan.cuts.clone();
    if on_point {
        absorbed.push(e);
    }
    for span in [below, above] {
        let cuts: Vec<usize> = plan
            .cuts
            .iter()
            .copied()
            .filter(|&c| (c > e) == span.above)
            .collect();
        let mut prev = None;
        for c in cuts {
            out.extend(span.piece(prev, Some(c)));
            prev = Some(c);
        }
        out.extend(span.piece(prev, None));
    }
    absorbed.sort_unstable();
    (out, absorbed)
}

/// Best two-sided selection of points for a fixed limit.
fn best_selection(
    g: &Geometry,
    t: &Table,
    i: usize,
    j: usize,
    a: Anchor,
) -> (u32, Vec<usize>, u64) {
    let (below, above) = spans(i, j, a);
    let (e, on_point) = anchor_pos(a);
    let mut pts: Vec<usize> = (i..=j).filter(|&k| !(on_point && k == e)).collect();
    pts.sort_by(|&u, &v| g.ln_dist(a, v).total_cmp(&g.ln_dist(a, u)));
    let m = pts.len();
    let ord = |p: Option<(usize, usize)>| p.map_or(0, |(u, v)| t.get(u, v));
    let span_of = |k: usize| if k > e { above } else { below };
    let whole = ord(above.piece(None, None)).max(ord(below.piece(None, None)));
    if m == 0 {
        return (whole, Vec::new(), 1);
    }
    // reach[k * m + k2]: the cut at k2 may follow the cut at k
    let mut reach = vec![false; m * m];
    for k in 0..m {
        for k2 in k + 1..m {
            reach[k * m + k2] = g.shell(a, pts[k], pts[k2]).0 >= 1;
        }
    }
    // state (k, o): last cut at position k, last cut on the other side at
    // position o - 1 (o = 0: none yet)
    let w = m + 1;
    let mut f = vec![u32::MAX; m * w];
    let mut next = vec![usize::MAX; m * w];
    for k in (0..m).rev() {
        let here = pts[k];
        let sp = span_of(here);
        for o in 0..=k {
            if o > 0 && (pts[o - 1] > e) == (here > e) {
                continue;
            }
            let other_cut = o.checked_sub(1).map(|p| pts[p]);
            let other_sp = if here > e { below } else { above };
            let mut best =
                ord(sp.piece(Some(here), None)).max(ord(other_sp.piece(other_cut, None)));
            let mut nx = usize::MAX;
            for k2 in k + 1..m {
                if !reach[k * m + k2] {
                    continue;
                }
                let c2 = pts[k2];
                let (closed, state) = if (c2 > e) == (here > e) {
                    (ord(sp.piece(Some(here), Some(c2))), k2 * w + o)
                } else {
                    (ord(other_sp.piece(other_cut, Some(c2))), k2 * w + k + 1)
                };
                let v = closed.max(f[state]);
                if v < best {
                    best = v;
                    nx = k2;
                }
            }
            f[k * w + o] = best;
            next[k * w + o] = nx;
        }
    }
    let mut best = (whole, usize::MAX);
    for k in 0..m {
        let v = ord(span_of(pts[k]).piece(None, Some(pts[k]))).max(f[k * w]);
        if v < best.0 {
            best = (v, k);
        }
    }
    let mut cuts = Vec::new();
    if best.1 != usize::MAX {
        let (mut k, mut o) = (best.1, 0usize);
        loop {
            cuts.push(pts[k]);
            let k2 = next[k * w + o];
            if k2 == usize::MAX {
                break;
            }
            if (pts[k2] > e) != (pts[k] > e) {
                o = k + 1;
            }
            k = k2;
        }
    }
    (best.0, cuts, (m * m * m / 2 + 1) as u64)
}

fn exact_table(g: &Geometry, budget: u64, work: &mut u64) -> Result<Table> {
    let n = g.n;
    let mut t = Table {
        n,
        ord: vec![0; n * n],
        plan: vec![None; n * n],
    };
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            let mut best: Option<(u32, Plan)> = None;
            let anchors = (i..=j).map(Anchor::Point).chain((i..j).map(Anchor::Mid));
            'search: for a in anchors {
                let kinds = [
                    CutKind::Fill(Side::Above),
                    CutKind::Fill(Side::Below),
                    CutKind::Selection,
                ];
                for kind in kinds {
                    let (v, cuts, w) = match kind {
                        CutKind::Fill(side) => best_plan(g, &t, i, j, a, side),
                        CutKind::Selection => best_selection(g, &t, i, j, a),
                    };
                    *work += w;
                    if *work > budget {
                        return Err(Error::SearchBudgetExceeded { budget });
                    }
                    if best.as_ref().is_none_or(|(b, _)| v + 1 < *b) {
                        best = Some((
                            v + 1,
                            Plan {
                                anchor: a,
                                kind,
                                cuts,
                            },
                        ));
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
            let (v, p) = best.expect("runs of length >= 2 have candidates");
            t.ord[i * n + j] = v;
            t.plan[i * n + j] = Some(p);
        }
    }
    Ok(t)
}

fn build_tree(g: &Geometry, t: &Table, i: usize, j: usize) -> WitnessNode {
    if i >= j {
        return leaf(i, j);
    }
    let plan = t.plan[i * t.n + j].clone().expect("filled");
    let (ps, absorbed) = plan_pieces(g, i, j, &plan);
    let children: Vec<WitnessNode> = ps.iter().map(|&(a, b)| build_tree(g, t, a, b)).collect();
    debug_assert_eq!(
        1 + children.iter().map(|c| c.order).max().unwrap_or(0),
        t.get(i, j)
    );
    WitnessNode {
        first: i,
        last: j,
        order: t.get(i, j),
        cut: Some(make_cut(g, plan, absorbed)),
        children,
    }
}

fn leaf(i: usize, j: usize) -> WitnessNode {
    WitnessNode {
        first: i,
        last: j,
        order: 0,
        cut: None,
        children: Vec::new(),
    }
}

fn make_cut(g: &Geometry, plan: Plan, absorbed: Vec<usize>) -> Cut {
    Cut {
        anchor: plan.anchor,
        limit: g.limit(plan.anchor),
        kind: plan.kind,
        point_cuts: plan.cuts,
        absorbed,
    }
}

/// Lacunary order of `s` under the normalized search. Exhaustive for
/// `|s| <= 64`, greedy beyond.
pub fn lacunary_order(s: &SlopeSet, spec: &LacunaritySpec) -> Result<LacunarityReport> {
    order_of_points(&points_of(s), spec)
}

fn points_of(s: &SlopeSet) -> Vec<BigRational> {
    match s.rationals() {
        Some(v) => v,
        None => s.values().iter().map(|v| v.mid()).collect(),
    }
}

/// As [`lacunary_order`] on sorted, distinct points.
pub fn order_of_points(x: &[BigRational], spec: &LacunaritySpec) -> Result<LacunarityReport> {
    spec.validate()?;
    if let Some(k) = x.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::NotSorted { index: k + 1 });
    }
    let n = x.len();
    let cap = |o: u32| {
        if o > spec.max_order {
            Order::Exceeds(spec.max_order)
        } else {
            Order::Finite(o)
        }
    };
    if n <= 1 {
        let tree = (n == 1).then(|| leaf(0, 0));
        return Ok(LacunarityReport {
            order: cap(0),
            witness_tree: tree,
            exact: true,
            work: 0,
            normalization: NORMALIZATION,
        });
    }
    let g = Geometry::new(x, &spec.ratio);
    let mut work = 0u64;
    if n <= EXACT_LIMIT {
        let t = exact_table(&g, spec.budget, &mut work)?;
        let tree = build_tree(&g, &t, 0, n - 1);
        Ok(LacunarityReport {
            order: cap(t.get(0, n - 1)),
            witness_tree: Some(tree),
            exact: true,
            work,
            normalization: NORMALIZATION,
        })
    } else {
        let tree = greedy(&g, 0, n - 1, spec.budget, &mut work)?;
        Ok(LacunarityReport {
            order: cap(tree.order),
            witness_tree: Some(tree),
            exact: false,
            work,
            normalization: NORMALIZATION,
        })
    }
}

/// Top-down: at each run keep the single-lattice cut with the smallest
/// largest piece.
fn greedy(g: &Geometry, i: usize, j: usize, budget: u64, work: &mut u64) -> Result<WitnessNode> {
    if i >= j {
        return Ok(leaf(i, j));
    }
    let mut best: Option<(usize, usize, Plan)> = None;
    for e in i..=j {
        for side in [Side::Above, Side::Below] {
            let (_, pts) = split(i, j, Anchor::Point(e), side);
            if pts.is_empty() {
                continue;
            }
            // a handful of phases: the innermost point and a few spread out
            let m = pts.len();
            let mut phases: Vec<usize> = (0..5).map(|q| pts[m - 1 - (q * (m - 1)) / 4]).collect();
            phases.dedup();
            for p in phases {
                *work += (j - i + 1) as u64;
                if *work > budget {
                    return Err(Error::SearchBudgetExceeded { budget });
                }
                let plan = Plan {
                    anchor: Anchor::Point(e),
                    kind: CutKind::Fill(side),
                    cuts: vec![p],
                };
                let (ps, _) = plan_pieces(g, i, j, &plan);
                let largest = ps.iter().map(|&(a, b)| b - a + 1).max().unwrap_or(0);
                let total: usize = ps.iter().map(|&(a, b)| b - a + 1).sum();
                if best
                    .as_ref()
                    .is_none_or(|(l, tt, _)| (largest, total) < (*l, *tt))
                {
                    best = Some((largest, total, plan));
                }
            }
        }
    }
    let (_, _, plan) = best.expect("run of length >= 2");
    let (ps, absorbed) = plan_pieces(g, i, j, &plan);
    let mut children = Vec::with_capacity(ps.len());
    for (a, b) in ps {
        children.push(greedy(g, a, b, budget, work)?);
    }
    let order = 1 + children.iter().map(|c| c.order).max().unwrap_or(0);
    Ok(WitnessNode {
        first: i,
        last: j,
        order,
        cut: Some(make_cut(g, plan, absorbed)),
        children,
    })
}

impl Cut {
    /// The elements of the cutting sequence that matter for the points
    /// `x[first..=last]`, outermost first.
    pub fn sequence(
        &self,
        x: &[BigRational],
        first: usize,
        last: usize,
        ratio: &BigRational,
    ) -> Vec<BigRational> {
        let side = match self.kind {
            CutKind::Fill(side) => side,
            CutKind::Selection => return self.point_cuts.iter().map(|&k| x[k].clone()).collect(),
        };
        let sign = match side {
            Side::Above => BigRational::one(),
            Side::Below => -BigRational::one(),
        };
        let dist = |k: usize| (&x[k] - &self.limit).abs();
        let side_d: Vec<BigRational> = (first..=last)
            .filter(|&k| match side {
                Side::Above => x[k] > self.limit,
                Side::Below => x[k] < self.limit,
            })
            .map(dist)
            .collect();
        let (Some(dmax), Some(dmin)) = (side_d.iter().max(), side_d.iter().min()) else {
            return Vec::new();
        };
        let mut d: Vec<BigRational> = Vec::new();
        let Some(&c0) = self.point_cuts.first() else {
            return Vec::new();
        };
        // outward fill, one element past the outermost point
        let d0 = dist(c0);
        let mut up = Vec::new();
        let mut v = d0.clone();
        while &v <= dmax {
            v = &v / ratio;
            up.push(v.clone());
        }
        up.reverse();
        d.extend(up);
        d.push(d0);
        for w in self.point_cuts.windows(2) {
            let (ds, dn) = (dist(w[0]), dist(w[1]));
            let mut v = &ds * ratio;
            while &(&v * ratio) >= &dn {
                d.push(v.clone());
                v = &v * ratio;
            }
            d.push(dn);
        }
        // inward fill until below the innermost point
        let mut v = d.last().expect("non-empty").clone();
        while &v >= dmin {
            v = &v * ratio;
            d.push(v.clone());
        }
        d.into_iter().map(|d| &self.limit + &sign * d).collect()
    }
}

/// Checks a witness tree against the definition directly: every cutting
/// sequence is lacunary toward its limit, the children are exactly the
/// points in the gaps of `L ∪ {ℓ} ∪ {±∞}`, and orders add up.
pub fn verify_witness(x: &[BigRational], node: &WitnessNode, ratio: &BigRational) -> bool {
    let Some(cut) = &node.cut else {
        return node.order == 0
            && node.children.is_empty()
            && node.last.saturating_sub(node.first) == 0;
    };
    let spec = LacunaritySpec {
        ratio: ratio.clone(),
        ..LacunaritySpec::default()
    };
    let seq = cut.sequence(x, node.first, node.last, ratio);
    if !is_lacunary_sequence(&seq, &cut.limit, &spec) {
        return false;
    }
    let mut bounds: Vec<&BigRational> = seq.iter().chain(core::iter::once(&cut.limit)).collect();
    bounds.sort();
    let mut gaps: Vec<(usize, usize)> = Vec::new();
    let mut absorbed = Vec::new();
    let mut cur: Option<(usize, usize, usize)> = None;
    for k in node.first..=node.last {
        let gap = bounds.partition_point(|b| *b < &x[k]);
        if bounds.get(gap).is_some_and(|b| *b == &x[k]) {
            absorbed.push(k);
            continue;
        }
        match &mut cur {
            Some((g0, _, e)) if *g0 == gap => *e = k,
            _ => {
                if let Some((_, s, e)) = cur.take() {
                    gaps.push((s, e));
                }
                cur = Some((gap, k, k));
            }
        }
    }
    if let Some((_, s, e)) = cur {
        gaps.push((s, e));
    }
    let mut kids: Vec<(usize, usize)> = node.children.iter().map(|c| (c.first, c.last)).collect();
    kids.sort_unstable();
    let expected = 1 + node.children.iter().map(|c| c.order).max().unwrap_or(0);
    kids == gaps
        && absorbed == cut.absorbed
        && node.order == expected
        && node.children.iter().all(|c| verify_witness(x, c, ratio))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverOutcome {
    /// Parts as sorted index lists with their orders.
    Cover {
        parts: Vec<Vec<usize>>,
        orders: Vec<u32>,
        attempts: u64,
    },
    /// The bounded search found nothing. This is not a proof that no cover
    /// exists.
    Failure {
        attempts: u64,
        budget: u64,
        best_partial: Vec<Vec<usize>>,
    },
}

/// Partition of `s` into at most `max_cover` parts each of order at most
/// `max_order`, by bounded depth-first search.
pub fn finitely_lacunary_cover(s: &SlopeSet, spec: &LacunaritySpec) -> Result<CoverOutcome> {
    spec.validate()?;
    let x = points_of(s);
    let n = x.len();
    if spec.max_order == 0 && spec.max_cover >= n {
        let parts: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        return Ok(CoverOutcome::Cover {
            orders: vec![0; n],
            parts,
            attempts: 0,
        });
    }
    let mut st = CoverSearch {
        x: &x,
        spec,
        attempts: 0,
        best_partial: Vec::new(),
        best_count: 0,
    };
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let found = st.dfs(0, &mut parts)?;
    match found {
        Some(orders) => Ok(CoverOutcome::Cover {
            parts,
            orders,
            attempts: st.attempts,
        }),
        None => Ok(CoverOutcome::Failure {
            attempts: st.attempts,
            budget: spec.budget,
            best_partial: st.best_partial,
        }),
    }
}

struct CoverSearch<'a> {
    x: &'a [BigRational],
    spec: &'a LacunaritySpec,
    attempts: u64,
    best_partial: Vec<Vec<usize>>,
    best_count: usize,
}

impl CoverSearch<'_> {
    fn order_of(&mut self, part: &[usize]) -> Result<Option<u32>> {
        self.attempts += 1;
        if self.attempts > self.spec.budget {
            return Ok(None);
        }
        let pts: Vec<BigRational> = part.iter().map(|&i| self.x[i].clone()).collect();
        let inner = LacunaritySpec {
            budget: u64::MAX,
            ..self.spec.clone()
        };
        match order_of_points(&pts, &inner)?.order {
            Order::Finite(o) => Ok(Some(o)),
            Order::Exceeds(_) => Ok(Some(u32::MAX)),
        }
    }

    /// `Ok(Some(orders))` on success (parts filled), `Ok(None)` when
    /// exhausted or out of budget.
    fn dfs(&mut self, next: usize, parts: &mut Vec<Vec<usize>>) -> Result<Option<Vec<u32>>> {
        if next == self.x.len() {
            let mut orders = Vec::with_capacity(parts.len());
            for p in parts.clone() {
                match self.order_of(&p)? {
                    Some(o) => orders.push(o),
                    None => return Ok(None),
                }
            }
            return Ok(Some(orders));
        }
        if next > self.best_count {
            self.best_count = next;
            self.best_partial = parts.clone();
        }
        let k = parts.len();
        for t in 0..=k {
            if t == k && k >= self.spec.max_cover {
                break;
            }
            if t == k {
                parts.push(vec![next]);
            } else {
                parts[t].push(next);
            }
            let ok = if parts[t].len() <= 1 {
                true
            } else {
                let p = parts[t].clone();
                match self.order_of(&p)? {
                    Some(o) => o <= self.spec.max_order,
                    None => return Ok(None),
                }
            };
            if ok {
                if let Some(o) = self.dfs(next + 1, parts)? {
                    return Ok(Some(o));
                }
                if self.attempts > self.spec.budget {
                    return Ok(None);
                }
            }
            if t == k {
                parts.pop();
            } else {
                parts[t].pop();
            }
        }
        Ok(None)
    }
}

/// Flattened view of a witness tree for display: `(depth, node)`.
pub fn walk(tree: &WitnessNode) -> Vec<(usize, &WitnessNode)> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, tree)];
    while let Some((d, n)) = stack.pop() {
        out.push((d, n));
        for c in n.children.iter().rev() {
            stack.push((d + 1, c));
        }
    }
    out
}

/// `f64` of the ratio, for display.
pub fn ratio_f64(spec: &LacunaritySpec) -> f64 {
    spec.ratio.to_f64().unwrap_or(f64::NAN)
}
