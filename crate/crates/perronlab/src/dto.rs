//! JSON documents. Every number that is not a count or an index is written
//! as a decimal string.

use std::collections::BTreeMap;

use num_rational::BigRational;
use perron_core::decimal::rational_to_decimal;
use perron_core::diophantine::ApproximationWitness;
use perron_core::kakeya::{AreaEstimate, GridParams, HrProbeReport, Scheme};
use perron_core::lacunary::{
    Anchor, CoverOutcome, Cut, CutKind, LacunarityReport, Order, Side, WitnessNode,
};
use perron_core::slopes::{CapacityEstimate, CapacityRecord, PerronReport, SlopeSet};
use perron_core::witness::{
    CertificateRecord, ClaimChecks, OmegaWitness, Theorem1Certificate, Trig,
};
use perron_core::Real;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Significant digits for decimal strings.
pub const SIG_DIGITS: usize = 40;

pub fn dec(r: &Real) -> String {
    r.to_decimal(SIG_DIGITS)
}

pub fn dec_q(q: &BigRational) -> String {
    rational_to_decimal(q, SIG_DIGITS)
}

/// Shortest decimal that reads back as the same `f64`.
pub fn dec_f64(x: f64) -> String {
    format!("{x}")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeSetJson {
    pub values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&SlopeSet> for SlopeSetJson {
    fn from(s: &SlopeSet) -> Self {
        SlopeSetJson {
            values: s.values().iter().map(dec).collect(),
            labels: s.labels().map(<[String]>::to_vec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioRowJson {
    pub k: usize,
    pub l: usize,
    pub forward: String,
    pub backward: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerronJson {
    pub g: String,
    pub k: usize,
    pub l: usize,
    pub convention: String,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<RatioRowJson>>,
    pub set: SlopeSetJson,
    pub config: RunConfig,
}

impl PerronJson {
    pub fn new(r: &PerronReport, set: &SlopeSet, config: &RunConfig) -> Self {
        PerronJson {
            g: dec(&r.g),
            k: r.argmax_k,
            l: r.argmax_l,
            convention: r.index_convention.as_str().into(),
            exact: r.g.is_exact(),
            table: r.ratio_table.as_ref().map(|t| {
                t.iter()
                    .map(|e| RatioRowJson {
                        k: e.k,
                        l: e.l,
                        forward: dec(&e.forward),
                        backward: dec(&e.backward),
                    })
                    .collect()
            }),
            set: set.into(),
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub n: u64,
    pub m: i64,
    pub gap: String,
    pub level: u32,
}

impl From<&ApproximationWitness> for WitnessJson {
    fn from(w: &ApproximationWitness) -> Self {
        WitnessJson {
            n: w.n,
            m: w.m,
            gap: w.gap.to_decimal(SIG_DIGITS),
            level: w.level,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessListJson {
    pub level: u32,
    pub max_n: u64,
    pub witnesses: Vec<WitnessJson>,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimsJson {
    pub claim3: bool,
    pub claim2: bool,
    pub hypothesis_chain: bool,
    pub p2_hypothesis: bool,
    pub ratio_bound: bool,
    pub g_le_6: bool,
    pub identity: bool,
}

impl ClaimsJson {
    fn new(c: &ClaimChecks, p2_hypothesis: bool) -> Self {
        ClaimsJson {
            claim3: c.claim3,
            claim2: c.claim2,
            hypothesis_chain: c.hypothesis_chain,
            p2_hypothesis,
            ratio_bound: c.ratio_bound,
            g_le_6: c.g_le_6,
            identity: c.identity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordJson {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first: Option<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<WitnessJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbed: Option<SlopeSetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_sup: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims: Option<ClaimsJson>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl From<&CertificateRecord> for RecordJson {
    fn from(r: &CertificateRecord) -> Self {
        match &r.witness {
            Some(w) => witness_record(r.n, w, r.pass()),
            None => RecordJson {
                n: r.n,
                a: None,
                first: None,
                step: None,
                elements: None,
                perturbed: None,
                eps_sup: None,
                g: None,
                claims: None,
                pass: false,
                failure: r.failure.as_ref().map(ToString::to_string),
            },
        }
    }
}

fn witness_record(n: u32, w: &OmegaWitness, pass: bool) -> RecordJson {
    RecordJson {
        n,
        a: Some(w.a()),
        first: Some((&w.first).into()),
        step: Some((&w.step).into()),
        elements: Some(w.element_witnesses.iter().map(Into::into).collect()),
        perturbed: Some((&w.set.perturbed_values).into()),
        eps_sup: Some(dec(&w.set.eps_sup)),
        g: w.p2.g.as_ref().map(dec),
        claims: Some(ClaimsJson::new(&w.claims, w.p2.hypothesis)),
        pass,
        failure: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub theorem: String,
    /// `cos` for `{n / cos n}`, `sin` for `{n / sin n}`.
    pub trig: String,
    pub records: Vec<RecordJson>,
    pub conclusion: Option<String>,
    pub pass: bool,
    pub config: RunConfig,
}

impl CertificateJson {
    pub fn new(c: &Theorem1Certificate, trig: Trig, config: &RunConfig) -> Self {
        CertificateJson {
            theorem: "T1".into(),
            trig: match trig {
                Trig::Cos => "cos",
                Trig::Sin => "sin",
            }
            .into(),
            records: c.records.iter().map(Into::into).collect(),
            conclusion: c.conclusion.as_ref().map(dec_q),
            pass: c.pass(),
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityJson {
    pub method: String,
    /// Per `N`: a decimal bound, or `"vacuous"` for two-point sets.
    pub upper_bounds: BTreeMap<u32, String>,
    pub certified_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<SlopeSetJson>,
    pub config: RunConfig,
}

impl CapacityJson {
    pub fn from_estimate(e: &CapacityEstimate, config: &RunConfig) -> Self {
        CapacityJson {
            method: "witness".into(),
            upper_bounds: e
                .upper_bounds
                .iter()
                .map(|(n, r)| {
                    let v = match r {
                        CapacityRecord::Bound(g) => dec(g),
                        CapacityRecord::Vacuous => "vacuous".into(),
                    };
                    (*n, v)
                })
                .collect(),
            certified_bound: e.certified_bound.as_ref().map(dec_q),
            subset: None,
            config: config.clone(),
        }
    }
}

/// An order, or a marker saying the search stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderJson {
    Finite(u32),
    Marker(String),
}

impl From<Order> for OrderJson {
    fn from(o: Order) -> Self {
        match o {
            Order::Finite(k) => OrderJson::Finite(k),
            Order::Exceeds(m) => OrderJson::Marker(format!("exceeds max_order {m}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutJson {
    pub limit: String,
    pub anchor: String,
    pub kind: String,
    pub sequence: Vec<String>,
    pub point_cuts: Vec<usize>,
    pub absorbed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub first: usize,
    pub last: usize,
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeJson>,
}

fn cut_json(c: &Cut, x: &[BigRational], first: usize, last: usize, ratio: &BigRational) -> CutJson {
    CutJson {
        limit: dec_q(&c.limit),
        anchor: match c.anchor {
            Anchor::Point(i) => format!("point {i}"),
            Anchor::Mid(i) => format!("midpoint {i}-{}", i + 1),
        },
        kind: match c.kind {
            CutKind::Fill(Side::Above) => "fill_above",
            CutKind::Fill(Side::Below) => "fill_below",
            CutKind::Selection => "selection",
        }
        .into(),
        sequence: c
            .sequence(x, first, last, ratio)
            .iter()
            .map(dec_q)
            .collect(),
        point_cuts: c.point_cuts.clone(),
        absorbed: c.absorbed.clone(),
    }
}

pub fn node_json(n: &WitnessNode, x: &[BigRational], ratio: &BigRational) -> NodeJson {
    NodeJson {
        first: n.first,
        last: n.last,
        order: n.order,
        cut: n
            .cut
            .as_ref()
            .map(|c| cut_json(c, x, n.first, n.last, ratio)),
        children: n.children.iter().map(|c| node_json(c, x, ratio)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunarityJson {
    pub order: OrderJson,
    pub exact: bool,
    pub work: u64,
    pub ratio: String,
    pub normalization: String,
    pub set: SlopeSetJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_tree: Option<NodeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverJson>,
    pub config: RunConfig,
}

impl LacunarityJson {
    pub fn new(
        r: &LacunarityReport,
        x: &[BigRational],
        ratio: &BigRational,
        set: &SlopeSet,
        config: &RunConfig,
    ) -> Self {
        LacunarityJson {
            order: r.order.into(),
            exact: r.exact,
            work: r.work,
            ratio: dec_q(ratio),
            normalization: r.normalization.into(),
            set: set.into(),
            witness_tree: r.witness_tree.as_ref().map(|t| node_json(t, x, ratio)),
            cover: None,
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverJson {
    pub found: bool,
    pub parts: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<u32>,
    pub attempts: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl From<&CoverOutcome> for CoverJson {
    fn from(c: &CoverOutcome) -> Self {
        match c {
            CoverOutcome::Cover {
                parts,
                orders,
                attempts,
            } => CoverJson {
                found: true,
                parts: parts.clone(),
                orders: orders.clone(),
                attempts: *attempts,
                budget: None,
            },
            CoverOutcome::Failure {
                attempts,
                budget,
                best_partial,
            } => CoverJson {
                found: false,
                parts: best_partial.clone(),
                orders: Vec::new(),
                attempts: *attempts,
                budget: Some(*budget),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaJson {
    pub value: String,
    pub abs_error: String,
    pub lower: String,
    pub upper: String,
    pub resolution: String,
    pub method: String,
}

impl From<&AreaEstimate> for AreaJson {
    fn from(a: &AreaEstimate) -> Self {
        AreaJson {
            value: dec_f64(a.value),
            abs_error: dec_f64(a.abs_error),
            lower: dec_f64(a.lower),
            upper: dec_f64(a.upper),
            resolution: dec_f64(a.resolution),
            method: a.method.as_str().into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridJson {
    pub origin: [String; 2],
    pub cell: String,
    pub nx: usize,
    pub ny: usize,
}

impl From<&GridParams> for GridJson {
    fn from(g: &GridParams) -> Self {
        GridJson {
            origin: [dec_f64(g.origin.0), dec_f64(g.origin.1)],
            cell: dec_f64(g.cell),
            nx: g.nx,
            ny: g.ny,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeJson {
    #[serde(rename = "N")]
    pub n: u32,
    pub scheme: String,
    pub alpha: String,
    pub perron_factor: String,
    pub coefficient: String,
    pub x_area: AreaJson,
    pub level_set_measure: String,
    pub discretization_error: String,
    pub rhs: String,
    pub level_ratio: String,
    pub inequality_observed: bool,
    pub level_set_covers_x: bool,
    pub grid: GridJson,
    pub note: String,
    pub config: RunConfig,
}

pub const PROBE_NOTE: &str =
    "the field is a lower bound for the maximal function, so the level set is an \
under-estimate: the report is evidence about the inequality, never a refutation";

impl ProbeJson {
    pub fn new(r: &HrProbeReport, scheme: Scheme, config: &RunConfig) -> Self {
        ProbeJson {
            n: r.n,
            scheme: scheme.as_str().into(),
            alpha: dec_f64(r.alpha),
            perron_factor: dec_f64(r.perron_factor),
            coefficient: dec_f64(r.coefficient),
            x_area: (&r.x_area).into(),
            level_set_measure: dec_f64(r.level_set_measure),
            discretization_error: dec_f64(r.discretization_error),
            rhs: dec_f64(r.rhs),
            level_ratio: dec_f64(r.level_ratio),
            inequality_observed: r.inequality_observed,
            level_set_covers_x: r.level_set_covers_x,
            grid: (&r.field.grid).into(),
            note: PROBE_NOTE.into(),
            config: config.clone(),
        }
    }
}
