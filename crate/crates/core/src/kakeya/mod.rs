//! Rectangle families with prescribed slopes: constructions, union areas,
//! blow ratios, and a maximal-function probe.

pub mod construct;
pub mod geometry;
pub mod maximal;
pub mod raster;

pub use construct::{construct_blow_family, RectFamily, Scheme, SizeParams};
pub use geometry::Rect;
pub use maximal::{
    hr_probe, maximal_field, GeneratorParams, GridParams, HrProbeReport, MaximalField, ProbeParams,
};
pub use raster::{
    blow_ratio, union_area, union_area_montecarlo, AreaEstimate, AreaMethod, BlowRatio,
};
