//! SVG pictures of rectangle families and CSV tables of blow ratios.

use std::fmt::Write as _;

use perron_core::kakeya::{BlowRatio, Rect, RectFamily};
use serde::Serialize;

use crate::config::RunConfig;
use crate::dto::dec_f64;
use crate::CliError;

const SVG_SIZE: f64 = 800.0;

fn polygon(out: &mut String, r: &Rect, style: &str) {
    let pts: Vec<String> = r
        .corners()
        .iter()
        .map(|(x, y)| format!("{x},{y}"))
        .collect();
    let _ = writeln!(out, r#"  <polygon points="{}" {style}/>"#, pts.join(" "));
}

/// The family in solid strokes, its dilates dashed. Plane coordinates are
/// kept; a flip puts the y-axis upward.
pub fn family_svg(f: &RectFamily, factor: f64) -> String {
    let grown = f.dilated(factor);
    let pts: Vec<(f64, f64)> = f
        .rects
        .iter()
        .chain(&grown)
        .flat_map(|r| r.corners())
        .collect();
    let (x0, y0, x1, y1) = pts.iter().fold(
        (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
        |b, p| (b.0.min(p.0), b.1.min(p.1), b.2.max(p.0), b.3.max(p.1)),
    );
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let pad = 0.02 * span;
    let stroke = span / SVG_SIZE;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {w} {h}">"#,
        (SVG_SIZE * w / span).round(),
        (SVG_SIZE * h / span).round(),
        x0 - pad,
        -(y1 + pad),
    );
    let _ = writeln!(
        out,
        r#"<title>{} rectangles, scheme {}, dilation {factor}</title>"#,
        f.rects.len(),
        f.scheme.as_str()
    );
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    let dashed = format!(
        r#"fill="none" stroke="firebrick" stroke-width="{stroke}" stroke-dasharray="{} {}""#,
        4.0 * stroke,
        3.0 * stroke
    );
    for r in &grown {
        polygon(&mut out, r, &dashed);
    }
    let solid =
        format!(r#"fill="steelblue" fill-opacity="0.35" stroke="black" stroke-width="{stroke}""#);
    for r in &f.rects {
        polygon(&mut out, r, &solid);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub rects: usize,
    pub scheme: String,
    pub factor: String,
    pub union_area: String,
    pub dilated_union_area: String,
    pub ratio: String,
    pub ratio_lower: String,
    pub ratio_upper: String,
}

impl BlowRow {
    pub fn new(n: u32, f: &RectFamily, factor: f64, b: &BlowRatio) -> Self {
        BlowRow {
            n,
            rects: f.rects.len(),
            scheme: f.scheme.as_str().into(),
            factor: dec_f64(factor),
            union_area: dec_f64(b.denominator.value),
            dilated_union_area: dec_f64(b.numerator.value),
            ratio: dec_f64(b.ratio),
            ratio_lower: dec_f64(b.lower),
            ratio_upper: dec_f64(b.upper),
        }
    }
}

/// Comment lines carrying the configuration, then a header and the rows.
pub fn blow_csv(
    rows: &[BlowRow],
    config: &RunConfig,
    target_rel_err: f64,
) -> Result<String, CliError> {
    let mut out = format!(
        "# precision_bits={} max_search={} seed={} target_rel_err={}\n",
        config.precision_bits,
        config.max_search,
        config.seed,
        dec_f64(target_rel_err)
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::usage(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::usage(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}
