//! Static SVG rendering of the relative-performance curves.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{CurvePoint, OptimumRecord, Scope};
use crate::envelope::GlazingId;

const WIDTH: f64 = 1200.0;
const HEIGHT: f64 = 800.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 1110.0;
const TOP: f64 = 90.0;
const BOTTOM: f64 = 710.0;

struct Axes {
    wfr_max: f64,
    rel_max: f64,
}

impl Axes {
    fn x(&self, wfr: f64) -> f64 {
        LEFT + (RIGHT - LEFT) * wfr / self.wfr_max
    }

    fn y_rel(&self, rel: f64) -> f64 {
        BOTTOM - (BOTTOM - TOP) * rel.min(self.rel_max) / self.rel_max
    }

    fn y_ratio(&self, ratio: f64) -> f64 {
        BOTTOM - (BOTTOM - TOP) * ratio
    }
}

fn nice_step(span: f64, target_ticks: f64) -> f64 {
    let raw = span / target_ticks;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>, style: &str) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    if coords.len() > 1 {
        let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
    }
}

/// Point on `glazing`'s curve at each orientation's annual optimum, in
/// orientation order.
fn optimum_trace(glazing: GlazingId, curves: &[CurvePoint], optima: &[OptimumRecord]) -> Vec<(f64, f64)> {
    optima
        .iter()
        .filter(|o| o.glazing == glazing && o.scope == Scope::Annual)
        .filter_map(|o| {
            curves
                .iter()
                .find(|c| c.glazing == glazing && c.orientation_deg == o.orientation_deg && c.width_m == o.best_width_m)
                .map(|c| (c.wfr, c.rel_tdh))
        })
        .collect()
}

/// Render one glazing's curves as a 1200×800 SVG document.
///
/// Bottom axis WFR, top axis WWR, left axis relative TDH (blue), right axis
/// CDH share (red). The black line joins the annual optima; grey dotted
/// lines show the optima of the other glazings.
pub fn render_figure(glazing: GlazingId, curves: &[CurvePoint], optima: &[OptimumRecord]) -> String {
    let own: Vec<&CurvePoint> = curves.iter().filter(|c| c.glazing == glazing).collect();
    let wfr_max = own.iter().map(|c| c.wfr).fold(0.0, f64::max).max(1e-6);
    let rel_max = own.iter().map(|c| c.rel_tdh).fold(1.0, f64::max);
    let axes = Axes { wfr_max, rel_max };
    // WWR is proportional to WFR for a fixed room.
    let wwr_per_wfr = own.iter().find(|c| c.wfr > 0.0).map_or(1.0, |c| c.wwr / c.wfr);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="18">{glazing}</text>"#,
        WIDTH / 2.0
    );

    // frame and ticks
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let step = nice_step(wfr_max, 8.0);
    let mut v = 0.0;
    while v <= wfr_max + 1e-9 {
        let x = axes.x(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            BOTTOM + 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{v:.2}</text>"#,
            BOTTOM + 22.0
        );
        v += step;
    }
    let wwr_max = wfr_max * wwr_per_wfr;
    let step = nice_step(wwr_max, 8.0);
    let mut v = 0.0;
    while v <= wwr_max + 1e-9 {
        let x = axes.x(v / wwr_per_wfr);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            TOP - 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{v:.2}</text>"#,
            TOP - 12.0
        );
        v += step;
    }
    let step = nice_step(rel_max, 8.0);
    let mut v = 0.0;
    while v <= rel_max + 1e-9 {
        let y = axes.y_rel(v);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" fill="blue">{v:.2}</text>"#,
            LEFT - 10.0,
            y + 4.0
        );
        v += step;
    }
    for i in 0..=10 {
        let v = i as f64 / 10.0;
        let y = axes.y_ratio(v);
        let _ = writeln!(
            s,
            r#"<line x1="{RIGHT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black"/>"#,
            RIGHT + 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" fill="red">{v:.1}</text>"#,
            RIGHT + 10.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">WFR</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 50.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">WWR</text>"#,
        (LEFT + RIGHT) / 2.0,
        TOP - 40.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(30 {}) rotate(-90)" text-anchor="middle" fill="blue">relative TDH</text>"#,
        (TOP + BOTTOM) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate({} {}) rotate(90)" text-anchor="middle" fill="red">CDH / TDH</text>"#,
        WIDTH - 30.0,
        (TOP + BOTTOM) / 2.0
    );

    let mut by_orientation: BTreeMap<u16, Vec<&CurvePoint>> = BTreeMap::new();
    for c in &own {
        by_orientation.entry(c.orientation_deg).or_default().push(c);
    }
    let _ = writeln!(s, r#"<g>"#);
    for pts in by_orientation.values_mut() {
        pts.sort_by(|a, b| a.wfr.total_cmp(&b.wfr));
        polyline(
            &mut s,
            pts.iter().map(|c| (axes.x(c.wfr), axes.y_rel(c.rel_tdh))),
            r#"stroke="blue" stroke-opacity="0.35" stroke-width="1""#,
        );
        polyline(
            &mut s,
            pts.iter().map(|c| (axes.x(c.wfr), axes.y_ratio(c.cdh_ratio))),
            r#"stroke="red" stroke-opacity="0.35" stroke-width="1""#,
        );
    }
    for other in GlazingId::ALL.into_iter().filter(|g| *g != glazing) {
        let trace = optimum_trace(other, curves, optima);
        polyline(
            &mut s,
            trace.iter().map(|(w, r)| (axes.x(*w), axes.y_rel(*r))),
            r#"stroke="grey" stroke-width="1.5" stroke-dasharray="2 4""#,
        );
    }
    let trace = optimum_trace(glazing, curves, optima);
    polyline(
        &mut s,
        trace.iter().map(|(w, r)| (axes.x(*w), axes.y_rel(*r))),
        r#"stroke="black" stroke-width="1.5""#,
    );
    s.push_str("</g>\n</svg>\n");
    s
}
