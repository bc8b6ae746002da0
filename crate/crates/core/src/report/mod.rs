//! Optimum extraction from sweep results: per-orientation optima, optimum
//! WFR intervals (annual, per quadrant, per season), relative-performance
//! curves and summer zero-discomfort thresholds.

mod figure;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comfort::{DegreeHours, Season, SeasonalBreakdown};
use crate::envelope::GlazingId;
use crate::sweep::ResultSet;

pub use figure::render_figure;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("incomplete slice: {0}")]
    IncompleteSlice(String),
    #[error("no records in scope {0}")]
    EmptyScope(String),
    #[error("cannot normalise {glazing} curves: baseline TDH {baseline} does not exceed the best TDH {best}")]
    DegenerateNormalization {
        glazing: GlazingId,
        baseline: f64,
        best: f64,
    },
    #[error("cannot write {path}: {source}")]
    OutputUnwritable { path: String, source: std::io::Error },
    #[error("malformed {0}")]
    Malformed(String),
}

/// Which degree-hour total an optimum minimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Annual,
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Scope {
    pub const ALL: [Scope; 5] = [
        Scope::Annual,
        Scope::Winter,
        Scope::Spring,
        Scope::Summer,
        Scope::Autumn,
    ];

    pub fn of_season(season: Season) -> Scope {
        match season {
            Season::Winter => Scope::Winter,
            Season::Spring => Scope::Spring,
            Season::Summer => Scope::Summer,
            Season::Autumn => Scope::Autumn,
        }
    }

    pub fn pick<'a>(&self, b: &'a SeasonalBreakdown) -> &'a DegreeHours {
        match self {
            Scope::Annual => &b.annual,
            Scope::Winter => &b.winter,
            Scope::Spring => &b.spring,
            Scope::Summer => &b.summer,
            Scope::Autumn => &b.autumn,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Annual => "annual",
            Scope::Winter => "winter",
            Scope::Spring => "spring",
            Scope::Summer => "summer",
            Scope::Autumn => "autumn",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 90° orientation sectors centred on the cardinal directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrant {
    North,
    East,
    South,
    West,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::North, Quadrant::East, Quadrant::South, Quadrant::West];

    /// N = [315, 360) ∪ [0, 45), E = [45, 135), S = [135, 225), W = [225, 315).
    pub fn of(orientation_deg: f64) -> Quadrant {
        let o = orientation_deg.rem_euclid(360.0);
        if !(45.0..315.0).contains(&o) {
            Quadrant::North
        } else if o < 135.0 {
            Quadrant::East
        } else if o < 225.0 {
            Quadrant::South
        } else {
            Quadrant::West
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::North => "north",
            Quadrant::East => "east",
            Quadrant::South => "south",
            Quadrant::West => "west",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalScope {
    Annual,
    Quadrant(Quadrant),
    Season(Season),
}

impl IntervalScope {
    pub fn table_order() -> Vec<IntervalScope> {
        let mut v = vec![IntervalScope::Annual];
        v.extend(Quadrant::ALL.map(IntervalScope::Quadrant));
        v.extend(Season::ALL.map(IntervalScope::Season));
        v
    }

    fn accepts(&self, r: &OptimumRecord) -> bool {
        match self {
            IntervalScope::Annual => r.scope == Scope::Annual,
            IntervalScope::Quadrant(q) => r.scope == Scope::Annual && Quadrant::of(r.orientation_deg as f64) == *q,
            IntervalScope::Season(s) => r.scope == Scope::of_season(*s),
        }
    }
}

impl fmt::Display for IntervalScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalScope::Annual => f.write_str("annual"),
            IntervalScope::Quadrant(q) => f.write_str(q.as_str()),
            IntervalScope::Season(s) => f.write_str(s.as_str()),
        }
    }
}

impl FromStr for IntervalScope {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntervalScope::table_order()
            .into_iter()
            .find(|scope| scope.to_string() == s)
            .ok_or_else(|| ReportError::Malformed(format!("interval scope {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumRecord {
    pub glazing: GlazingId,
    pub orientation_deg: u16,
    pub best_width_m: f64,
    pub best_wfr: f64,
    pub best_tdh: f64,
    /// CDH/TDH of the scoped total at the optimum.
    pub cdh_ratio: f64,
    pub scope: Scope,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalRecord {
    pub glazing: GlazingId,
    pub scope: IntervalScope,
    pub wfr_min: f64,
    pub wfr_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub glazing: GlazingId,
    pub orientation_deg: u16,
    /// Zero for the windowless baseline.
    pub width_m: f64,
    pub wfr: f64,
    pub wwr: f64,
    pub rel_tdh: f64,
    pub cdh_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummerThreshold {
    pub glazing: GlazingId,
    pub per_orientation: Vec<(u16, f64)>,
    /// Maximum over orientations.
    pub wfr: f64,
}

/// Checks every orientation of `glazing` carries the same width set and
/// returns the slices.
fn complete_slices(
    results: &ResultSet,
    glazing: GlazingId,
) -> Result<BTreeMap<u16, Vec<&crate::sweep::SweepPoint>>, ReportError> {
    let slices = results.slices(glazing);
    let first = slices
        .values()
        .next()
        .ok_or_else(|| ReportError::IncompleteSlice(format!("no results for {glazing}")))?;
    let widths: Vec<u64> = first.iter().map(|p| p.width_m.to_bits()).collect();
    for (o, slice) in &slices {
        let w: Vec<u64> = slice.iter().map(|p| p.width_m.to_bits()).collect();
        if w != widths {
            return Err(ReportError::IncompleteSlice(format!(
                "({glazing}, {o}°) has {} widths, expected {}",
                w.len(),
                widths.len()
            )));
        }
    }
    Ok(slices)
}

/// Width minimising the scoped TDH at each orientation; ties go to the
/// smaller width.
pub fn optimum_per_orientation(
    results: &ResultSet,
    glazing: GlazingId,
    scope: Scope,
) -> Result<Vec<OptimumRecord>, ReportError> {
    let slices = complete_slices(results, glazing)?;
    Ok(slices
        .into_iter()
        .map(|(orientation_deg, slice)| {
            let mut best = slice[0];
            for p in &slice[1..] {
                if scope.pick(&p.breakdown).tdh < scope.pick(&best.breakdown).tdh {
                    best = p;
                }
            }
            let dh = scope.pick(&best.breakdown);
            OptimumRecord {
                glazing,
                orientation_deg,
                best_width_m: best.width_m,
                best_wfr: best.wfr,
                best_tdh: dh.tdh,
                cdh_ratio: dh.cdh_ratio(),
                scope,
            }
        })
        .collect())
}

/// [min, max] of the optimum WFR over the records that fall in `scope`.
pub fn interval(
    records: &[OptimumRecord],
    glazing: GlazingId,
    scope: IntervalScope,
) -> Result<IntervalRecord, ReportError> {
    let mut selected = records
        .iter()
        .filter(|r| r.glazing == glazing && scope.accepts(r))
        .map(|r| r.best_wfr)
        .peekable();
    if selected.peek().is_none() {
        return Err(ReportError::EmptyScope(format!("{glazing} {scope}")));
    }
    let (wfr_min, wfr_max) = selected.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(IntervalRecord {
        glazing,
        scope,
        wfr_min,
        wfr_max,
    })
}

/// Relative TDH and CDH share for every point of one glazing, plus one
/// zero-width point per orientation for the windowless baseline.
///
/// `rel_tdh` is 0 at the glazing's best point over all orientations and
/// widths and 1 at the baseline of that point's orientation.
pub fn curves(results: &ResultSet, glazing: GlazingId) -> Result<Vec<CurvePoint>, ReportError> {
    let slices = complete_slices(results, glazing)?;
    let best = slices
        .values()
        .flatten()
        .min_by(|a, b| {
            a.breakdown
                .annual
                .tdh
                .total_cmp(&b.breakdown.annual.tdh)
                .then(a.orientation_deg.cmp(&b.orientation_deg))
                .then(a.width_m.total_cmp(&b.width_m))
        })
        .copied()
        .expect("non-empty slices");
    let best_tdh = best.breakdown.annual.tdh;
    let baseline = results
        .baseline(best.orientation_deg)
        .ok_or_else(|| ReportError::IncompleteSlice(format!("no baseline for {}°", best.orientation_deg)))?;
    let span = baseline.breakdown.annual.tdh - best_tdh;
    if span <= 0.0 {
        return Err(ReportError::DegenerateNormalization {
            glazing,
            baseline: baseline.breakdown.annual.tdh,
            best: best_tdh,
        });
    }

    let mut out = Vec::new();
    for (orientation_deg, slice) in &slices {
        let base = results
            .baseline(*orientation_deg)
            .ok_or_else(|| ReportError::IncompleteSlice(format!("no baseline for {orientation_deg}°")))?;
        out.push(CurvePoint {
            glazing,
            orientation_deg: *orientation_deg,
            width_m: 0.0,
            wfr: 0.0,
            wwr: 0.0,
            rel_tdh: (base.breakdown.annual.tdh - best_tdh) / span,
            cdh_ratio: base.breakdown.annual.cdh_ratio(),
        });
        for p in slice {
            out.push(CurvePoint {
                glazing,
                orientation_deg: *orientation_deg,
                width_m: p.width_m,
                wfr: p.wfr,
                wwr: p.wwr,
                rel_tdh: (p.breakdown.annual.tdh - best_tdh) / span,
                cdh_ratio: p.breakdown.annual.cdh_ratio(),
            });
        }
    }
    Ok(out)
}

/// Largest WFR up to which summer discomfort stays exactly zero, per
/// orientation; the glazing's figure is the maximum over orientations.
pub fn summer_threshold(results: &ResultSet, glazing: GlazingId) -> Result<SummerThreshold, ReportError> {
    let slices = complete_slices(results, glazing)?;
    let per_orientation: Vec<(u16, f64)> = slices
        .into_iter()
        .map(|(o, slice)| {
            let w = slice
                .iter()
                .take_while(|p| p.breakdown.summer.tdh == 0.0)
                .last()
                .map_or(0.0, |p| p.wfr);
            (o, w)
        })
        .collect();
    let wfr = per_orientation.iter().map(|(_, w)| *w).fold(0.0, f64::max);
    Ok(SummerThreshold {
        glazing,
        per_orientation,
        wfr,
    })
}

/// Which optional sections a report includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sections {
    pub quadrants: bool,
    pub seasons: bool,
    pub figure: bool,
}

impl Default for Sections {
    fn default() -> Self {
        Self {
            quadrants: true,
            seasons: true,
            figure: true,
        }
    }
}

/// Everything `emit` writes, computed in memory first.
#[derive(Debug, Clone)]
pub struct Report {
    pub intervals: Vec<IntervalRecord>,
    pub optima: Vec<OptimumRecord>,
    pub curves: Vec<CurvePoint>,
    pub thresholds: Vec<SummerThreshold>,
    pub figures: Vec<(GlazingId, String)>,
}

/// Interval rows for every glazing in table order. Quadrants with no swept
/// orientation are skipped.
pub fn interval_table(
    results: &ResultSet,
    sections: Sections,
) -> Result<(Vec<IntervalRecord>, Vec<OptimumRecord>), ReportError> {
    let glazings = results.glazings();
    if glazings.is_empty() {
        return Err(ReportError::EmptyScope("result set has no points".into()));
    }
    let mut intervals = Vec::new();
    let mut optima = Vec::new();
    for g in glazings {
        let mut records = Vec::new();
        for scope in Scope::ALL {
            records.extend(optimum_per_orientation(results, g, scope)?);
        }
        for scope in IntervalScope::table_order() {
            match scope {
                IntervalScope::Quadrant(q) if sections.quadrants => match interval(&records, g, scope) {
                    Ok(r) => intervals.push(r),
                    Err(ReportError::EmptyScope(_)) => {
                        log::warn!("{g}: no swept orientation in the {} quadrant", q.as_str())
                    }
                    Err(e) => return Err(e),
                },
                IntervalScope::Season(_) if sections.seasons => intervals.push(interval(&records, g, scope)?),
                IntervalScope::Annual => intervals.push(interval(&records, g, scope)?),
                _ => {}
            }
        }
        optima.extend(records);
    }
    Ok((intervals, optima))
}

pub fn build_report(results: &ResultSet, sections: Sections) -> Result<Report, ReportError> {
    let (intervals, optima) = interval_table(results, sections)?;
    let mut curves_all = Vec::new();
    let mut thresholds = Vec::new();
    for g in results.glazings() {
        thresholds.push(summer_threshold(results, g)?);
        match curves(results, g) {
            Ok(c) => curves_all.extend(c),
            Err(e @ ReportError::DegenerateNormalization { .. }) => log::warn!("{e}"),
            Err(e) => return Err(e),
        }
    }
    let figures = if sections.figure {
        results
            .glazings()
            .into_iter()
            .filter(|g| curves_all.iter().any(|c| c.glazing == *g))
            .map(|g| (g, render_figure(g, &curves_all, &optima)))
            .collect()
    } else {
        Vec::new()
    };
    Ok(Report {
        intervals,
        optima,
        curves: curves_all,
        thresholds,
        figures,
    })
}

pub const TABLE_FILE: &str = "table2.csv";
pub const OPTIMA_FILE: &str = "optima.csv";
pub const CURVES_FILE: &str = "curves.csv";
pub const THRESHOLD_FILE: &str = "summer_thresholds.csv";

pub fn figure_file(glazing: GlazingId) -> String {
    format!("figure_{}.svg", glazing.as_str().to_ascii_lowercase())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Write the report files into `out_dir`; returns the paths written.
pub fn emit(report: &Report, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let unwritable = |path: &Path| {
        let path = path.display().to_string();
        move |source| ReportError::OutputUnwritable { path, source }
    };
    fs::create_dir_all(out_dir).map_err(unwritable(out_dir))?;

    let mut files: Vec<(String, Vec<u8>)> = vec![
        (
            TABLE_FILE.into(),
            csv_bytes(
                &["glazing", "scope", "wfr_min", "wfr_max"],
                report.intervals.iter().map(|r| {
                    vec![
                        r.glazing.to_string(),
                        r.scope.to_string(),
                        r.wfr_min.to_string(),
                        r.wfr_max.to_string(),
                    ]
                }),
            ),
        ),
        (
            OPTIMA_FILE.into(),
            csv_bytes(
                &[
                    "glazing",
                    "scope",
                    "orientation_deg",
                    "best_width_m",
                    "best_wfr",
                    "best_tdh",
                    "cdh_ratio",
                ],
                report.optima.iter().map(|r| {
                    vec![
                        r.glazing.to_string(),
                        r.scope.to_string(),
                        r.orientation_deg.to_string(),
                        r.best_width_m.to_string(),
                        r.best_wfr.to_string(),
                        r.best_tdh.to_string(),
                        r.cdh_ratio.to_string(),
                    ]
                }),
            ),
        ),
        (CURVES_FILE.into(), curves_csv(&report.curves)),
        (
            THRESHOLD_FILE.into(),
            csv_bytes(
                &["glazing", "orientation_deg", "summer_zero_wfr"],
                report.thresholds.iter().flat_map(|t| {
                    t.per_orientation
                        .iter()
                        .map(|(o, w)| vec![t.glazing.to_string(), o.to_string(), w.to_string()])
                        .chain(std::iter::once(vec![
                            t.glazing.to_string(),
                            "max".into(),
                            t.wfr.to_string(),
                        ]))
                }),
            ),
        ),
    ];
    for (g, svg) in &report.figures {
        files.push((figure_file(*g), svg.clone().into_bytes()));
    }

    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(unwritable(&path))?;
        written.push(path);
    }
    Ok(written)
}

const CURVE_HEADER: [&str; 7] = [
    "glazing",
    "orientation_deg",
    "width_m",
    "wfr",
    "wwr",
    "rel_tdh",
    "cdh_ratio",
];

pub fn curves_csv(curves: &[CurvePoint]) -> Vec<u8> {
    csv_bytes(
        &CURVE_HEADER,
        curves.iter().map(|c| {
            vec![
                c.glazing.to_string(),
                c.orientation_deg.to_string(),
                c.width_m.to_string(),
                c.wfr.to_string(),
                c.wwr.to_string(),
                c.rel_tdh.to_string(),
                c.cdh_ratio.to_string(),
            ]
        }),
    )
}

pub fn load_curves(path: &Path) -> Result<Vec<CurvePoint>, ReportError> {
    let bytes = fs::read(path).map_err(|e| ReportError::Malformed(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let header = rdr.headers().map_err(|e| ReportError::Malformed(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != CURVE_HEADER {
        return Err(ReportError::Malformed(format!("{} header", path.display())));
    }
    let bad = |what: &str| ReportError::Malformed(format!("{}: {what}", path.display()));
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(&e.to_string()))?;
            let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(&rec[i]));
            Ok(CurvePoint {
                glazing: rec[0].parse().map_err(|_| bad(&rec[0]))?,
                orientation_deg: rec[1].parse().map_err(|_| bad(&rec[1]))?,
                width_m: num(2)?,
                wfr: num(3)?,
                wwr: num(4)?,
                rel_tdh: num(5)?,
                cdh_ratio: num(6)?,
            })
        })
        .collect()
}

pub fn load_table(path: &Path) -> Result<Vec<IntervalRecord>, ReportError> {
    let bytes = fs::read(path).map_err(|e| ReportError::Malformed(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let bad = |what: &str| ReportError::Malformed(format!("{}: {what}", path.display()));
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(&e.to_string()))?;
            Ok(IntervalRecord {
                glazing: rec[0].parse().map_err(|_| bad(&rec[0]))?,
                scope: rec[1].parse()?,
                wfr_min: rec[2].parse().map_err(|_| bad(&rec[2]))?,
                wfr_max: rec[3].parse().map_err(|_| bad(&rec[3]))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{BaselinePoint, SweepPoint};
    use proptest::prelude::*;

    const FLOOR: f64 = 22.8;

    fn widths() -> Vec<f64> {
        crate::envelope::width_grid()
    }

    fn breakdown(annual: f64, cdh_share: f64, summer: f64) -> SeasonalBreakdown {
        let winter = DegreeHours::new(annual * (1.0 - cdh_share) * 0.6, 0.0);
        let spring = DegreeHours::new(annual * (1.0 - cdh_share) * 0.4, annual * cdh_share * 0.5);
        let autumn = DegreeHours::new(0.0, annual * cdh_share * 0.5 - summer);
        let summer = DegreeHours::new(0.0, summer);
        let mut b = SeasonalBreakdown::from_seasons(winter, spring, summer, autumn);
        b.annual = DegreeHours::new(annual * (1.0 - cdh_share), annual * cdh_share);
        b
    }

    /// One glazing over `orientations`, with annual TDH given by `tdh(o, i)`.
    fn synthetic(
        orientations: &[u16],
        tdh: impl Fn(u16, usize) -> f64,
        summer: impl Fn(u16, usize) -> f64,
    ) -> ResultSet {
        let mut set = ResultSet::default();
        for &o in orientations {
            for (i, w) in widths().into_iter().enumerate() {
                set.points.push(SweepPoint {
                    glazing: GlazingId::Dgw,
                    orientation_deg: o,
                    width_m: w,
                    wfr: w * 2.0 / FLOOR,
                    wwr: w * 2.0 / 18.9,
                    breakdown: breakdown(tdh(o, i), 0.1, summer(o, i)),
                });
            }
            set.baselines.push(BaselinePoint {
                orientation_deg: o,
                breakdown: breakdown(1000.0, 0.0, 0.0),
            });
        }
        set
    }

    fn vee(min_idx: usize) -> impl Fn(u16, usize) -> f64 {
        move |_, i| 100.0 + (i as f64 - min_idx as f64).abs()
    }

    #[test]
    fn unique_and_tied_minimum() {
        // index 29 is 1.45 m
        let set = synthetic(&[0], vee(29), |_, _| 0.0);
        let r = optimum_per_orientation(&set, GlazingId::Dgw, Scope::Annual).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].best_width_m, 1.45);
        assert_eq!(r[0].best_tdh, 100.0);

        let set = synthetic(&[0], |_, i| if i == 28 || i == 29 { 50.0 } else { 100.0 }, |_, _| 0.0);
        let r = optimum_per_orientation(&set, GlazingId::Dgw, Scope::Annual).unwrap();
        assert_eq!(r[0].best_width_m, 1.40);
    }

    #[test]
    fn incomplete_slice() {
        let mut set = synthetic(&[0, 2], vee(10), |_, _| 0.0);
        set.points.remove(5);
        assert!(matches!(
            optimum_per_orientation(&set, GlazingId::Dgw, Scope::Annual),
            Err(ReportError::IncompleteSlice(_))
        ));
        assert!(matches!(
            optimum_per_orientation(&set, GlazingId::Tgw, Scope::Annual),
            Err(ReportError::IncompleteSlice(_))
        ));
    }

    #[test]
    fn intervals() {
        let rec = |o: u16, w: f64| OptimumRecord {
            glazing: GlazingId::Sgw,
            orientation_deg: o,
            best_width_m: w,
            best_wfr: w,
            best_tdh: 0.0,
            cdh_ratio: 0.0,
            scope: Scope::Annual,
        };
        let same = [rec(0, 0.2), rec(90, 0.2), rec(180, 0.2)];
        let i = interval(&same, GlazingId::Sgw, IntervalScope::Annual).unwrap();
        assert_eq!((i.wfr_min, i.wfr_max), (0.2, 0.2));

        let mixed = [rec(0, 0.1), rec(90, 0.3), rec(180, 0.2)];
        let i = interval(&mixed, GlazingId::Sgw, IntervalScope::Annual).unwrap();
        assert_eq!((i.wfr_min, i.wfr_max), (0.1, 0.3));
        let e = interval(&mixed, GlazingId::Sgw, IntervalScope::Quadrant(Quadrant::West));
        assert!(matches!(e, Err(ReportError::EmptyScope(_))));
        assert!(interval(&[], GlazingId::Sgw, IntervalScope::Annual).is_err());
    }

    #[test]
    fn quadrant_boundaries() {
        assert_eq!(Quadrant::of(0.0), Quadrant::North);
        assert_eq!(Quadrant::of(44.0), Quadrant::North);
        assert_eq!(Quadrant::of(46.0), Quadrant::East);
        assert_eq!(Quadrant::of(134.0), Quadrant::East);
        assert_eq!(Quadrant::of(136.0), Quadrant::South);
        assert_eq!(Quadrant::of(226.0), Quadrant::West);
        assert_eq!(Quadrant::of(314.0), Quadrant::West);
        assert_eq!(Quadrant::of(316.0), Quadrant::North);
        assert_eq!(Quadrant::of(358.0), Quadrant::North);
    }

    #[test]
    fn curve_endpoints() {
        let set = synthetic(&[0, 90], |o, i| 100.0 + (i as f64 - 20.0).abs() + o as f64, |_, _| 0.0);
        let c = curves(&set, GlazingId::Dgw).unwrap();
        let at = |o: u16, w: f64| c.iter().find(|p| p.orientation_deg == o && p.width_m == w).unwrap();
        assert_eq!(at(0, widths()[20]).rel_tdh, 0.0);
        assert_eq!(at(0, 0.0).rel_tdh, 1.0);
        assert!(c.iter().all(|p| (0.0..=1.0).contains(&p.cdh_ratio)));

        let flat = synthetic(&[0], |_, _| 1000.0, |_, _| 0.0);
        assert!(matches!(
            curves(&flat, GlazingId::Dgw),
            Err(ReportError::DegenerateNormalization { .. })
        ));
    }

    #[test]
    fn heating_only_year_has_zero_cdh_ratio() {
        let mut set = synthetic(&[0], vee(30), |_, _| 0.0);
        for p in &mut set.points {
            let h = p.breakdown.annual.tdh;
            p.breakdown = SeasonalBreakdown::from_seasons(
                DegreeHours::new(h, 0.0),
                DegreeHours::default(),
                DegreeHours::default(),
                DegreeHours::default(),
            );
        }
        let c = curves(&set, GlazingId::Dgw).unwrap();
        assert!(c.iter().all(|p| p.cdh_ratio == 0.0));
    }

    #[test]
    fn summer_thresholds() {
        let set = synthetic(&[0, 2], vee(30), |o, i| {
            if (o == 0 && i <= 40) || (o == 2 && i <= 12) {
                0.0
            } else {
                5.0
            }
        });
        let t = summer_threshold(&set, GlazingId::Dgw).unwrap();
        let wfr_at = |i: usize| widths()[i] * 2.0 / FLOOR;
        assert_eq!(t.per_orientation, vec![(0, wfr_at(40)), (2, wfr_at(12))]);
        assert_eq!(t.wfr, wfr_at(40));

        let hot = synthetic(&[0], vee(30), |_, _| 1.0);
        assert_eq!(summer_threshold(&hot, GlazingId::Dgw).unwrap().wfr, 0.0);
    }

    #[test]
    fn report_cardinality_and_files() {
        let orientations: Vec<u16> = (0..360).step_by(30).collect();
        let set = synthetic(
            &orientations,
            |o, i| 100.0 + (i as f64 - (20 + o as usize / 30) as f64).abs(),
            |_, i| if i < 10 { 0.0 } else { 1.0 },
        );
        let report = build_report(&set, Sections::default()).unwrap();
        assert_eq!(report.intervals.len(), 9);
        let annual = report.intervals[0];
        for r in &report.intervals[1..5] {
            assert!(r.wfr_min >= annual.wfr_min && r.wfr_max <= annual.wfr_max);
        }
        let dir = tempfile::tempdir().unwrap();
        let files = emit(&report, dir.path()).unwrap();
        assert!(files.iter().any(|f| f.ends_with("figure_dgw.svg")));
        let back = load_curves(&dir.path().join(CURVES_FILE)).unwrap();
        assert_eq!(back, report.curves);
        let table = load_table(&dir.path().join(TABLE_FILE)).unwrap();
        assert_eq!(table, report.intervals);
        let svg = fs::read_to_string(dir.path().join("figure_dgw.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("width=\"1200\"") && svg.contains("height=\"800\""));

        let sections = Sections {
            quadrants: false,
            seasons: false,
            figure: false,
        };
        let slim = build_report(&set, sections).unwrap();
        assert_eq!(slim.intervals.len(), 1);
        assert!(slim.figures.is_empty());
    }

    #[test]
    fn empty_results_fail_before_writing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let r = build_report(&ResultSet::default(), Sections::default());
        assert!(matches!(r, Err(ReportError::EmptyScope(_))));
        assert!(!out.exists());
    }

    #[test]
    fn brute_force_optimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..141 * 3).map(|_| rng.gen_range(0.0..50.0f64).round()).collect();
        let set = synthetic(&[0, 2, 4], |o, i| values[(o as usize / 2) * 141 + i], |_, _| 0.0);
        let r = optimum_per_orientation(&set, GlazingId::Dgw, Scope::Annual).unwrap();
        for (k, rec) in r.iter().enumerate() {
            let slice = &values[k * 141..(k + 1) * 141];
            let mut best = 0;
            for i in 0..141 {
                if slice[i] < slice[best] {
                    best = i;
                }
            }
            assert_eq!(rec.best_width_m, widths()[best]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scale_invariance_and_threshold_monotonicity(
            scale in 0.1f64..50.0, min_idx in 1usize..140, bump in 0.1f64..10.0, zero_until in 0usize..141,
        ) {
            let set = synthetic(&[0, 90], vee(min_idx), move |_, i| if i < zero_until { 0.0 } else { 2.0 });
            let mut scaled = set.clone();
            for p in scaled.points.iter_mut() {
                let a = p.breakdown.annual;
                p.breakdown.annual = DegreeHours::new(a.hdh * scale, a.cdh * scale);
            }
            for b in scaled.baselines.iter_mut() {
                let a = b.breakdown.annual;
                b.breakdown.annual = DegreeHours::new(a.hdh * scale, a.cdh * scale);
            }
            let c1 = curves(&set, GlazingId::Dgw).unwrap();
            let c2 = curves(&scaled, GlazingId::Dgw).unwrap();
            for (a, b) in c1.iter().zip(&c2) {
                prop_assert!((a.rel_tdh - b.rel_tdh).abs() < 1e-9);
            }
            let o1 = optimum_per_orientation(&set, GlazingId::Dgw, Scope::Annual).unwrap();
            let o2 = optimum_per_orientation(&scaled, GlazingId::Dgw, Scope::Annual).unwrap();
            for (a, b) in o1.iter().zip(&o2) {
                prop_assert_eq!(a.best_width_m, b.best_width_m);
            }

            let t1 = summer_threshold(&set, GlazingId::Dgw).unwrap().wfr;
            let mut hotter = set.clone();
            for p in hotter.points.iter_mut() {
                let s = p.breakdown.summer;
                p.breakdown.summer = DegreeHours::new(s.hdh, s.cdh + bump);
            }
            let t2 = summer_threshold(&hotter, GlazingId::Dgw).unwrap().wfr;
            prop_assert!(t2 <= t1);
        }
    }
}
