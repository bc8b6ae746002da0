//! Exhaustive glazing × orientation × width sweep and its on-disk results.
//!
//! A sweep directory holds `manifest.json`, `results.csv` and `baselines.csv`.
//! While running, finished chunks are appended to `*.partial.csv` files so an
//! interrupted sweep resumes by skipping keys already present; the final CSVs
//! are written sorted and moved into place with an atomic rename.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comfort::{aggregate, ComfortError, DegreeHours, SeasonalBreakdown};
use crate::config::Config;
use crate::envelope::{wfr, width_grid, wwr, EnvelopeError, GlazingId};
use crate::simulate::{build_network, facade_totals, outdoor_series, simulate_hourly, window_gains, SimulationError};
use crate::weather::WeatherYear;

pub const RESULTS_FILE: &str = "results.csv";
pub const BASELINES_FILE: &str = "baselines.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

const METRIC_COLUMNS: [&str; 11] = [
    "annual_hdh",
    "annual_cdh",
    "annual_tdh",
    "winter_hdh",
    "winter_cdh",
    "spring_hdh",
    "spring_cdh",
    "summer_hdh",
    "summer_cdh",
    "autumn_hdh",
    "autumn_cdh",
];

const CHUNK: usize = 4096;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point {key}: {source}")]
    Simulation { key: String, source: SimulationError },
    #[error("point {key}: {source}")]
    Envelope { key: String, source: EnvelopeError },
    #[error("point {key}: {source}")]
    Comfort { key: String, source: ComfortError },
    #[error("cannot write {path}: {source}")]
    OutputUnwritable { path: String, source: io::Error },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("duplicate key {0}")]
    DuplicateKey(String),
    #[error("truncated results: {0}")]
    TruncatedFile(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// The set of parameter values to sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub glazings: Vec<GlazingId>,
    pub orientations: Vec<u16>,
    pub widths: Vec<f64>,
}

impl GridSpec {
    /// 3 glazings × 180 orientations × 141 widths.
    pub fn full() -> Self {
        Self::with_step(GlazingId::ALL.to_vec(), 2).expect("2 divides 360")
    }

    pub fn with_step(glazings: Vec<GlazingId>, orientation_step: u16) -> Result<Self, SweepError> {
        if orientation_step == 0 || 360 % orientation_step != 0 {
            return Err(SweepError::InvalidGrid(format!(
                "orientation step {orientation_step} does not divide 360"
            )));
        }
        let grid = Self {
            glazings,
            orientations: (0..360).step_by(orientation_step as usize).collect(),
            widths: width_grid(),
        };
        grid.normalized()
    }

    /// Sorts and de-duplicates every axis and checks ranges.
    pub fn normalized(mut self) -> Result<Self, SweepError> {
        self.glazings.sort();
        self.glazings.dedup();
        self.orientations.sort();
        self.orientations.dedup();
        self.widths.sort_by(f64::total_cmp);
        self.widths.dedup();
        if self.glazings.is_empty() || self.orientations.is_empty() || self.widths.is_empty() {
            return Err(SweepError::InvalidGrid("every axis needs at least one value".into()));
        }
        if let Some(o) = self.orientations.iter().find(|&&o| o >= 360) {
            return Err(SweepError::InvalidGrid(format!("orientation {o} outside [0, 360)")));
        }
        if let Some(w) = self.widths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(SweepError::InvalidGrid(format!("width {w} must be positive")));
        }
        Ok(self)
    }

    /// Points ordered lexicographically by (glazing, orientation, width).
    pub fn points(&self) -> Vec<PointKey> {
        let mut out = Vec::with_capacity(self.point_count());
        for &glazing in &self.glazings {
            for &orientation_deg in &self.orientations {
                for &width_m in &self.widths {
                    out.push(PointKey {
                        glazing,
                        orientation_deg,
                        width_m,
                    });
                }
            }
        }
        out
    }

    pub fn point_count(&self) -> usize {
        self.glazings.len() * self.orientations.len() * self.widths.len()
    }

    pub fn counts(&self) -> GridCounts {
        GridCounts {
            glazings: self.glazings.len(),
            orientations: self.orientations.len(),
            widths: self.widths.len(),
            points: self.point_count(),
            baselines: self.orientations.len(),
        }
    }
}

/// Every point of the full study grid.
pub fn enumerate_points() -> Vec<PointKey> {
    GridSpec::full().points()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointKey {
    pub glazing: GlazingId,
    pub orientation_deg: u16,
    pub width_m: f64,
}

impl PointKey {
    fn id(&self) -> (GlazingId, u16, u64) {
        (self.glazing, self.orientation_deg, self.width_m.to_bits())
    }
}

impl std::fmt::Display for PointKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}°, {} m)", self.glazing, self.orientation_deg, self.width_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub glazing: GlazingId,
    pub orientation_deg: u16,
    pub width_m: f64,
    pub wfr: f64,
    pub wwr: f64,
    pub breakdown: SeasonalBreakdown,
}

impl SweepPoint {
    pub fn key(&self) -> PointKey {
        PointKey {
            glazing: self.glazing,
            orientation_deg: self.orientation_deg,
            width_m: self.width_m,
        }
    }
}

/// The zero-window room at one orientation; identical for every glazing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselinePoint {
    pub orientation_deg: u16,
    pub breakdown: SeasonalBreakdown,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultSet {
    pub points: Vec<SweepPoint>,
    pub baselines: Vec<BaselinePoint>,
}

impl ResultSet {
    pub fn sort(&mut self) {
        self.points.sort_by(|a, b| {
            (a.glazing, a.orientation_deg)
                .cmp(&(b.glazing, b.orientation_deg))
                .then(a.width_m.total_cmp(&b.width_m))
        });
        self.baselines.sort_by_key(|b| b.orientation_deg);
    }

    pub fn glazings(&self) -> Vec<GlazingId> {
        let mut g: Vec<_> = self.points.iter().map(|p| p.glazing).collect();
        g.sort();
        g.dedup();
        g
    }

    pub fn baseline(&self, orientation_deg: u16) -> Option<&BaselinePoint> {
        self.baselines.iter().find(|b| b.orientation_deg == orientation_deg)
    }

    /// Points of one glazing grouped by orientation, widths ascending.
    pub fn slices(&self, glazing: GlazingId) -> BTreeMap<u16, Vec<&SweepPoint>> {
        let mut map: BTreeMap<u16, Vec<&SweepPoint>> = BTreeMap::new();
        for p in self.points.iter().filter(|p| p.glazing == glazing) {
            map.entry(p.orientation_deg).or_default().push(p);
        }
        for v in map.values_mut() {
            v.sort_by(|a, b| a.width_m.total_cmp(&b.width_m));
        }
        map
    }

    fn check_unique(&self) -> Result<(), SweepError> {
        let mut seen = HashSet::with_capacity(self.points.len());
        for p in &self.points {
            if !seen.insert(p.key().id()) {
                return Err(SweepError::DuplicateKey(p.key().to_string()));
            }
        }
        let mut seen = HashSet::new();
        for b in &self.baselines {
            if !seen.insert(b.orientation_deg) {
                return Err(SweepError::DuplicateKey(format!("baseline {}°", b.orientation_deg)));
            }
        }
        Ok(())
    }

    /// Checks the Cartesian-product shape: every (glazing, orientation) slice
    /// has the same widths and every orientation has a baseline.
    fn check_shape(&self) -> Result<(), SweepError> {
        let mut widths: Option<Vec<u64>> = None;
        let mut orientations: Option<Vec<u16>> = None;
        for g in self.glazings() {
            let slices = self.slices(g);
            let o: Vec<u16> = slices.keys().copied().collect();
            match &orientations {
                None => orientations = Some(o),
                Some(prev) if *prev != o => {
                    return Err(SweepError::TruncatedFile(format!(
                        "{g} covers a different orientation set"
                    )))
                }
                _ => {}
            }
            for (orient, slice) in slices {
                let w: Vec<u64> = slice.iter().map(|p| p.width_m.to_bits()).collect();
                match &widths {
                    None => widths = Some(w),
                    Some(prev) if *prev != w => {
                        return Err(SweepError::TruncatedFile(format!(
                            "slice ({g}, {orient}°) has {} widths, expected {}",
                            w.len(),
                            prev.len()
                        )))
                    }
                    _ => {}
                }
            }
        }
        if let Some(o) = orientations {
            for orient in o {
                if self.baseline(orient).is_none() {
                    return Err(SweepError::TruncatedFile(format!("no baseline for {orient}°")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCounts {
    pub glazings: usize,
    pub orientations: usize,
    pub widths: usize,
    pub points: usize,
    pub baselines: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub epw_sha256: String,
    pub config: Config,
    pub grid_counts: GridCounts,
    pub grid: GridSpec,
    pub tool_version: String,
}

impl Manifest {
    pub fn new(weather: &WeatherYear, config: &Config, grid: &GridSpec) -> Self {
        Self {
            epw_sha256: weather.sha256.clone(),
            config: *config,
            grid_counts: grid.counts(),
            grid: grid.clone(),
            tool_version: crate::TOOL_VERSION.to_string(),
        }
    }

    fn same_run(&self, other: &Manifest) -> bool {
        self.epw_sha256 == other.epw_sha256 && self.config == other.config && self.grid == other.grid
    }
}

/// Shared, read-only inputs for evaluating points.
pub struct Study<'a> {
    weather: &'a WeatherYear,
    config: Config,
    t_out: Vec<f64>,
    incident: BTreeMap<u16, Vec<f64>>,
}

impl<'a> Study<'a> {
    pub fn new(weather: &'a WeatherYear, config: &Config, orientations: &[u16]) -> Result<Self, SweepError> {
        let rho = config.model.ground_reflectance;
        let incident = orientations
            .par_iter()
            .map(|&o| {
                facade_totals(weather, o as f64, rho)
                    .map(|v| (o, v))
                    .map_err(|source| SweepError::Simulation {
                        key: format!("orientation {o}°"),
                        source,
                    })
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Ok(Self {
            weather,
            config: *config,
            t_out: outdoor_series(weather),
            incident,
        })
    }

    /// Seasonal degree-hours for one room; `glazing` is irrelevant at zero width.
    pub fn evaluate(
        &self,
        glazing: GlazingId,
        orientation_deg: u16,
        width_m: f64,
    ) -> Result<(SeasonalBreakdown, f64, f64), SweepError> {
        let key = || {
            PointKey {
                glazing,
                orientation_deg,
                width_m,
            }
            .to_string()
        };
        let geom = self
            .config
            .room
            .room(orientation_deg as f64, width_m)
            .map_err(|source| SweepError::Envelope { key: key(), source })?;
        let glz = glazing.glazing();
        let net = build_network(&geom, &glz, &self.config.assemblies, &self.config.model)
            .map_err(|source| SweepError::Simulation { key: key(), source })?;
        let incident = self
            .incident
            .get(&orientation_deg)
            .ok_or_else(|| SweepError::InvalidGrid(format!("orientation {orientation_deg} not prepared")))?;
        let gains = window_gains(&geom, &glz, incident);
        let t_op = simulate_hourly(
            &net,
            &self.t_out,
            &self.weather.derived.ground_temp,
            &gains,
            self.config.model.warmup_days,
            |_, _, _, _| {},
        )
        .map_err(|source| SweepError::Simulation { key: key(), source })?;
        let breakdown = aggregate(
            &t_op,
            &self.weather.derived.running_mean_outdoor,
            self.config.comfort.category,
            &self.config.comfort.seasons,
        )
        .map_err(|source| SweepError::Comfort { key: key(), source })?;
        Ok((breakdown, wfr(&geom), wwr(&geom)))
    }

    pub fn point(&self, key: PointKey) -> Result<SweepPoint, SweepError> {
        let (breakdown, wfr, wwr) = self.evaluate(key.glazing, key.orientation_deg, key.width_m)?;
        Ok(SweepPoint {
            glazing: key.glazing,
            orientation_deg: key.orientation_deg,
            width_m: key.width_m,
            wfr,
            wwr,
            breakdown,
        })
    }

    pub fn baseline(&self, orientation_deg: u16) -> Result<BaselinePoint, SweepError> {
        let (breakdown, _, _) = self.evaluate(GlazingId::Sgw, orientation_deg, 0.0)?;
        Ok(BaselinePoint {
            orientation_deg,
            breakdown,
        })
    }
}

enum Task {
    Point(PointKey),
    Baseline(u16),
}

enum Outcome {
    Point(SweepPoint),
    Baseline(BaselinePoint),
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, SweepError> {
    if threads == 0 {
        return Err(SweepError::InvalidGrid("thread count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SweepError::InvalidGrid(e.to_string()))
}

fn run_tasks(
    study: &Study<'_>,
    tasks: &[Task],
    done: &AtomicUsize,
    total: usize,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<Vec<Outcome>, SweepError> {
    tasks
        .par_iter()
        .map(|t| {
            let out = match t {
                Task::Point(k) => study.point(*k).map(Outcome::Point),
                Task::Baseline(o) => study.baseline(*o).map(Outcome::Baseline),
            };
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            out
        })
        .collect()
}

/// Evaluate every grid point plus one zero-window baseline per orientation,
/// in memory. Output is sorted by key and independent of `threads`.
pub fn run_sweep(
    weather: &WeatherYear,
    config: &Config,
    grid: &GridSpec,
    threads: usize,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<ResultSet, SweepError> {
    let grid = grid.clone().normalized()?;
    let pool = thread_pool(threads)?;
    pool.install(|| {
        let study = Study::new(weather, config, &grid.orientations)?;
        let mut tasks: Vec<Task> = grid.points().into_iter().map(Task::Point).collect();
        tasks.extend(grid.orientations.iter().map(|&o| Task::Baseline(o)));
        let done = AtomicUsize::new(0);
        let outcomes = run_tasks(&study, &tasks, &done, tasks.len(), progress)?;
        Ok(collect(outcomes))
    })
}

fn collect(outcomes: Vec<Outcome>) -> ResultSet {
    let mut set = ResultSet::default();
    for o in outcomes {
        match o {
            Outcome::Point(p) => set.points.push(p),
            Outcome::Baseline(b) => set.baselines.push(b),
        }
    }
    set.sort();
    set
}

/// Run a sweep into `out_dir`, resuming from partial files of an identical
/// earlier run and returning immediately if the directory already holds the
/// complete result.
pub fn run_sweep_to_dir(
    weather: &WeatherYear,
    config: &Config,
    grid: &GridSpec,
    out_dir: &Path,
    threads: usize,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<ResultSet, SweepError> {
    let grid = grid.clone().normalized()?;
    let unwritable = |path: &Path| {
        let path = path.display().to_string();
        move |source| SweepError::OutputUnwritable { path, source }
    };
    fs::create_dir_all(out_dir).map_err(unwritable(out_dir))?;

    let manifest = Manifest::new(weather, config, &grid);
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let partial_points = out_dir.join("results.partial.csv");
    let partial_baselines = out_dir.join("baselines.partial.csv");

    let previous = fs::read(&manifest_path)
        .ok()
        .and_then(|b| serde_json::from_slice::<Manifest>(&b).ok());
    let resumable = previous.as_ref().is_some_and(|m| m.same_run(&manifest));
    if resumable {
        if let Ok(set) = load_results(out_dir) {
            log::info!("{} already complete", out_dir.display());
            return Ok(set);
        }
    } else {
        for p in [&partial_points, &partial_baselines] {
            if p.exists() {
                fs::remove_file(p).map_err(unwritable(p))?;
            }
        }
    }
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_atomic(&manifest_path, &json)?;

    let mut have = ResultSet {
        points: read_partial(&partial_points, read_points_csv)?,
        baselines: read_partial(&partial_baselines, read_baselines_csv)?,
    };
    let wanted: HashSet<_> = grid.points().iter().map(PointKey::id).collect();
    have.points.retain(|p| wanted.contains(&p.key().id()));
    have.baselines
        .retain(|b| grid.orientations.contains(&b.orientation_deg));
    // Rewrite the partial files so a torn final line cannot corrupt appends.
    rewrite_partial(&partial_points, &have.points, write_points_csv)?;
    rewrite_partial(&partial_baselines, &have.baselines, write_baselines_csv)?;

    let done_points: HashSet<_> = have.points.iter().map(|p| p.key().id()).collect();
    let done_baselines: HashSet<u16> = have.baselines.iter().map(|b| b.orientation_deg).collect();
    let mut tasks: Vec<Task> = grid
        .orientations
        .iter()
        .filter(|o| !done_baselines.contains(o))
        .map(|&o| Task::Baseline(o))
        .collect();
    tasks.extend(
        grid.points()
            .into_iter()
            .filter(|k| !done_points.contains(&k.id()))
            .map(Task::Point),
    );
    if !have.points.is_empty() || !have.baselines.is_empty() {
        log::info!(
            "resuming: {} points and {} baselines already present",
            have.points.len(),
            have.baselines.len()
        );
    }

    let pool = thread_pool(threads)?;
    let total = tasks.len();
    let done = AtomicUsize::new(0);
    pool.install(|| -> Result<(), SweepError> {
        let study = Study::new(weather, config, &grid.orientations)?;
        for chunk in tasks.chunks(CHUNK) {
            let fresh = collect(run_tasks(&study, chunk, &done, total, progress)?);
            append_partial(&partial_points, &fresh.points, write_points_csv)?;
            append_partial(&partial_baselines, &fresh.baselines, write_baselines_csv)?;
            have.points.extend(fresh.points);
            have.baselines.extend(fresh.baselines);
        }
        Ok(())
    })?;

    have.sort();
    have.check_unique()?;
    let mut buf = Vec::new();
    write_points_csv(&mut buf, &have.points, true)?;
    write_atomic(&out_dir.join(RESULTS_FILE), &buf)?;
    buf.clear();
    write_baselines_csv(&mut buf, &have.baselines, true)?;
    write_atomic(&out_dir.join(BASELINES_FILE), &buf)?;
    for p in [&partial_points, &partial_baselines] {
        fs::remove_file(p).map_err(unwritable(p))?;
    }
    Ok(have)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SweepError> {
    let err = |source| SweepError::OutputUnwritable {
        path: path.display().to_string(),
        source,
    };
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp).map_err(err)?;
        f.write_all(bytes).map_err(err)?;
        f.sync_all().map_err(err)?;
    }
    fs::rename(&tmp, path).map_err(err)
}

fn read_partial<T>(path: &Path, read: fn(&[u8]) -> Result<Vec<T>, SweepError>) -> Result<Vec<T>, SweepError> {
    let Ok(mut bytes) = fs::read(path) else {
        return Ok(Vec::new());
    };
    // Drop a torn trailing line left by an interrupted append.
    if let Some(end) = bytes.iter().rposition(|&b| b == b'\n') {
        bytes.truncate(end + 1);
    } else {
        bytes.clear();
    }
    if bytes.is_empty() {
        return Ok(Vec::new());
    }
    read(&bytes)
}

type RowWriter<T> = fn(&mut Vec<u8>, &[T], bool) -> Result<(), SweepError>;

fn rewrite_partial<T>(path: &Path, rows: &[T], write: RowWriter<T>) -> Result<(), SweepError> {
    if rows.is_empty() {
        if path.exists() {
            fs::remove_file(path)?;
        }
        return Ok(());
    }
    let mut buf = Vec::new();
    write(&mut buf, rows, true)?;
    write_atomic(path, &buf)
}

fn append_partial<T>(path: &Path, rows: &[T], write: RowWriter<T>) -> Result<(), SweepError> {
    if rows.is_empty() {
        return Ok(());
    }
    let err = |source| SweepError::OutputUnwritable {
        path: path.display().to_string(),
        source,
    };
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut buf = Vec::new();
    write(&mut buf, rows, fresh)?;
    let mut f = BufWriter::new(OpenOptions::new().create(true).append(true).open(path).map_err(err)?);
    f.write_all(&buf).map_err(err)?;
    f.into_inner().map_err(|e| err(e.into_error()))?.sync_all().map_err(err)
}

fn metric_values(b: &SeasonalBreakdown) -> [f64; 11] {
    [
        b.annual.hdh,
        b.annual.cdh,
        b.annual.tdh,
        b.winter.hdh,
        b.winter.cdh,
        b.spring.hdh,
        b.spring.cdh,
        b.summer.hdh,
        b.summer.cdh,
        b.autumn.hdh,
        b.autumn.cdh,
    ]
}

fn breakdown_from(v: &[f64]) -> SeasonalBreakdown {
    SeasonalBreakdown {
        annual: DegreeHours {
            hdh: v[0],
            cdh: v[1],
            tdh: v[2],
        },
        winter: DegreeHours::new(v[3], v[4]),
        spring: DegreeHours::new(v[5], v[6]),
        summer: DegreeHours::new(v[7], v[8]),
        autumn: DegreeHours::new(v[9], v[10]),
    }
}

pub fn results_header() -> Vec<&'static str> {
    let mut h = vec!["glazing", "orientation_deg", "width_m", "wfr", "wwr"];
    h.extend(METRIC_COLUMNS);
    h
}

pub fn baselines_header() -> Vec<&'static str> {
    let mut h = vec!["orientation_deg"];
    h.extend(METRIC_COLUMNS);
    h
}

fn flatten_row(mut fields: Vec<String>, breakdown: &SeasonalBreakdown) -> Vec<String> {
    fields.extend(metric_values(breakdown).iter().map(f64::to_string));
    fields
}

pub fn write_points_csv(out: &mut Vec<u8>, points: &[SweepPoint], header: bool) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(results_header()).map_err(csv_io)?;
    }
    for p in points {
        let row = flatten_row(
            vec![
                p.glazing.to_string(),
                p.orientation_deg.to_string(),
                p.width_m.to_string(),
                p.wfr.to_string(),
                p.wwr.to_string(),
            ],
            &p.breakdown,
        );
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_baselines_csv(out: &mut Vec<u8>, baselines: &[BaselinePoint], header: bool) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(baselines_header()).map_err(csv_io)?;
    }
    for b in baselines {
        let row = flatten_row(vec![b.orientation_deg.to_string()], &b.breakdown);
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> SweepError {
    SweepError::Io(io::Error::other(e))
}

fn read_records(bytes: &[u8], expected: &[&str], name: &str) -> Result<Vec<csv::StringRecord>, SweepError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
    let header = rdr
        .headers()
        .map_err(|e| SweepError::SchemaMismatch(format!("{name}: {e}")))?;
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(SweepError::SchemaMismatch(format!(
            "{name}: header {:?} does not match {:?}",
            header.iter().collect::<Vec<_>>(),
            expected
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| SweepError::TruncatedFile(format!("{name} row {}: {e}", i + 1)))?;
        if rec.len() != expected.len() {
            return Err(SweepError::TruncatedFile(format!(
                "{name} row {} has {} fields, expected {}",
                i + 1,
                rec.len(),
                expected.len()
            )));
        }
        rows.push(rec);
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, row: usize) -> Result<T, SweepError> {
    let raw = &rec[idx];
    raw.parse().map_err(|_| {
        SweepError::SchemaMismatch(format!("{name} row {row}: cannot parse {raw:?} in column {}", idx + 1))
    })
}

fn metrics(rec: &csv::StringRecord, first: usize, name: &str, row: usize) -> Result<SeasonalBreakdown, SweepError> {
    let values = (first..first + METRIC_COLUMNS.len())
        .map(|i| field::<f64>(rec, i, name, row))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(breakdown_from(&values))
}

pub fn read_points_csv(bytes: &[u8]) -> Result<Vec<SweepPoint>, SweepError> {
    read_records(bytes, &results_header(), RESULTS_FILE)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let row = i + 1;
            let glazing = rec[0]
                .parse::<GlazingId>()
                .map_err(|e| SweepError::SchemaMismatch(format!("{RESULTS_FILE} row {row}: {e}")))?;
            Ok(SweepPoint {
                glazing,
                orientation_deg: field(rec, 1, RESULTS_FILE, row)?,
                width_m: field(rec, 2, RESULTS_FILE, row)?,
                wfr: field(rec, 3, RESULTS_FILE, row)?,
                wwr: field(rec, 4, RESULTS_FILE, row)?,
                breakdown: metrics(rec, 5, RESULTS_FILE, row)?,
            })
        })
        .collect()
}

pub fn read_baselines_csv(bytes: &[u8]) -> Result<Vec<BaselinePoint>, SweepError> {
    read_records(bytes, &baselines_header(), BASELINES_FILE)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            Ok(BaselinePoint {
                orientation_deg: field(rec, 0, BASELINES_FILE, i + 1)?,
                breakdown: metrics(rec, 1, BASELINES_FILE, i + 1)?,
            })
        })
        .collect()
}

/// Write the two result CSVs and nothing else.
pub fn write_results(dir: &Path, set: &ResultSet) -> Result<(), SweepError> {
    fs::create_dir_all(dir).map_err(|source| SweepError::OutputUnwritable {
        path: dir.display().to_string(),
        source,
    })?;
    let mut buf = Vec::new();
    write_points_csv(&mut buf, &set.points, true)?;
    write_atomic(&dir.join(RESULTS_FILE), &buf)?;
    buf.clear();
    write_baselines_csv(&mut buf, &set.baselines, true)?;
    write_atomic(&dir.join(BASELINES_FILE), &buf)
}

/// Load a sweep directory, checking schema, key uniqueness, grid shape and,
/// when a manifest is present, the recorded counts.
pub fn load_results(dir: &Path) -> Result<ResultSet, SweepError> {
    let read = |name: &str| {
        fs::read(dir.join(name)).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => SweepError::TruncatedFile(format!("{} missing", dir.join(name).display())),
            _ => SweepError::Io(e),
        })
    };
    let mut set = ResultSet {
        points: read_points_csv(&read(RESULTS_FILE)?)?,
        baselines: read_baselines_csv(&read(BASELINES_FILE)?)?,
    };
    set.check_unique()?;
    set.check_shape()?;
    if let Ok(bytes) = fs::read(dir.join(MANIFEST_FILE)) {
        let manifest: Manifest =
            serde_json::from_slice(&bytes).map_err(|e| SweepError::SchemaMismatch(format!("{MANIFEST_FILE}: {e}")))?;
        let c = manifest.grid_counts;
        if set.points.len() != c.points || set.baselines.len() != c.baselines {
            return Err(SweepError::TruncatedFile(format!(
                "{} points and {} baselines, manifest records {} and {}",
                set.points.len(),
                set.baselines.len(),
                c.points,
                c.baselines
            )));
        }
    }
    set.sort();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_point(g: GlazingId, o: u16, w: f64, v: f64) -> SweepPoint {
        let d = DegreeHours::new(v, v / 3.0);
        SweepPoint {
            glazing: g,
            orientation_deg: o,
            width_m: w,
            wfr: w * 2.0 / 22.8,
            wwr: w * 2.0 / 18.9,
            breakdown: SeasonalBreakdown::from_seasons(d, d, DegreeHours::default(), d),
        }
    }

    fn sample_set() -> ResultSet {
        let mut set = ResultSet::default();
        for o in [0, 90] {
            for (i, w) in [0.01, 0.05, 0.1].into_iter().enumerate() {
                set.points
                    .push(sample_point(GlazingId::Dgw, o, w, 100.0 + i as f64 * 0.1 + 1e-7));
            }
            set.baselines.push(BaselinePoint {
                orientation_deg: o,
                breakdown: sample_point(GlazingId::Dgw, o, 0.0, 120.3).breakdown,
            });
        }
        set
    }

    #[test]
    fn grid_cardinality() {
        let pts = enumerate_points();
        assert_eq!(pts.len(), 76_140);
        let g = GridSpec::full();
        assert_eq!(g.orientations.len(), 180);
        assert_eq!(g.widths.len(), 141);
        assert_eq!(*g.orientations.last().unwrap(), 358);
        assert_eq!(
            (pts[0].glazing, pts[0].orientation_deg, pts[0].width_m),
            (GlazingId::Sgw, 0, 0.01)
        );
        assert_eq!(pts[141].orientation_deg, 2);
        assert_eq!(pts[76_139].glazing, GlazingId::Tgw);
        assert!(GridSpec::with_step(vec![GlazingId::Sgw], 7).is_err());
        assert!(GridSpec::with_step(vec![], 2).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let set = sample_set();
        let dir = tempfile::tempdir().unwrap();
        write_results(dir.path(), &set).unwrap();
        let back = load_results(dir.path()).unwrap();
        assert_eq!(back, set);
        let header = fs::read_to_string(dir.path().join(RESULTS_FILE)).unwrap();
        assert!(header.starts_with(
            "glazing,orientation_deg,width_m,wfr,wwr,annual_hdh,annual_cdh,annual_tdh,winter_hdh,winter_cdh,spring_hdh,spring_cdh,summer_hdh,summer_cdh,autumn_hdh,autumn_cdh\n"
        ));
    }

    #[test]
    fn duplicate_row_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_results(dir.path(), &sample_set()).unwrap();
        let path = dir.path().join(RESULTS_FILE);
        let text = fs::read_to_string(&path).unwrap();
        let dup = text.lines().nth(1).unwrap().to_string();
        fs::write(&path, format!("{text}{dup}\n")).unwrap();
        assert!(matches!(load_results(dir.path()), Err(SweepError::DuplicateKey(_))));
    }

    #[test]
    fn missing_column_is_schema_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        write_results(dir.path(), &sample_set()).unwrap();
        let path = dir.path().join(RESULTS_FILE);
        let text = fs::read_to_string(&path).unwrap();
        let cut: String = text
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
            .collect();
        fs::write(&path, cut).unwrap();
        assert!(matches!(load_results(dir.path()), Err(SweepError::SchemaMismatch(_))));
    }

    #[test]
    fn torn_row_and_missing_slice_are_truncation() {
        let dir = tempfile::tempdir().unwrap();
        write_results(dir.path(), &sample_set()).unwrap();
        let path = dir.path().join(RESULTS_FILE);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() - 40]).unwrap();
        assert!(matches!(load_results(dir.path()), Err(SweepError::TruncatedFile(_))));

        let mut set = sample_set();
        set.points.pop();
        write_results(dir.path(), &set).unwrap();
        assert!(matches!(load_results(dir.path()), Err(SweepError::TruncatedFile(_))));
    }
}
