//! Command-line front end: `simulate`, `sweep`, `report` and `validate-weather`.
//!
//! Exit codes: 0 on success, 2 for bad arguments (including out-of-range
//! domain values), 1 for runtime failures. Diagnostics go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::comfort::{aggregate, Category, ComfortError, Season, SeasonScheme};
use crate::config::{Config, ConfigError};
use crate::envelope::{EnvelopeError, GlazingId};
use crate::report::{build_report, emit, ReportError, Sections};
use crate::simulate::{simulate_year_traced, SimulationError};
use crate::sweep::{load_results, run_sweep_to_dir, GridSpec, SweepError};
use crate::weather::{WeatherError, WeatherYear};

const COMMAND_SUMMARY: &str = "\
Commands and flags:
  simulate          --epw --glazing --orientation --width [--config] [--category] [--seasons] [--dump-hourly]
  sweep             --epw --out [--glazing sgw,dgw,tgw] [--orientation-step 2] [--threads N] [--widths] [--config] [--category] [--seasons]
  report            --results --out [--quadrants] [--seasons] [--figure]
  validate-weather  --epw [--config]

Exit status: 0 success, 1 runtime error, 2 invalid arguments.";

#[derive(Debug, Parser)]
#[command(name = "wfr", version, about = "Window-to-floor-ratio study for a free-floating reference room", after_help = COMMAND_SUMMARY)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one room-year and print seasonal degree-hours.
    Simulate(SimulateArgs),
    /// Run the glazing × orientation × width grid and write results.
    Sweep(SweepArgs),
    /// Extract optimum intervals, curves and figures from sweep results.
    Report(ReportArgs),
    /// Parse an EPW file and print record and missing-data counts.
    ValidateWeather(ValidateArgs),
}

/// Options shared by commands that simulate.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// EPW weather file.
    #[arg(long)]
    pub epw: PathBuf,
    /// TOML file overriding room, assembly, model and comfort defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comfort category (I, II or III); overrides the config file.
    #[arg(long)]
    pub category: Option<Category>,
    /// Season scheme: "meteorological", "quarterly" or a 12-letter W/S/U/A
    /// code starting in January; overrides the config file.
    #[arg(long)]
    pub seasons: Option<SeasonScheme>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Glazing type: sgw, dgw or tgw.
    #[arg(long)]
    pub glazing: GlazingId,
    /// Façade azimuth in degrees clockwise from North.
    #[arg(long)]
    pub orientation: f64,
    /// Window width in metres.
    #[arg(long)]
    pub width: f64,
    /// Write hourly node temperatures and solar gain to this CSV file.
    #[arg(long)]
    pub dump_hourly: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output directory; an interrupted sweep into the same directory resumes.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated glazing types.
    #[arg(long, value_delimiter = ',', default_value = "sgw,dgw,tgw")]
    pub glazing: Vec<GlazingId>,
    /// Orientation step in degrees; must divide 360.
    #[arg(long, default_value_t = 2)]
    pub orientation_step: u16,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Comma-separated window widths in metres, replacing the standard grid.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory written by `sweep`.
    #[arg(long)]
    pub results: PathBuf,
    /// Output directory for tables, curves and figures.
    #[arg(long)]
    pub out: PathBuf,
    /// Include per-quadrant interval rows.
    #[arg(long)]
    pub quadrants: bool,
    /// Include per-season interval rows.
    #[arg(long)]
    pub seasons: bool,
    /// Write one SVG figure per glazing.
    #[arg(long)]
    pub figure: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// EPW weather file.
    #[arg(long)]
    pub epw: PathBuf,
    /// TOML config; only the running-mean weight is used.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Weather(#[from] WeatherError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Comfort(#[from] ComfortError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl From<EnvelopeError> for CliError {
    fn from(e: EnvelopeError) -> Self {
        CliError::Argument(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Argument(_) | CliError::Config(ConfigError::Parse(_) | ConfigError::Invalid(_)) => 2,
            CliError::Sweep(SweepError::InvalidGrid(_)) => 2,
            _ => 1,
        }
    }
}

/// Run a parsed command line and map the outcome to an exit code.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Report(a) => cmd_report(&a),
        Command::ValidateWeather(a) => cmd_validate_weather(&a),
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    Ok(match path {
        Some(p) => Config::from_path(p)?,
        None => Config::default(),
    })
}

/// Config file first, then command-line overrides.
fn resolve(model: &ModelArgs) -> Result<(Config, WeatherYear), CliError> {
    let mut config = load_config(model.config.as_deref())?;
    if let Some(c) = model.category {
        config.comfort.category = c;
    }
    if let Some(s) = model.seasons {
        config.comfort.seasons = s;
    }
    config.validate()?;
    let weather = WeatherYear::from_path(&model.epw, config.comfort.running_mean_alpha)?;
    if weather.diagnostics.total_missing() > 0 {
        log::warn!(
            "{}: {} missing values replaced",
            model.epw.display(),
            weather.diagnostics.total_missing()
        );
    }
    Ok((config, weather))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let config = load_config(a.model.config.as_deref())?;
    // Reject bad geometry before reading the weather file.
    let geom = config.room.room(a.orientation, a.width)?;
    let (config, weather) = resolve(&a.model)?;
    let glazing = a.glazing.glazing();

    let mut rows = Vec::new();
    let dumping = a.dump_hourly.is_some();
    let t_op = simulate_year_traced(
        &geom,
        &glazing,
        &config.assemblies,
        &weather,
        &config.model,
        |h, input, _, next| {
            if dumping {
                rows.push((h, input.boundary.t_out, input.solar_gain, *next));
            }
        },
    )?;
    let breakdown = aggregate(
        &t_op,
        &weather.derived.running_mean_outdoor,
        config.comfort.category,
        &config.comfort.seasons,
    )?;

    if let Some(path) = &a.dump_hourly {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Output {
            path: path.display().to_string(),
            source: e.into(),
        };
        w.write_record([
            "hour_index",
            "t_out",
            "solar_gain_W",
            "t_air",
            "t_surface",
            "t_mass",
            "t_operative",
        ])
        .map_err(io)?;
        for (h, t_out, gain, s) in rows {
            w.write_record([
                h.to_string(),
                t_out.to_string(),
                gain.to_string(),
                s.t_air.to_string(),
                s.t_surface.to_string(),
                s.t_mass.to_string(),
                s.t_operative.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().expect("in-memory flush");
        std::fs::write(path, bytes).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        })?;
    }

    let line = |name: &str, dh: &crate::DegreeHours| {
        println!("{name:<8} hdh={:.1} cdh={:.1} tdh={:.1}", dh.hdh, dh.cdh, dh.tdh);
    };
    for s in Season::ALL {
        line(s.as_str(), breakdown.season(s));
    }
    line("annual", &breakdown.annual);
    Ok(())
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let threads = match a.threads {
        Some(0) => return Err(CliError::Argument("--threads must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let mut grid = GridSpec::with_step(a.glazing.clone(), a.orientation_step)?;
    let config = load_config(a.model.config.as_deref())?;
    if let Some(widths) = &a.widths {
        for &w in widths {
            config.room.room(0.0, w)?;
        }
        grid.widths = widths.clone();
        grid = grid.normalized()?;
    }
    let (config, weather) = resolve(&a.model)?;

    log::info!("sweeping {} points on {threads} threads", grid.point_count());
    let tick = (grid.point_count() / 20).max(1);
    let progress = |done: usize, total: usize| {
        if done.is_multiple_of(tick) || done == total {
            log::info!("{done}/{total}");
        }
    };
    let set = run_sweep_to_dir(&weather, &config, &grid, &a.out, threads, &progress)?;
    log::info!(
        "{} points and {} baselines in {}",
        set.points.len(),
        set.baselines.len(),
        a.out.display()
    );
    Ok(())
}

pub fn cmd_report(a: &ReportArgs) -> Result<(), CliError> {
    // No section flags means every section.
    let sections = if a.quadrants || a.seasons || a.figure {
        Sections {
            quadrants: a.quadrants,
            seasons: a.seasons,
            figure: a.figure,
        }
    } else {
        Sections::default()
    };
    let results = load_results(&a.results)?;
    let report = build_report(&results, sections)?;
    for path in emit(&report, &a.out)? {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_validate_weather(a: &ValidateArgs) -> Result<(), CliError> {
    let config = load_config(a.config.as_deref())?;
    let w = WeatherYear::from_path(&a.epw, config.comfort.running_mean_alpha)?;
    let d = &w.diagnostics;
    println!("{} records, {} missing", w.records.len(), d.total_missing());
    println!("missing irradiance values: {}", d.missing_irradiance);
    println!("missing dry-bulb values: {}", d.missing_dry_bulb);
    println!("leap-day records dropped: {}", d.leap_day_records);
    println!("site: {}", w.site.city);
    println!("latitude: {}", w.site.latitude);
    println!("longitude: {}", w.site.longitude);
    println!("timezone: {}", w.site.timezone);
    println!("elevation: {}", w.site.elevation);
    println!("sha256: {}", w.sha256);
    Ok(())
}
