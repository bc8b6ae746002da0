//! C ABI over `wfr-core`.
//!
//! Every fallible function returns a [`WfrStatus`]; on failure a message is
//! available from [`wfr_last_error_message`] on the same thread. Weather and
//! configuration are opaque handles released with their `_free` function.
//! Passing a null configuration handle means the default configuration.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use wfr_core::comfort::aggregate;
use wfr_core::config::ConfigError;
use wfr_core::envelope::{self, width_grid, EnvelopeError};
use wfr_core::simulate::{simulate_year_traced, SimulationError};
use wfr_core::weather::{daily_mean_drybulb, running_mean_outdoor, WeatherError, HOURS_PER_YEAR};
use wfr_core::{Config, DegreeHours, GlazingId, SeasonalBreakdown, WeatherYear};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WfrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Simulation = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Glazing codes accepted by the `glazing` parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WfrGlazing {
    Single = 0,
    Double = 1,
    Triple = 2,
}

/// Parsed weather year.
pub struct WfrWeather(WeatherYear);

/// Room, assembly, model and comfort settings.
pub struct WfrConfig(Config);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WfrDegreeHours {
    pub hdh: f64,
    pub cdh: f64,
    pub tdh: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WfrBreakdown {
    pub annual: WfrDegreeHours,
    pub winter: WfrDegreeHours,
    pub spring: WfrDegreeHours,
    pub summer: WfrDegreeHours,
    pub autumn: WfrDegreeHours,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WfrSite {
    pub latitude: f64,
    pub longitude: f64,
    pub timezone: f64,
    pub elevation: f64,
    pub records: usize,
    pub missing: usize,
}

impl From<DegreeHours> for WfrDegreeHours {
    fn from(d: DegreeHours) -> Self {
        Self {
            hdh: d.hdh,
            cdh: d.cdh,
            tdh: d.tdh,
        }
    }
}

impl From<SeasonalBreakdown> for WfrBreakdown {
    fn from(b: SeasonalBreakdown) -> Self {
        Self {
            annual: b.annual.into(),
            winter: b.winter.into(),
            spring: b.spring.into(),
            summer: b.summer.into(),
            autumn: b.autumn.into(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(WfrStatus, String);

impl From<WeatherError> for Failure {
    fn from(e: WeatherError) -> Self {
        let status = match e {
            WeatherError::Io(_) => WfrStatus::Io,
            WeatherError::AlphaOutOfRange(_) => WfrStatus::InvalidArgument,
            _ => WfrStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let status = match e {
            ConfigError::Io { .. } => WfrStatus::Io,
            _ => WfrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<EnvelopeError> for Failure {
    fn from(e: EnvelopeError) -> Self {
        Failure(WfrStatus::InvalidArgument, e.to_string())
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        Failure(WfrStatus::Simulation, e.to_string())
    }
}

impl From<wfr_core::comfort::ComfortError> for Failure {
    fn from(e: wfr_core::comfort::ComfortError) -> Self {
        Failure(WfrStatus::Simulation, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(WfrStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `body`, recording any failure or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> WfrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            WfrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            WfrStatus::Panic
        }
    }
}

fn glazing_from(code: u32) -> Result<GlazingId, Failure> {
    match code {
        0 => Ok(GlazingId::Sgw),
        1 => Ok(GlazingId::Dgw),
        2 => Ok(GlazingId::Tgw),
        _ => Err(Failure(
            WfrStatus::InvalidArgument,
            format!("unknown glazing code {code}"),
        )),
    }
}

/// # Safety
/// `config` is null or a live handle from `wfr_config_*`.
unsafe fn config_or_default(config: *const WfrConfig) -> Config {
    if config.is_null() {
        Config::default()
    } else {
        (*config).0
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(WfrStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn wfr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wfr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Parse an EPW file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wfr_weather_open(path: *const c_char, out: *mut *mut WfrWeather) -> WfrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let w = WeatherYear::from_path(Path::new(path), Config::default().comfort.running_mean_alpha)?;
        *out = Box::into_raw(Box::new(WfrWeather(w)));
        Ok(())
    })
}

/// Parse EPW text held in memory.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wfr_weather_from_buffer(data: *const u8, len: usize, out: *mut *mut WfrWeather) -> WfrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if data.is_null() {
            return Err(null("data"));
        }
        let bytes = std::slice::from_raw_parts(data, len);
        let w = WeatherYear::from_bytes(bytes, Config::default().comfort.running_mean_alpha)?;
        *out = Box::into_raw(Box::new(WfrWeather(w)));
        Ok(())
    })
}

/// # Safety
/// `weather` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wfr_weather_free(weather: *mut WfrWeather) {
    if !weather.is_null() {
        drop(Box::from_raw(weather));
    }
}

/// Site metadata and record counts.
///
/// # Safety
/// `weather` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wfr_weather_site(weather: *const WfrWeather, out: *mut WfrSite) -> WfrStatus {
    guard(|| {
        let w = &weather.as_ref().ok_or_else(|| null("weather"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = WfrSite {
            latitude: w.site.latitude,
            longitude: w.site.longitude,
            timezone: w.site.timezone,
            elevation: w.site.elevation,
            records: w.records.len(),
            missing: w.diagnostics.total_missing(),
        };
        Ok(())
    })
}

/// Build a configuration from TOML text; unspecified keys take defaults.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wfr_config_from_toml(toml: *const c_char, out: *mut *mut WfrConfig) -> WfrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = Config::from_toml_str(str_arg(toml, "toml")?)?;
        *out = Box::into_raw(Box::new(WfrConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `config` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wfr_config_free(config: *mut WfrConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Simulates one room-year, writing seasonal degree-hours to `out` and, when
/// `t_operative` is non-null, the hourly operative temperature into a
/// caller buffer of `t_operative_len` ≥ 8760 values.
#[allow(clippy::too_many_arguments)]
unsafe fn simulate_into(
    weather: *const WfrWeather,
    config: *const WfrConfig,
    glazing: u32,
    orientation_deg: f64,
    width_m: f64,
    out: *mut WfrBreakdown,
    t_operative: *mut f64,
    t_operative_len: usize,
) -> Result<(), Failure> {
    let w = &weather.as_ref().ok_or_else(|| null("weather"))?.0;
    let cfg = config_or_default(config);
    let glazing = glazing_from(glazing)?.glazing();
    if !t_operative.is_null() && t_operative_len < HOURS_PER_YEAR {
        return Err(Failure(
            WfrStatus::BufferTooSmall,
            format!("t_operative holds {t_operative_len} values, need {HOURS_PER_YEAR}"),
        ));
    }
    let geom = cfg.room.room(orientation_deg, width_m)?;
    let t_op = simulate_year_traced(&geom, &glazing, &cfg.assemblies, w, &cfg.model, |_, _, _, _| {})?;
    let theta_rm = running_mean_outdoor(&daily_mean_drybulb(&w.records), cfg.comfort.running_mean_alpha)?;
    let breakdown = aggregate(&t_op, &theta_rm, cfg.comfort.category, &cfg.comfort.seasons)?;
    if let Some(out) = out.as_mut() {
        *out = breakdown.into();
    }
    if !t_operative.is_null() {
        std::slice::from_raw_parts_mut(t_operative, HOURS_PER_YEAR).copy_from_slice(&t_op);
    }
    Ok(())
}

/// Seasonal and annual degree-hours for one room.
///
/// # Safety
/// `weather` must be a live handle, `config` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wfr_simulate(
    weather: *const WfrWeather,
    config: *const WfrConfig,
    glazing: u32,
    orientation_deg: f64,
    width_m: f64,
    out: *mut WfrBreakdown,
) -> WfrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        simulate_into(
            weather,
            config,
            glazing,
            orientation_deg,
            width_m,
            out,
            ptr::null_mut(),
            0,
        )
    })
}

/// Hourly operative temperature for one room.
///
/// # Safety
/// `weather` must be a live handle, `config` null or live, and `out` must
/// point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wfr_simulate_hourly(
    weather: *const WfrWeather,
    config: *const WfrConfig,
    glazing: u32,
    orientation_deg: f64,
    width_m: f64,
    out: *mut f64,
    len: usize,
) -> WfrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        simulate_into(
            weather,
            config,
            glazing,
            orientation_deg,
            width_m,
            ptr::null_mut(),
            out,
            len,
        )
    })
}

/// Window-to-floor ratio of the configured room at `width_m`.
///
/// # Safety
/// `config` null or live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wfr_room_wfr(config: *const WfrConfig, width_m: f64, out: *mut f64) -> WfrStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let geom = config_or_default(config).room.room(0.0, width_m)?;
        *out = envelope::wfr(&geom);
        Ok(())
    })
}

/// Copies the standard window-width grid into `out`. `count` always receives
/// the grid length; pass a null `out` to query it.
///
/// # Safety
/// `out` is null or points to `len` writable doubles; `count` is writable.
#[no_mangle]
pub unsafe extern "C" fn wfr_width_grid(out: *mut f64, len: usize, count: *mut usize) -> WfrStatus {
    guard(|| {
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let grid = width_grid();
        *count = grid.len();
        if out.is_null() {
            return Ok(());
        }
        if len < grid.len() {
            return Err(Failure(
                WfrStatus::BufferTooSmall,
                format!("buffer holds {len} values, grid has {}", grid.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, grid.len()).copy_from_slice(&grid);
        Ok(())
    })
}
