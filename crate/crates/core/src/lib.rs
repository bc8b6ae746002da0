//! Reference-room thermal simulation and window-to-floor-ratio parametric study.
//!
//! The pipeline runs from an EPW weather file ([`weather`]) through façade
//! irradiance ([`solar`]) and a free-floating three-node zone model
//! ([`simulate`]) to adaptive-comfort degree-hours ([`comfort`]). [`sweep`]
//! evaluates the full glazing × orientation × width grid and [`report`]
//! extracts optimum intervals and performance curves from the results.

pub mod cli;
pub mod comfort;
pub mod config;
pub mod envelope;
pub mod report;
pub mod simulate;
pub mod solar;
pub mod sweep;
pub mod weather;

pub use comfort::{Category, DegreeHours, Season, SeasonScheme, SeasonalBreakdown};
pub use config::Config;
pub use envelope::{GlazingId, GlazingType, RoomGeometry};
pub use report::{CurvePoint, IntervalRecord, OptimumRecord};
pub use sweep::{BaselinePoint, GridSpec, ResultSet, SweepPoint};
pub use weather::WeatherYear;

/// Crate version recorded in sweep manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
