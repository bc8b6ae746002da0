//! Sun position and isotropic-sky irradiance on a vertical façade.
//!
//! Azimuths, for both the sun and the façade normal, are degrees clockwise
//! from North (0 = N, 90 = E, 180 = S, 270 = W).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weather::{day_of_year, HourlyWeather, SiteInfo};

#[derive(Debug, Error, PartialEq)]
pub enum SolarError {
    #[error("day of year {0} outside 1..=365")]
    DayOutOfRange(usize),
    #[error("invalid civil time {month}/{day} hour {hour}")]
    InvalidTime { month: u8, day: u8, hour: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolarPosition {
    /// Radians.
    pub declination: f64,
    /// Radians, negative before solar noon.
    pub hour_angle: f64,
    /// Radians above the horizon.
    pub altitude: f64,
    /// Degrees clockwise from North in [0, 360).
    pub azimuth: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IncidentIrradiance {
    pub beam: f64,
    pub sky_diffuse: f64,
    pub ground_reflected: f64,
    pub total: f64,
}

/// Cooper's relation.
pub fn solar_declination(day_of_year: usize) -> Result<f64, SolarError> {
    if !(1..=365).contains(&day_of_year) {
        return Err(SolarError::DayOutOfRange(day_of_year));
    }
    let deg = 23.45 * (2.0 * PI * (284.0 + day_of_year as f64) / 365.0).sin();
    Ok(deg.to_radians())
}

/// Equation of time in minutes, Spencer's Fourier series (about ±0.5 min).
pub fn equation_of_time(day_of_year: usize) -> f64 {
    let b = 2.0 * PI * (day_of_year as f64 - 1.0) / 365.0;
    229.18
        * (0.000075 + 0.001868 * b.cos() - 0.032077 * b.sin() - 0.014615 * (2.0 * b).cos() - 0.040849 * (2.0 * b).sin())
}

/// Position from latitude (degrees), declination and hour angle (radians).
pub fn position_from_angles(latitude_deg: f64, declination: f64, hour_angle: f64) -> SolarPosition {
    let lat = latitude_deg.to_radians();
    let sin_alt = lat.sin() * declination.sin() + lat.cos() * declination.cos() * hour_angle.cos();
    let altitude = sin_alt.clamp(-1.0, 1.0).asin();

    // Measured from South, positive toward West, then rotated to North-clockwise.
    let from_south = hour_angle
        .sin()
        .atan2(hour_angle.cos() * lat.sin() - declination.tan() * lat.cos());
    let azimuth = normalize_degrees(from_south.to_degrees() + 180.0);

    SolarPosition {
        declination,
        hour_angle,
        altitude,
        azimuth,
    }
}

/// Sun position for an hour-ending record, evaluated at the midpoint of the
/// hour in local standard time.
pub fn solar_position(site: &SiteInfo, month: u8, day: u8, hour: u8) -> Result<SolarPosition, SolarError> {
    let doy = day_of_year(month, day)
        .filter(|_| (1..=24).contains(&hour))
        .ok_or(SolarError::InvalidTime { month, day, hour })?;
    let clock = hour as f64 - 0.5;
    solar_position_at(site, doy, clock)
}

/// Sun position at a fractional local-standard clock hour.
pub fn solar_position_at(site: &SiteInfo, day_of_year: usize, clock_hour: f64) -> Result<SolarPosition, SolarError> {
    let declination = solar_declination(day_of_year)?;
    let correction_min = 4.0 * (site.longitude - 15.0 * site.timezone) + equation_of_time(day_of_year);
    let solar_hour = clock_hour + correction_min / 60.0;
    let hour_angle = (15.0 * (solar_hour - 12.0)).to_radians();
    Ok(position_from_angles(site.latitude, declination, hour_angle))
}

/// Cosine of the incidence angle on a vertical surface, clamped at zero.
pub fn surface_incidence(pos: &SolarPosition, surface_azimuth: f64) -> f64 {
    if pos.altitude <= 0.0 {
        return 0.0;
    }
    let rel = (pos.azimuth - surface_azimuth).to_radians();
    (pos.altitude.cos() * rel.cos()).max(0.0)
}

/// Isotropic-sky split for a vertical surface: both the sky and the ground
/// view factors are one half.
pub fn incident_irradiance(
    w: &HourlyWeather,
    pos: &SolarPosition,
    surface_azimuth: f64,
    ground_reflectance: f64,
) -> IncidentIrradiance {
    const VIEW: f64 = 0.5;
    let beam = w.direct_normal.max(0.0) * surface_incidence(pos, surface_azimuth);
    let sky_diffuse = w.diffuse_horizontal.max(0.0) * VIEW;
    let ground_reflected = ground_reflectance * w.global_horizontal.max(0.0) * VIEW;
    IncidentIrradiance {
        beam,
        sky_diffuse,
        ground_reflected,
        total: beam + sky_diffuse + ground_reflected,
    }
}

/// Sun positions for every record of a year.
pub fn year_positions(site: &SiteInfo, records: &[HourlyWeather]) -> Result<Vec<SolarPosition>, SolarError> {
    records
        .iter()
        .map(|r| solar_position(site, r.month, r.day, r.hour))
        .collect()
}

/// Hourly incident irradiance on one façade orientation.
pub fn facade_irradiance(
    records: &[HourlyWeather],
    positions: &[SolarPosition],
    surface_azimuth: f64,
    ground_reflectance: f64,
) -> Vec<IncidentIrradiance> {
    records
        .iter()
        .zip(positions)
        .map(|(w, p)| incident_irradiance(w, p, surface_azimuth, ground_reflectance))
        .collect()
}

fn normalize_degrees(deg: f64) -> f64 {
    let v = deg.rem_euclid(360.0);
    if v >= 360.0 {
        0.0
    } else {
        v
    }
}
