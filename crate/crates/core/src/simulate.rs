//! Free-floating three-node (air / surface / mass) hourly zone model.
//!
//! Topology follows the simple hourly method: infiltration couples the air
//! node to outdoors, the window couples the surface node to outdoors, and the
//! opaque envelope couples the mass node to outdoors (façade wall and roof)
//! and to the ground (floor). Air and surface nodes carry no capacitance and
//! are solved algebraically; the mass node is integrated with Crank–Nicolson
//! over one-hour steps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envelope::{Assemblies, Boundary, GlazingType, RoomGeometry};
use crate::solar::{facade_irradiance, year_positions, SolarError};
use crate::weather::WeatherYear;

const STEP_SECONDS: f64 = 3600.0;

#[derive(Debug, Error, PartialEq)]
pub enum SimulationError {
    #[error("room has zero floor area")]
    DegenerateGeometry,
    #[error("invalid model parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("envelope conductance for the {0} boundary exceeds the mass-surface coupling")]
    InvalidConductance(&'static str),
    #[error("thermal network is singular: {0}")]
    SingularNetwork(&'static str),
    #[error("non-finite state at hour {hour}")]
    NonFiniteState { hour: usize },
    #[error("input length mismatch: {0}")]
    LengthMismatch(String),
    #[error(transparent)]
    Solar(#[from] SolarError),
}

/// Coefficients of the simplified zone model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Infiltration, air changes per hour.
    pub ach: f64,
    /// Volumetric heat capacity of air, J/m³K.
    pub air_heat_capacity: f64,
    /// Air to surface film coefficient, W/m²K.
    pub h_is: f64,
    /// Surface to mass coefficient, W/m²K.
    pub h_ms: f64,
    /// Internal surface area per floor area.
    pub lambda_at: f64,
    /// Effective mass area per floor area.
    pub mass_area_factor: f64,
    /// Internal heat capacity per floor area, J/m²K.
    pub kappa_m: f64,
    pub ground_reflectance: f64,
    pub warmup_days: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            ach: 0.4,
            air_heat_capacity: 1200.0,
            h_is: 3.45,
            h_ms: 9.1,
            lambda_at: 4.5,
            mass_area_factor: 2.5,
            kappa_m: 165_000.0,
            ground_reflectance: 0.2,
            warmup_days: 14,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let positive = [
            ("h_is", self.h_is),
            ("h_ms", self.h_ms),
            ("lambda_at", self.lambda_at),
            ("mass_area_factor", self.mass_area_factor),
            ("kappa_m", self.kappa_m),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimulationError::InvalidParameter { name, value });
            }
        }
        for (name, value) in [("ach", self.ach), ("air_heat_capacity", self.air_heat_capacity)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SimulationError::InvalidParameter { name, value });
            }
        }
        if !(0.0..=1.0).contains(&self.ground_reflectance) {
            return Err(SimulationError::InvalidParameter {
                name: "ground_reflectance",
                value: self.ground_reflectance,
            });
        }
        if self.mass_area_factor > self.lambda_at {
            return Err(SimulationError::InvalidParameter {
                name: "mass_area_factor",
                value: self.mass_area_factor,
            });
        }
        Ok(())
    }
}

/// Conductances (W/K), capacitance (J/K) and areas (m²) of one room.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalNetwork {
    pub h_win: f64,
    pub h_inf: f64,
    pub h_is: f64,
    pub h_ms: f64,
    pub h_em_ext: f64,
    pub h_em_gnd: f64,
    pub c_m: f64,
    pub a_m: f64,
    pub a_tot: f64,
    h_ms_coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarSplit {
    pub mass: f64,
    pub surface: f64,
    pub air: f64,
}

pub fn build_network(
    geom: &RoomGeometry,
    glazing: &GlazingType,
    assemblies: &Assemblies,
    params: &ModelParams,
) -> Result<ThermalNetwork, SimulationError> {
    params.validate()?;
    let floor = geom.floor_area();
    if !(floor.is_finite() && floor > 0.0) {
        return Err(SimulationError::DegenerateGeometry);
    }

    let h_win = glazing.u_value * geom.window_area();
    let h_inf = params.air_heat_capacity * geom.volume() * params.ach / 3600.0;
    let a_tot = params.lambda_at * floor;
    let h_is = params.h_is * a_tot;
    let a_m = params.mass_area_factor * floor;
    let h_ms = params.h_ms * a_m;

    let (mut ua_ext, mut ua_gnd) = (0.0, 0.0);
    for el in assemblies.elements() {
        let area = match el.id {
            crate::envelope::AssemblyId::ExtWall => geom.opaque_facade_area(),
            crate::envelope::AssemblyId::Floor | crate::envelope::AssemblyId::Roof => floor,
        };
        match el.boundary {
            Boundary::Exterior => ua_ext += el.u_value * area,
            Boundary::Ground => ua_gnd += el.u_value * area,
            Boundary::Adiabatic => {}
        }
    }

    let ua_total = ua_ext + ua_gnd;
    let split = |ua: f64, name: &'static str| -> Result<f64, SimulationError> {
        if ua <= 0.0 {
            return Ok(0.0);
        }
        let share = ua / ua_total;
        let inv = 1.0 / ua - share / h_ms;
        if inv <= 0.0 {
            return Err(SimulationError::InvalidConductance(name));
        }
        Ok(1.0 / inv)
    };

    Ok(ThermalNetwork {
        h_win,
        h_inf,
        h_is,
        h_ms,
        h_em_ext: split(ua_ext, "exterior")?,
        h_em_gnd: split(ua_gnd, "ground")?,
        c_m: params.kappa_m * floor,
        a_m,
        a_tot,
        h_ms_coefficient: params.h_ms,
    })
}

impl ThermalNetwork {
    /// Fractions of the transmitted solar gain delivered to each node.
    pub fn solar_split(&self) -> SolarSplit {
        let mass = self.a_m / self.a_tot;
        let surface = (1.0 - mass - self.h_win / (self.h_ms_coefficient * self.a_tot)).max(0.0);
        SolarSplit {
            mass,
            surface,
            air: 1.0 - mass - surface,
        }
    }

    /// Reduced coefficients after eliminating the air and surface nodes.
    fn reduced(&self) -> Reduced {
        let air_total = self.h_inf + self.h_is;
        let air_to_surface = self.h_is / air_total;
        let h_air_path = self.h_inf * air_to_surface;
        let h_surface_out = h_air_path + self.h_win;
        let surface_total = self.h_ms + h_surface_out;
        Reduced {
            air_total,
            air_to_surface,
            h_surface_out,
            surface_total,
            h_mass_out: self.h_ms * h_surface_out / surface_total,
            mass_share: self.h_ms / surface_total,
        }
    }
}

struct Reduced {
    air_total: f64,
    air_to_surface: f64,
    h_surface_out: f64,
    surface_total: f64,
    h_mass_out: f64,
    mass_share: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTemps {
    pub t_out: f64,
    pub t_ground: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyState {
    pub t_air: f64,
    pub t_surface: f64,
    pub t_mass: f64,
    pub t_operative: f64,
    pub solar_gain: f64,
}

impl HourlyState {
    pub fn uniform(t: f64) -> Self {
        Self {
            t_air: t,
            t_surface: t,
            t_mass: t,
            t_operative: t,
            solar_gain: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTemps {
    pub t_air: f64,
    pub t_surface: f64,
    pub t_mass: f64,
}

/// Air and surface temperatures given the mass temperature acting over the step.
fn algebraic_nodes(
    net: &ThermalNetwork,
    r: &Reduced,
    t_mass: f64,
    b: BoundaryTemps,
    split: SolarSplit,
    gain: f64,
) -> (f64, f64) {
    let phi_st = split.surface * gain;
    let phi_ia = split.air * gain;
    let t_surface =
        t_mass + (r.h_surface_out * (b.t_out - t_mass) + phi_st + r.air_to_surface * phi_ia) / r.surface_total;
    let t_air = t_surface + (net.h_inf * (b.t_out - t_surface) + phi_ia) / r.air_total;
    (t_air, t_surface)
}

/// Net heat flow into the mass node at mass temperature `t_mass`.
fn mass_flux(net: &ThermalNetwork, r: &Reduced, t_mass: f64, b: BoundaryTemps, split: SolarSplit, gain: f64) -> f64 {
    (r.h_mass_out + net.h_em_ext) * (b.t_out - t_mass)
        + net.h_em_gnd * (b.t_ground - t_mass)
        + split.mass * gain
        + r.mass_share * (split.surface * gain + r.air_to_surface * split.air * gain)
}

pub fn step_hour(
    net: &ThermalNetwork,
    state: &HourlyState,
    boundary: BoundaryTemps,
    solar_gain: f64,
) -> Result<HourlyState, SimulationError> {
    let r = net.reduced();
    let split = net.solar_split();
    let damping = r.h_mass_out + net.h_em_ext + net.h_em_gnd;

    let flux = mass_flux(net, &r, state.t_mass, boundary, split, solar_gain);
    let t_mass = state.t_mass + flux / (net.c_m / STEP_SECONDS + 0.5 * damping);
    let t_mass_mean = 0.5 * (state.t_mass + t_mass);
    let (t_air, t_surface) = algebraic_nodes(net, &r, t_mass_mean, boundary, split, solar_gain);

    let next = HourlyState {
        t_air,
        t_surface,
        t_mass,
        t_operative: 0.5 * (t_air + t_surface),
        solar_gain,
    };
    if [t_air, t_surface, t_mass].iter().all(|t| t.is_finite()) {
        Ok(next)
    } else {
        Err(SimulationError::NonFiniteState { hour: 0 })
    }
}

/// Largest relative energy-balance residual at the air and surface nodes for
/// the step `prev -> next`.
pub fn node_residual(net: &ThermalNetwork, prev: &HourlyState, next: &HourlyState, boundary: BoundaryTemps) -> f64 {
    let split = net.solar_split();
    let t_mass_mean = 0.5 * (prev.t_mass + next.t_mass);
    let (ta, ts) = (next.t_air, next.t_surface);

    let air = [
        net.h_inf * (boundary.t_out - ta),
        net.h_is * (ts - ta),
        split.air * next.solar_gain,
    ];
    let surface = [
        net.h_is * (ta - ts),
        net.h_win * (boundary.t_out - ts),
        net.h_ms * (t_mass_mean - ts),
        split.surface * next.solar_gain,
    ];
    let relative = |terms: &[f64]| {
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        if scale == 0.0 {
            0.0
        } else {
            terms.iter().sum::<f64>().abs() / scale
        }
    };
    relative(&air).max(relative(&surface))
}

/// Exact steady state of the network under constant boundaries and gain.
pub fn steady_state(
    net: &ThermalNetwork,
    boundary: BoundaryTemps,
    solar_gain: f64,
) -> Result<NodeTemps, SimulationError> {
    if net.h_inf + net.h_is <= 0.0 {
        return Err(SimulationError::SingularNetwork("air node has no conductance"));
    }
    if net.h_ms + net.h_is + net.h_win <= 0.0 {
        return Err(SimulationError::SingularNetwork("surface node has no conductance"));
    }
    let r = net.reduced();
    let damping = r.h_mass_out + net.h_em_ext + net.h_em_gnd;
    if damping <= 0.0 {
        return Err(SimulationError::SingularNetwork("mass node has no path to a boundary"));
    }
    let split = net.solar_split();
    // Solve flux(t) = 0; flux is affine in t with slope -damping.
    let reference = boundary.t_out;
    let t_mass = reference + mass_flux(net, &r, reference, boundary, split, solar_gain) / damping;
    let (t_air, t_surface) = algebraic_nodes(net, &r, t_mass, boundary, split, solar_gain);
    Ok(NodeTemps {
        t_air,
        t_surface,
        t_mass,
    })
}

/// One hour of simulation input after the year's drivers are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HourlyInput {
    pub boundary: BoundaryTemps,
    pub solar_gain: f64,
}

/// Run a year of hourly steps after `warmup_days` repetitions of the first day.
///
/// `observe` sees every year hour as `(hour_index, input, prev, next)`.
pub fn simulate_hourly<F>(
    net: &ThermalNetwork,
    t_out: &[f64],
    t_ground_daily: &[f64],
    solar_gain: &[f64],
    warmup_days: usize,
    mut observe: F,
) -> Result<Vec<f64>, SimulationError>
where
    F: FnMut(usize, &HourlyInput, &HourlyState, &HourlyState),
{
    let hours = t_out.len();
    if solar_gain.len() != hours || t_ground_daily.len() * 24 != hours || hours < 24 {
        return Err(SimulationError::LengthMismatch(format!(
            "{} outdoor hours, {} gain hours, {} ground days",
            hours,
            solar_gain.len(),
            t_ground_daily.len()
        )));
    }
    let input = |h: usize| HourlyInput {
        boundary: BoundaryTemps {
            t_out: t_out[h],
            t_ground: t_ground_daily[h / 24],
        },
        solar_gain: solar_gain[h],
    };

    let first_day_mean = t_out[..24].iter().sum::<f64>() / 24.0;
    let mut state = HourlyState::uniform(first_day_mean);
    for _ in 0..warmup_days {
        for h in 0..24 {
            let i = input(h);
            state = step_hour(net, &state, i.boundary, i.solar_gain)
                .map_err(|_| SimulationError::NonFiniteState { hour: h })?;
        }
    }

    let mut out = Vec::with_capacity(hours);
    for h in 0..hours {
        let i = input(h);
        let next = step_hour(net, &state, i.boundary, i.solar_gain)
            .map_err(|_| SimulationError::NonFiniteState { hour: h })?;
        observe(h, &i, &state, &next);
        out.push(next.t_operative);
        state = next;
    }
    Ok(out)
}

/// Hourly outdoor dry-bulb series of a weather year.
pub fn outdoor_series(weather: &WeatherYear) -> Vec<f64> {
    weather.records.iter().map(|r| r.dry_bulb).collect()
}

/// Total incident irradiance (W/m²) on a façade for every hour of the year.
pub fn facade_totals(
    weather: &WeatherYear,
    orientation: f64,
    ground_reflectance: f64,
) -> Result<Vec<f64>, SimulationError> {
    let positions = year_positions(&weather.site, &weather.records)?;
    Ok(
        facade_irradiance(&weather.records, &positions, orientation, ground_reflectance)
            .into_iter()
            .map(|i| i.total)
            .collect(),
    )
}

/// Transmitted solar gain (W) through the window for each hour.
pub fn window_gains(geom: &RoomGeometry, glazing: &GlazingType, incident_totals: &[f64]) -> Vec<f64> {
    let factor = glazing.shgc * geom.window_area();
    incident_totals.iter().map(|i| factor * i).collect()
}

/// Operative temperature for every hour of the weather year.
pub fn simulate_year(
    geom: &RoomGeometry,
    glazing: &GlazingType,
    assemblies: &Assemblies,
    weather: &WeatherYear,
    params: &ModelParams,
) -> Result<Vec<f64>, SimulationError> {
    simulate_year_traced(geom, glazing, assemblies, weather, params, |_, _, _, _| {})
}

pub fn simulate_year_traced<F>(
    geom: &RoomGeometry,
    glazing: &GlazingType,
    assemblies: &Assemblies,
    weather: &WeatherYear,
    params: &ModelParams,
    observe: F,
) -> Result<Vec<f64>, SimulationError>
where
    F: FnMut(usize, &HourlyInput, &HourlyState, &HourlyState),
{
    let net = build_network(geom, glazing, assemblies, params)?;
    let incident = facade_totals(weather, geom.orientation, params.ground_reflectance)?;
    let gains = window_gains(geom, glazing, &incident);
    simulate_hourly(
        &net,
        &outdoor_series(weather),
        &weather.derived.ground_temp,
        &gains,
        params.warmup_days,
        observe,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{default_room, GlazingId};
    use proptest::prelude::*;

    fn net(width: f64, glazing: GlazingId) -> ThermalNetwork {
        build_network(
            &default_room(180.0, width).unwrap(),
            &glazing.glazing(),
            &Assemblies::default(),
            &ModelParams::default(),
        )
        .unwrap()
    }

    /// Independent oracle: assemble the full 3x3 nodal system and solve it
    /// by Gaussian elimination with partial pivoting.
    #[allow(clippy::needless_range_loop)]
    fn oracle(n: &ThermalNetwork, b: BoundaryTemps, gain: f64) -> [f64; 3] {
        let s = n.solar_split();
        // unknowns: air, surface, mass
        let mut m = [
            [n.h_inf + n.h_is, -n.h_is, 0.0, n.h_inf * b.t_out + s.air * gain],
            [
                -n.h_is,
                n.h_is + n.h_win + n.h_ms,
                -n.h_ms,
                n.h_win * b.t_out + s.surface * gain,
            ],
            [
                0.0,
                -n.h_ms,
                n.h_ms + n.h_em_ext + n.h_em_gnd,
                n.h_em_ext * b.t_out + n.h_em_gnd * b.t_ground + s.mass * gain,
            ],
        ];
        for col in 0..3 {
            let pivot = (col..3)
                .max_by(|&a, &c| m[a][col].abs().total_cmp(&m[c][col].abs()))
                .unwrap();
            m.swap(col, pivot);
            for row in col + 1..3 {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        let mut x = [0.0; 3];
        for row in (0..3).rev() {
            let mut acc = m[row][3];
            for k in row + 1..3 {
                acc -= m[row][k] * x[k];
            }
            x[row] = acc / m[row][row];
        }
        x
    }

    #[test]
    fn network_examples() {
        let n = net(7.0, GlazingId::Sgw);
        assert!((n.h_win - 79.8).abs() < 1e-9);
        assert!((n.h_inf - 1200.0 * 61.56 * 0.4 / 3600.0).abs() < 1e-9);
        assert!((n.h_inf - 8.21).abs() < 0.01);
        assert_eq!(net(0.0, GlazingId::Sgw).h_win, 0.0);
        assert!((n.a_tot - 4.5 * 22.8).abs() < 1e-9);
        assert!((n.h_ms - 9.1 * 2.5 * 22.8).abs() < 1e-9);
        assert!((n.c_m - 165_000.0 * 22.8).abs() < 1e-6);

        // Series construction recovers the envelope UA values.
        let ua_ext = 0.43 * (18.9 - 14.0) + 0.37 * 22.8;
        let ua_gnd = 0.45 * 22.8;
        let f_ext = ua_ext / (ua_ext + ua_gnd);
        let back = 1.0 / (1.0 / n.h_em_ext + f_ext / n.h_ms);
        assert!((back - ua_ext).abs() < 1e-9);
        let f_gnd = 1.0 - f_ext;
        assert!((1.0 / (1.0 / n.h_em_gnd + f_gnd / n.h_ms) - ua_gnd).abs() < 1e-9);
    }

    #[test]
    fn degenerate_geometry() {
        let mut g = default_room(0.0, 1.0).unwrap();
        g.depth = 0.0;
        assert_eq!(
            build_network(
                &g,
                &GlazingId::Sgw.glazing(),
                &Assemblies::default(),
                &ModelParams::default()
            ),
            Err(SimulationError::DegenerateGeometry)
        );
    }

    #[test]
    fn solar_split_sums_to_one() {
        for w in [0.0, 3.5, 7.0] {
            let s = net(w, GlazingId::Sgw).solar_split();
            assert!((s.mass + s.surface + s.air - 1.0).abs() < 1e-15);
            assert!(s.air >= 0.0 && s.surface >= 0.0);
        }
    }

    #[test]
    fn equilibrium_is_exact() {
        let n = net(3.5, GlazingId::Dgw);
        let b = BoundaryTemps {
            t_out: 10.0,
            t_ground: 10.0,
        };
        let mut s = HourlyState::uniform(10.0);
        for _ in 0..100 {
            s = step_hour(&n, &s, b, 0.0).unwrap();
            assert_eq!(s, HourlyState::uniform(10.0));
        }
    }

    #[test]
    fn relaxation_is_monotone_and_converges() {
        let n = net(3.5, GlazingId::Dgw);
        let b = BoundaryTemps {
            t_out: 10.0,
            t_ground: 10.0,
        };
        let mut s = HourlyState {
            t_mass: 30.0,
            ..HourlyState::uniform(30.0)
        };
        let mut hours = 0;
        loop {
            let next = step_hour(&n, &s, b, 0.0).unwrap();
            assert!(next.t_mass < s.t_mass && next.t_mass >= 10.0);
            s = next;
            hours += 1;
            if [s.t_air, s.t_surface, s.t_mass].iter().all(|t| (t - 10.0).abs() < 0.01) {
                break;
            }
            assert!(hours <= 240, "did not settle within 240 h");
        }
    }

    #[test]
    fn converges_to_analytic_steady_state() {
        let n = net(2.0, GlazingId::Sgw);
        let b = BoundaryTemps {
            t_out: 5.0,
            t_ground: 12.0,
        };
        let target = steady_state(&n, b, 500.0).unwrap();
        let x = oracle(&n, b, 500.0);
        assert!((target.t_air - x[0]).abs() < 1e-9);
        assert!((target.t_surface - x[1]).abs() < 1e-9);
        assert!((target.t_mass - x[2]).abs() < 1e-9);

        let mut s = HourlyState::uniform(5.0);
        for _ in 0..2000 {
            s = step_hour(&n, &s, b, 500.0).unwrap();
        }
        assert!((s.t_air - target.t_air).abs() < 0.01);
        assert!((s.t_surface - target.t_surface).abs() < 0.01);
        assert!((s.t_mass - target.t_mass).abs() < 0.01);
    }

    #[test]
    fn steady_state_fixed_point_and_superposition() {
        let n = net(4.0, GlazingId::Tgw);
        let b = BoundaryTemps {
            t_out: 17.0,
            t_ground: 17.0,
        };
        let s = steady_state(&n, b, 0.0).unwrap();
        assert!(
            (s.t_air - 17.0).abs() < 1e-12 && (s.t_surface - 17.0).abs() < 1e-12 && (s.t_mass - 17.0).abs() < 1e-12
        );

        let b = BoundaryTemps {
            t_out: 3.0,
            t_ground: 11.0,
        };
        let zero = steady_state(&n, b, 0.0).unwrap();
        let a = steady_state(&n, b, 300.0).unwrap();
        let c = steady_state(&n, b, 700.0).unwrap();
        let ac = steady_state(&n, b, 1000.0).unwrap();
        assert!((ac.t_air - (a.t_air + c.t_air - zero.t_air)).abs() < 1e-9);
        assert!((ac.t_mass - (a.t_mass + c.t_mass - zero.t_mass)).abs() < 1e-9);
    }

    #[test]
    fn singular_network() {
        let mut n = net(1.0, GlazingId::Sgw);
        n.h_em_ext = 0.0;
        n.h_em_gnd = 0.0;
        n.h_win = 0.0;
        n.h_inf = 0.0;
        assert!(matches!(
            steady_state(
                &n,
                BoundaryTemps {
                    t_out: 0.0,
                    t_ground: 0.0
                },
                0.0
            ),
            Err(SimulationError::SingularNetwork(_))
        ));
    }

    #[test]
    fn non_finite_aborts() {
        let n = net(1.0, GlazingId::Sgw);
        let r = step_hour(
            &n,
            &HourlyState::uniform(10.0),
            BoundaryTemps {
                t_out: f64::NAN,
                t_ground: 0.0,
            },
            0.0,
        );
        assert!(matches!(r, Err(SimulationError::NonFiniteState { .. })));
    }

    #[test]
    fn isothermal_year_and_determinism() {
        let n = net(0.0, GlazingId::Sgw);
        let t_out = vec![10.0; 8760];
        let ground = vec![10.0; 365];
        let gains = vec![0.0; 8760];
        let out = simulate_hourly(&n, &t_out, &ground, &gains, 14, |_, _, _, _| {}).unwrap();
        assert_eq!(out.len(), 8760);
        assert!(out.iter().all(|t| (t - 10.0).abs() < 0.01));

        let t_out: Vec<f64> = (0..8760)
            .map(|h| 10.0 + 8.0 * (h as f64 / 24.0 * std::f64::consts::TAU).sin())
            .collect();
        let gains: Vec<f64> = (0..8760)
            .map(|h| if h % 24 > 8 && h % 24 < 16 { 400.0 } else { 0.0 })
            .collect();
        let n = net(3.0, GlazingId::Dgw);
        let a = simulate_hourly(&n, &t_out, &ground, &gains, 14, |_, _, _, _| {}).unwrap();
        let b = simulate_hourly(&n, &t_out, &ground, &gains, 14, |_, _, _, _| {}).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn larger_window_runs_colder() {
        let b = BoundaryTemps {
            t_out: 0.0,
            t_ground: 10.0,
        };
        let big = steady_state(&net(7.0, GlazingId::Sgw), b, 0.0).unwrap();
        let small = steady_state(&net(0.01, GlazingId::Sgw), b, 0.0).unwrap();
        let op = |s: NodeTemps| 0.5 * (s.t_air + s.t_surface);
        assert!(op(big) < op(small));

        let t_out = vec![0.0; 8760];
        let ground = vec![10.0; 365];
        let gains = vec![0.0; 8760];
        let run = |w| simulate_hourly(&net(w, GlazingId::Sgw), &t_out, &ground, &gains, 14, |_, _, _, _| {}).unwrap();
        let (big, small) = (run(7.0), run(0.01));
        assert!(big[8759] < small[8759]);
        assert!((big[8759] - op(steady_state(&net(7.0, GlazingId::Sgw), b, 0.0).unwrap())).abs() < 0.01);
    }

    #[test]
    fn length_mismatch() {
        let n = net(1.0, GlazingId::Sgw);
        let r = simulate_hourly(&n, &[0.0; 48], &[0.0; 3], &[0.0; 48], 1, |_, _, _, _| {});
        assert!(matches!(r, Err(SimulationError::LengthMismatch(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn steady_state_matches_generic_solver(
            width in 0.0f64..7.0, t_out in -10.0f64..40.0, t_gnd in -5.0f64..25.0, gain in 0.0f64..3000.0,
            which in 0usize..3,
        ) {
            let n = net(width, GlazingId::ALL[which]);
            let b = BoundaryTemps { t_out, t_ground: t_gnd };
            let s = steady_state(&n, b, gain).unwrap();
            let x = oracle(&n, b, gain);
            prop_assert!((s.t_air - x[0]).abs() < 1e-8);
            prop_assert!((s.t_surface - x[1]).abs() < 1e-8);
            prop_assert!((s.t_mass - x[2]).abs() < 1e-8);
        }

        #[test]
        fn step_balances_algebraic_nodes(
            width in 0.0f64..7.0, t_out in -10.0f64..40.0, t_gnd in -5.0f64..25.0,
            gain in 0.0f64..3000.0, t0 in -5.0f64..35.0,
        ) {
            let n = net(width, GlazingId::Sgw);
            let b = BoundaryTemps { t_out, t_ground: t_gnd };
            let prev = HourlyState::uniform(t0);
            let next = step_hour(&n, &prev, b, gain).unwrap();
            prop_assert!(node_residual(&n, &prev, &next, b) < 1e-6);
        }

        #[test]
        fn zero_sun_stays_bounded(
            temps in proptest::collection::vec(-10.0f64..35.0, 48), t0 in -10.0f64..35.0,
        ) {
            let n = net(3.0, GlazingId::Sgw);
            let lo = temps.iter().cloned().fold(t0, f64::min);
            let hi = temps.iter().cloned().fold(t0, f64::max);
            let mut s = HourlyState::uniform(t0);
            for pair in temps.chunks(2) {
                s = step_hour(&n, &s, BoundaryTemps { t_out: pair[0], t_ground: pair[1] }, 0.0).unwrap();
                for t in [s.t_air, s.t_surface, s.t_mass] {
                    prop_assert!(t >= lo - 1e-9 && t <= hi + 1e-9);
                }
            }
        }
    }
}
