//! Reference-room geometry, opaque constructions and the glazing catalog.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Floor area implied by a 7.00 m × 2.00 m window reaching WFR 0.614.
pub const REFERENCE_FLOOR_AREA: f64 = 22.80;
pub const MAX_WINDOW_WIDTH: f64 = 7.00;

#[derive(Debug, Error, PartialEq)]
pub enum EnvelopeError {
    #[error("window width {width} m outside [0, {max}] m")]
    WidthOutOfRange { width: f64, max: f64 },
    #[error("orientation {0}° outside [0, 360)")]
    OrientationOutOfRange(f64),
    #[error("window height {window} m exceeds ceiling height {ceiling} m")]
    WindowTooTall { window: f64, ceiling: f64 },
    #[error("room dimensions must be positive")]
    NonPositiveDimension,
    #[error("unknown glazing {0:?} (expected sgw, dgw or tgw)")]
    UnknownGlazing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GlazingId {
    #[serde(rename = "SGW")]
    Sgw,
    #[serde(rename = "DGW")]
    Dgw,
    #[serde(rename = "TGW")]
    Tgw,
}

impl GlazingId {
    pub const ALL: [GlazingId; 3] = [GlazingId::Sgw, GlazingId::Dgw, GlazingId::Tgw];

    pub fn as_str(self) -> &'static str {
        match self {
            GlazingId::Sgw => "SGW",
            GlazingId::Dgw => "DGW",
            GlazingId::Tgw => "TGW",
        }
    }

    pub fn glazing(self) -> GlazingType {
        glazing_catalog()[self as usize]
    }
}

impl fmt::Display for GlazingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GlazingId {
    type Err = EnvelopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sgw" | "single" => Ok(GlazingId::Sgw),
            "dgw" | "double" => Ok(GlazingId::Dgw),
            "tgw" | "triple" => Ok(GlazingId::Tgw),
            _ => Err(EnvelopeError::UnknownGlazing(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlazingType {
    pub id: GlazingId,
    /// W/m²K, whole window.
    pub u_value: f64,
    pub shgc: f64,
    /// Visible transmittance. Carried for completeness; no daylighting model uses it.
    pub vt: f64,
}

pub fn glazing_catalog() -> [GlazingType; 3] {
    [
        GlazingType {
            id: GlazingId::Sgw,
            u_value: 5.70,
            shgc: 0.66,
            vt: 0.70,
        },
        GlazingType {
            id: GlazingId::Dgw,
            u_value: 2.60,
            shgc: 0.63,
            vt: 0.56,
        },
        GlazingType {
            id: GlazingId::Tgw,
            u_value: 1.00,
            shgc: 0.51,
            vt: 0.42,
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyId {
    ExtWall,
    Floor,
    Roof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Exterior,
    Ground,
    Adiabatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaqueAssembly {
    pub id: AssemblyId,
    pub u_value: f64,
    pub boundary: Boundary,
}

/// The three opaque elements of the reference room. Side and back walls are
/// adiabatic and are not listed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Assemblies {
    pub ext_wall_u: f64,
    pub floor_u: f64,
    pub roof_u: f64,
    pub floor_boundary: Boundary,
    pub roof_boundary: Boundary,
}

impl Default for Assemblies {
    fn default() -> Self {
        Self {
            ext_wall_u: 0.43,
            floor_u: 0.45,
            roof_u: 0.37,
            floor_boundary: Boundary::Ground,
            roof_boundary: Boundary::Exterior,
        }
    }
}

impl Assemblies {
    pub fn elements(&self) -> [OpaqueAssembly; 3] {
        [
            OpaqueAssembly {
                id: AssemblyId::ExtWall,
                u_value: self.ext_wall_u,
                boundary: Boundary::Exterior,
            },
            OpaqueAssembly {
                id: AssemblyId::Floor,
                u_value: self.floor_u,
                boundary: self.floor_boundary,
            },
            OpaqueAssembly {
                id: AssemblyId::Roof,
                u_value: self.roof_u,
                boundary: self.roof_boundary,
            },
        ]
    }
}

/// Fixed room dimensions, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomDimensions {
    pub facade_width: f64,
    pub depth: f64,
    pub ceiling_height: f64,
    pub window_height: f64,
}

impl Default for RoomDimensions {
    fn default() -> Self {
        Self {
            facade_width: MAX_WINDOW_WIDTH,
            depth: REFERENCE_FLOOR_AREA / MAX_WINDOW_WIDTH,
            ceiling_height: 2.70,
            window_height: 2.00,
        }
    }
}

impl RoomDimensions {
    pub fn validate(&self) -> Result<(), EnvelopeError> {
        let dims = [self.facade_width, self.depth, self.ceiling_height, self.window_height];
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(EnvelopeError::NonPositiveDimension);
        }
        if self.window_height > self.ceiling_height {
            return Err(EnvelopeError::WindowTooTall {
                window: self.window_height,
                ceiling: self.ceiling_height,
            });
        }
        Ok(())
    }

    pub fn room(&self, orientation: f64, window_width: f64) -> Result<RoomGeometry, EnvelopeError> {
        self.validate()?;
        if !(orientation.is_finite() && (0.0..360.0).contains(&orientation)) {
            return Err(EnvelopeError::OrientationOutOfRange(orientation));
        }
        if !(window_width.is_finite() && (0.0..=self.facade_width).contains(&window_width)) {
            return Err(EnvelopeError::WidthOutOfRange {
                width: window_width,
                max: self.facade_width,
            });
        }
        Ok(RoomGeometry {
            facade_width: self.facade_width,
            depth: self.depth,
            ceiling_height: self.ceiling_height,
            window_height: self.window_height,
            window_width,
            orientation,
        })
    }
}

/// The reference room with one window in its façade wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomGeometry {
    pub facade_width: f64,
    pub depth: f64,
    pub ceiling_height: f64,
    pub window_height: f64,
    pub window_width: f64,
    /// Outward façade normal, degrees clockwise from North.
    pub orientation: f64,
}

impl RoomGeometry {
    pub fn floor_area(&self) -> f64 {
        self.facade_width * self.depth
    }

    pub fn volume(&self) -> f64 {
        self.floor_area() * self.ceiling_height
    }

    pub fn window_area(&self) -> f64 {
        self.window_width * self.window_height
    }

    pub fn facade_area(&self) -> f64 {
        self.facade_width * self.ceiling_height
    }

    pub fn opaque_facade_area(&self) -> f64 {
        self.facade_area() - self.window_area()
    }
}

pub fn default_room(orientation: f64, window_width: f64) -> Result<RoomGeometry, EnvelopeError> {
    RoomDimensions::default().room(orientation, window_width)
}

/// Window-to-floor ratio.
pub fn wfr(geom: &RoomGeometry) -> f64 {
    geom.window_area() / geom.floor_area()
}

/// Window-to-wall ratio against the gross façade area.
pub fn wwr(geom: &RoomGeometry) -> f64 {
    geom.window_area() / geom.facade_area()
}

/// 0.01 m followed by 0.05 m steps up to the full 7.00 m façade: 141 widths.
pub fn width_grid() -> Vec<f64> {
    std::iter::once(0.01)
        .chain((1..=140).map(|k| k as f64 / 20.0))
        .collect()
}
