//! Run configuration: a TOML file of `key = value` settings grouped in
//! `[room]`, `[assemblies]`, `[model]` and `[comfort]` tables. Every key is
//! optional and falls back to the reference-room defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::comfort::ComfortSettings;
use crate::envelope::{Assemblies, RoomDimensions};
use crate::simulate::ModelParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub room: RoomDimensions,
    pub assemblies: Assemblies,
    pub model: ModelParams,
    pub comfort: ComfortSettings,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.room.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.model.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let alpha = self.comfort.running_mean_alpha;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "running_mean_alpha {alpha} outside (0, 1)"
            )));
        }
        let u = [
            self.assemblies.ext_wall_u,
            self.assemblies.floor_u,
            self.assemblies.roof_u,
        ];
        if u.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(ConfigError::Invalid("U-values must be non-negative".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
