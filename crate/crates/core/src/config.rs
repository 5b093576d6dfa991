//! JSON configuration with `constants` and `resonator` sections.
//!
//! Any key left out falls back to the built-in default, so `{}` is a valid
//! config.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::constants::PhysicalConstants;
use crate::resonator::ResonatorParams;
use crate::Result;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub constants: PhysicalConstants,
    pub resonator: ResonatorParams,
    /// Extra sections are kept so callers can read their own keys.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl Config {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let mut cfg: Config = serde_json::from_str(s)?;
        cfg.constants = cfg.constants.validated()?;
        cfg.resonator.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CODATA;

    #[test]
    fn empty_config_is_defaults() {
        let c = Config::from_json_str("{}").unwrap();
        assert_eq!(c.constants, CODATA);
        assert_eq!(c.resonator, ResonatorParams::default());
    }

    #[test]
    fn partial_override() {
        let c = Config::from_json_str(
            r#"{"constants": {"rho_he": 150.0}, "resonator": {"c_r": 6e-15}, "sweep": {"n": 3}}"#,
        )
        .unwrap();
        assert_eq!(c.constants.rho_he, 150.0);
        assert_eq!(c.constants.e, CODATA.e);
        assert_eq!(c.resonator.c_r, 6e-15);
        assert_eq!(c.resonator.l_r, 85e-9);
        assert!(c.extra.contains_key("sweep"));
    }

    #[test]
    fn invalid_override_rejected() {
        assert!(Config::from_json_str(r#"{"resonator": {"l_r": -1.0}}"#).is_err());
        assert!(Config::from_json_str(r#"{"constants": {"e": 0.0}}"#).is_err());
    }
}
