//! Angular/cyclic frequency handling.
//!
//! Everything inside the crate is angular frequency in rad/s. Cyclic values
//! (Hz, MHz, GHz) only appear at I/O boundaries.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Angular frequency in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(pub f64);

impl Frequency {
    pub const fn rad_per_s(value: f64) -> Self {
        Frequency(value)
    }

    pub fn from_hz(f: f64) -> Self {
        Frequency(TAU * f)
    }

    pub fn from_mhz(f: f64) -> Self {
        Frequency(TAU * f * 1e6)
    }

    pub fn from_ghz(f: f64) -> Self {
        Frequency(TAU * f * 1e9)
    }

    /// Angular value (rad/s).
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn hz(self) -> f64 {
        self.0 / TAU
    }

    pub fn mhz(self) -> f64 {
        self.hz() * 1e-6
    }

    pub fn ghz(self) -> f64 {
        self.hz() * 1e-9
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2π × {:.6} GHz", self.ghz())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreqUnit {
    #[serde(rename = "rad/s")]
    RadPerSec,
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "GHz")]
    GHz,
}

impl FreqUnit {
    /// Value of one unit expressed in rad/s.
    fn to_rad_per_s(self) -> f64 {
        match self {
            FreqUnit::RadPerSec => 1.0,
            FreqUnit::Hz => TAU,
            FreqUnit::MHz => TAU * 1e6,
            FreqUnit::GHz => TAU * 1e9,
        }
    }
}

impl FromStr for FreqUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rad/s" | "rad_s" => Ok(FreqUnit::RadPerSec),
            "Hz" | "hz" => Ok(FreqUnit::Hz),
            "MHz" | "mhz" => Ok(FreqUnit::MHz),
            "GHz" | "ghz" => Ok(FreqUnit::GHz),
            other => Err(Error::usage(format!(
                "unknown frequency unit '{other}' (expected rad/s, Hz, MHz or GHz)"
            ))),
        }
    }
}

/// Multiplicative conversion between the supported units.
pub fn convert_frequency(value: f64, from: FreqUnit, to: FreqUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.to_rad_per_s() / to.to_rad_per_s()
}

/// String-tagged variant of [`convert_frequency`] for CLI/config use.
pub fn convert_frequency_str(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_frequency(value, from.parse()?, to.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let ghz = convert_frequency(TAU * 1e9, FreqUnit::RadPerSec, FreqUnit::GHz);
        assert!((ghz - 1.0).abs() < 1e-15);
        let w = convert_frequency(23.0, FreqUnit::MHz, FreqUnit::RadPerSec);
        assert!((w - 1.445_132_620_7e8).abs() < 1.0, "{w}");
        for from in [FreqUnit::RadPerSec, FreqUnit::Hz, FreqUnit::MHz, FreqUnit::GHz] {
            for to in [FreqUnit::RadPerSec, FreqUnit::Hz, FreqUnit::MHz, FreqUnit::GHz] {
                assert_eq!(convert_frequency(0.0, from, to), 0.0);
            }
        }
    }

    #[test]
    fn unknown_unit_is_usage_error() {
        let err = convert_frequency_str(1.0, "THz", "Hz").unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn frequency_accessors() {
        let f = Frequency::from_ghz(7.162);
        assert!((f.ghz() - 7.162).abs() < 1e-12);
        assert!((f.mhz() - 7162.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn round_trip(v in -1e12f64..1e12, a in 0usize..4, b in 0usize..4) {
            let units = [FreqUnit::RadPerSec, FreqUnit::Hz, FreqUnit::MHz, FreqUnit::GHz];
            let there = convert_frequency(v, units[a], units[b]);
            let back = convert_frequency(there, units[b], units[a]);
            prop_assert!((back - v).abs() <= 4.0 * f64::EPSILON * v.abs());
        }
    }
}
