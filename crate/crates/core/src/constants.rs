//! Physical constants and the JSON configuration that may override them.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// SI constants used throughout the crate.
///
/// The fundamental values are CODATA 2018 exact/recommended values. The helium
/// entries are standard superfluid-helium values near 0.1 K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalConstants {
    /// Elementary charge (C).
    pub e: f64,
    /// Electron mass (kg).
    pub m_e: f64,
    /// Planck constant (J s).
    pub h: f64,
    /// Reduced Planck constant (J s). Kept equal to `h / 2π`.
    pub hbar: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Liquid helium density (kg/m³).
    pub rho_he: f64,
    /// Liquid helium surface tension (N/m).
    pub sigma_he: f64,
    /// Gravitational acceleration (m/s²).
    pub g_earth: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    e: 1.602_176_634e-19,
    m_e: 9.109_383_701_5e-31,
    h: 6.626_070_15e-34,
    hbar: 6.626_070_15e-34 / TAU,
    eps0: 8.854_187_812_8e-12,
    mu_b: 9.274_010_078_3e-24,
    k_b: 1.380_649e-23,
    rho_he: 145.0,
    sigma_he: 3.78e-4,
    g_earth: 9.81,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA
    }
}

impl PhysicalConstants {
    /// Coulomb constant e²/(4π ε0) in J·m.
    pub fn coulomb_k(&self) -> f64 {
        self.e * self.e / (2.0 * TAU * self.eps0)
    }

    /// Checks positivity and re-derives `hbar` if a config overrode only `h`.
    pub fn validated(mut self) -> crate::Result<Self> {
        let fields = [
            ("e", self.e),
            ("m_e", self.m_e),
            ("h", self.h),
            ("eps0", self.eps0),
            ("mu_b", self.mu_b),
            ("k_b", self.k_b),
            ("rho_he", self.rho_he),
            ("sigma_he", self.sigma_he),
            ("g_earth", self.g_earth),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::domain(format!(
                    "constant {name} must be positive, got {v}"
                )));
            }
        }
        self.hbar = self.h / TAU;
        Ok(self)
    }
}
