//! Lumped-element description of the half-wave differential resonator mode.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::units::Frequency;
use crate::{Error, Result};

/// Lumped resonator model. Rates are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResonatorParams {
    /// Inductance of one resonator half (H).
    pub l_r: f64,
    /// Capacitance of one resonator half (F).
    pub c_r: f64,
    /// Bias tail inductance (H); only enters the common mode.
    pub l_tail: f64,
    /// Capacitive coupling across the dot (F).
    pub c_dot: f64,
    /// Input port coupling rate (rad/s).
    pub kappa_1: f64,
    /// Output port coupling rate (rad/s).
    pub kappa_2: f64,
    /// Internal loss rate (rad/s).
    pub kappa_int: f64,
}

impl Default for ResonatorParams {
    /// The TiN nanowire device: 85 nH / 5.8 fF halves, κ/2π = 23 MHz split
    /// evenly between the two ports.
    fn default() -> Self {
        let kappa = Frequency::from_mhz(23.0).value();
        ResonatorParams {
            l_r: 85e-9,
            c_r: 5.8e-15,
            l_tail: 109e-9,
            c_dot: 0.028e-15,
            kappa_1: kappa / 2.0,
            kappa_2: kappa / 2.0,
            kappa_int: 0.0,
        }
    }
}

/// Quantities derived from the lumped elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedResonator {
    pub omega_r: Frequency,
    /// Characteristic impedance √(L/C) (Ω).
    pub impedance: f64,
    /// Zero-point voltage √(2ħω_r/C_r) (V).
    pub v_zpf: f64,
}

impl ResonatorParams {
    /// Builds a resonator from its frequency and impedance, keeping the
    /// remaining fields at their defaults.
    pub fn from_frequency_impedance(omega_r: Frequency, impedance: f64) -> Result<Self> {
        if !(omega_r.value() > 0.0 && impedance > 0.0) {
            return Err(Error::domain("ω_r and Z must be positive"));
        }
        Ok(ResonatorParams {
            l_r: impedance / omega_r.value(),
            c_r: 1.0 / (impedance * omega_r.value()),
            ..Default::default()
        })
    }

    /// Same element values with symmetric port coupling: κ₁ = κ₂ = κ/2, no
    /// internal loss.
    pub fn with_symmetric_kappa(mut self, kappa_tot: f64) -> Self {
        self.kappa_1 = kappa_tot / 2.0;
        self.kappa_2 = kappa_tot / 2.0;
        self.kappa_int = 0.0;
        self
    }

    pub fn kappa_tot(&self) -> f64 {
        self.kappa_1 + self.kappa_2 + self.kappa_int
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_r > 0.0 && self.c_r > 0.0) || !self.l_r.is_finite() || !self.c_r.is_finite() {
            return Err(Error::domain(format!(
                "resonator L_r and C_r must be positive (L_r={}, C_r={})",
                self.l_r, self.c_r
            )));
        }
        for (name, k) in [
            ("kappa_1", self.kappa_1),
            ("kappa_2", self.kappa_2),
            ("kappa_int", self.kappa_int),
        ] {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::domain(format!("{name} must be non-negative, got {k}")));
            }
        }
        Ok(())
    }

    /// ω_r = 1/√(L_r C_r).
    pub fn omega_r(&self) -> Frequency {
        Frequency(1.0 / (self.l_r * self.c_r).sqrt())
    }

    pub fn derived(&self, c: &PhysicalConstants) -> Result<DerivedResonator> {
        self.validate()?;
        let omega_r = self.omega_r();
        Ok(DerivedResonator {
            omega_r,
            impedance: (self.l_r / self.c_r).sqrt(),
            v_zpf: (2.0 * c.hbar * omega_r.value() / self.c_r).sqrt(),
        })
    }
}

/// Free-function form of [`ResonatorParams::derived`].
pub fn derived_resonator_quantities(
    p: &ResonatorParams,
    c: &PhysicalConstants,
) -> Result<DerivedResonator> {
    p.derived(c)
}
