//! Steady-state input-output model of the resonator coupled to a two-level
//! electron, with direct port-to-port crosstalk.
//!
//! Sign convention: the resonator denominator is κ/2 + i(ω_r − ω_p) + iχ⟨σ_z⟩
//! with χ = g²/((ω_e − ω_p) − iΓ₂). For a ground-state electron (⟨σ_z⟩ = −1)
//! above the resonator (ω_e > ω_r) the transmission peak moves down, i.e. the
//! dispersive shift Δω_r = −g²Δ_er/(Δ_er² + Γ₂²) is negative.

mod compensate;
mod trace;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::resonator::ResonatorParams;
use crate::units::Frequency;
use crate::{Error, Result};

pub use compensate::{compensate_background, Compensation, CompensationOptions};
pub use trace::SpectrumTrace;

/// Effective two-level electron. Rates are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelElectron {
    pub omega_e: f64,
    pub gamma_2: f64,
    pub gamma_1: f64,
    pub sigma_z: f64,
}

impl TwoLevelElectron {
    /// Ground-state electron with pure dephasing only (γ₁ = 0).
    pub fn new(omega_e: f64, gamma_2: f64) -> Self {
        TwoLevelElectron {
            omega_e,
            gamma_2,
            gamma_1: 0.0,
            sigma_z: -1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_2 > 0.0) {
            return Err(Error::domain("Γ₂ must be positive"));
        }
        if !(self.gamma_1 >= 0.0 && self.gamma_2 >= self.gamma_1 / 2.0) {
            return Err(Error::domain("need γ₁ ≥ 0 and Γ₂ ≥ γ₁/2"));
        }
        if !(-1.0..=0.0).contains(&self.sigma_z) {
            return Err(Error::domain("⟨σ_z⟩ must lie in [−1, 0]"));
        }
        Ok(())
    }
}

/// Direct background scattering between the two ports.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CrosstalkParams {
    /// Transmitted power fraction.
    pub t: f64,
    /// Global phase of the transmitted part (rad).
    pub zeta: f64,
    /// Reflection phase (rad); not used by the S21 paths.
    pub theta: f64,
}

impl CrosstalkParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::domain("crosstalk T must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Transmission term −i√T e^{iζ}.
    pub fn s21(&self) -> C64 {
        -C64::i() * self.t.sqrt() * C64::from_polar(1.0, self.zeta)
    }

    /// The unitary 2×2 background scattering matrix, rows = output port.
    pub fn scattering_matrix(&self) -> [[C64; 2]; 2] {
        let r = C64::from_polar((1.0 - self.t).sqrt(), self.theta);
        let tr = self.s21();
        // second reflection fixed by orthogonality of the columns
        let r2 = if tr.norm() > 0.0 {
            -tr * r.conj() / tr.conj()
        } else {
            r
        };
        [[r, tr], [tr, r2]]
    }
}

/// χ = g²/((ω_e − ω_p) − iΓ₂).
pub fn susceptibility(el: &TwoLevelElectron, g: f64, omega_p: f64) -> Result<C64> {
    if !(el.gamma_2 > 0.0) {
        return Err(Error::domain("Γ₂ must be positive"));
    }
    Ok(g * g / C64::new(el.omega_e - omega_p, -el.gamma_2))
}

fn denominator(res: &ResonatorParams, el: &TwoLevelElectron, g: f64, omega_p: f64) -> Result<C64> {
    let kappa = res.kappa_tot();
    if !(kappa > 0.0) {
        return Err(Error::domain("κ_tot must be positive"));
    }
    let chi = susceptibility(el, g, omega_p)?;
    Ok(C64::new(kappa / 2.0, res.omega_r().value() - omega_p) + C64::i() * chi * el.sigma_z)
}

/// S21 = √(κ₁κ₂)/(κ/2 + iΔ_rp + iχ⟨σ_z⟩).
pub fn s21_resonant(res: &ResonatorParams, el: &TwoLevelElectron, g: f64, omega_p: f64) -> Result<C64> {
    Ok((res.kappa_1 * res.kappa_2).sqrt() / denominator(res, el, g, omega_p)?)
}

/// S11 = −1 + κ₁/(κ/2 + iΔ_rp + iχ⟨σ_z⟩).
pub fn s11_resonant(res: &ResonatorParams, el: &TwoLevelElectron, g: f64, omega_p: f64) -> Result<C64> {
    Ok(-1.0 + res.kappa_1 / denominator(res, el, g, omega_p)?)
}

/// Resonant transmission plus the direct crosstalk path.
pub fn s21_with_crosstalk(
    res: &ResonatorParams,
    el: &TwoLevelElectron,
    g: f64,
    ct: &CrosstalkParams,
    omega_p: f64,
) -> Result<C64> {
    Ok(ct.s21() + s21_resonant(res, el, g, omega_p)?)
}

/// Bare-resonator S21 with parasitic transmission, parameterized directly
/// by (ω_r, κ_tot, √(κ₁κ₂)).
pub fn s21_bare(omega_r: f64, kappa_tot: f64, sqrt_k1k2: f64, ct: &CrosstalkParams, omega_p: f64) -> C64 {
    ct.s21() + sqrt_k1k2 / C64::new(kappa_tot / 2.0, omega_r - omega_p)
}

/// Weak-probe dispersive shift Re(χ)⟨σ_z⟩ evaluated at ω_p = ω_r.
pub fn dispersive_shift(el: &TwoLevelElectron, g: f64, omega_r: f64) -> Result<f64> {
    Ok(susceptibility(el, g, omega_r)?.re * el.sigma_z)
}

/// Electron frequency inferred from a measured resonator shift,
/// ω_e = ω_r − g²/Δω_r (a negative shift places the electron above ω_r).
pub fn dispersive_electron_freq(delta_omega_r: f64, g: f64, omega_r: f64) -> Result<Frequency> {
    if delta_omega_r == 0.0 || !delta_omega_r.is_finite() {
        return Err(Error::domain("resonator shift must be finite and non-zero"));
    }
    Ok(Frequency(omega_r - g * g / delta_omega_r))
}

/// Two-tone readout dip: offset − depth·γ²/((ω_d − ω_e)² + γ²).
pub fn two_tone_dip(omega_e: f64, gamma: f64, depth: f64, offset: f64, omega_d: f64) -> f64 {
    let d = omega_d - omega_e;
    offset - depth * gamma * gamma / (d * d + gamma * gamma)
}
