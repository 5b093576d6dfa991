//! Closed-form calculators: coupling strength, the 1D quartic trap minimum,
//! Purcell rates, bias-electrode capacitance, spin couplings, helium
//! surface depression and cooperativity.
//!
//! Rates and frequencies are angular (rad/s); energies are joules.

use serde::{Deserialize, Serialize};
use std::f64::consts::{SQRT_2, TAU};

use crate::constants::PhysicalConstants;
use crate::resonator::ResonatorParams;
use crate::units::Frequency;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingChain {
    /// Zero-point motion √(ħ/2m_eω_e) (m).
    pub l_y: f64,
    /// Resonator zero-point voltage (V).
    pub v_zpf: f64,
    /// Coupling length (m).
    pub ell: f64,
    /// g = e l_y V_zpf / (ħ ℓ) (rad/s).
    pub g: f64,
}

/// Zero-point motion length √(ħ/2m_eω).
pub fn zero_point_length(omega: f64, c: &PhysicalConstants) -> f64 {
    (c.hbar / (2.0 * c.m_e * omega)).sqrt()
}

/// g = e·l_y·V_zpf/(ħℓ) from explicit intermediates.
pub fn coupling_from_parts(l_y: f64, v_zpf: f64, ell: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(ell > 0.0) {
        return Err(Error::domain("coupling length must be positive"));
    }
    Ok(c.e * l_y * v_zpf / (c.hbar * ell))
}

pub fn coupling_g(
    res: &ResonatorParams,
    ell: f64,
    omega_e: Frequency,
    c: &PhysicalConstants,
) -> Result<CouplingChain> {
    if !(omega_e.value() > 0.0) {
        return Err(Error::domain("ω_e must be positive"));
    }
    let v_zpf = res.derived(c)?.v_zpf;
    let l_y = zero_point_length(omega_e.value(), c);
    Ok(CouplingChain {
        l_y,
        v_zpf,
        ell,
        g: coupling_from_parts(l_y, v_zpf, ell, c)?,
    })
}

/// U(y) = a1 y² + a2 y⁴ − e E_y y.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CubicTrap1D {
    /// J/m²
    pub a1: f64,
    /// J/m⁴
    pub a2: f64,
    /// V/m
    pub e_y: f64,
}

impl CubicTrap1D {
    pub fn energy(&self, y: f64, c: &PhysicalConstants) -> f64 {
        self.a1 * y * y + self.a2 * y.powi(4) - c.e * self.e_y * y
    }

    pub fn curvature(&self, y: f64) -> f64 {
        2.0 * self.a1 + 12.0 * self.a2 * y * y
    }

    /// Depressed-cubic coefficients (p, q) of y³ + p y + q = 0.
    pub fn pq(&self, c: &PhysicalConstants) -> (f64, f64) {
        (self.a1 / (2.0 * self.a2), -c.e * self.e_y / (4.0 * self.a2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootRegime {
    /// D < 0: one real root.
    SingleReal,
    /// D ≥ 0: three real roots (double well or degenerate).
    ThreeReal,
    /// a2 = 0: harmonic trap shifted by the field.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CardanoSolution {
    /// Location of the minimum (m).
    pub y0: f64,
    /// D = −(4p³ + 27q²); NaN in the linear case.
    pub discriminant: f64,
    pub regime: RootRegime,
    /// All real stationary points, ascending.
    pub roots: Vec<f64>,
}

fn newton_cubic(p: f64, q: f64, mut y: f64) -> f64 {
    for _ in 0..4 {
        let f = y * y * y + p * y + q;
        let df = 3.0 * y * y + p;
        if df == 0.0 {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        y -= step;
    }
    y
}

pub fn cardano_minimum(trap: &CubicTrap1D, c: &PhysicalConstants) -> Result<CardanoSolution> {
    let e_f = c.e * trap.e_y;
    if trap.a2 == 0.0 {
        if trap.a1 == 0.0 {
            if trap.e_y != 0.0 {
                return Err(Error::domain("a1 = a2 = 0 with E_y ≠ 0: no minimum"));
            }
            return Ok(CardanoSolution {
                y0: 0.0,
                discriminant: f64::NAN,
                regime: RootRegime::Linear,
                roots: vec![0.0],
            });
        }
        let y0 = e_f / (2.0 * trap.a1);
        return Ok(CardanoSolution {
            y0,
            discriminant: f64::NAN,
            regime: RootRegime::Linear,
            roots: vec![y0],
        });
    }
    let (p, q) = trap.pq(c);
    let d = -(4.0 * p * p * p + 27.0 * q * q);
    if d < 0.0 {
        // Cardano with the cube-root branch chosen to avoid cancellation;
        // the second term follows from u·v = −p/3.
        let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let a = if q > 0.0 { -q / 2.0 - s } else { -q / 2.0 + s };
        let u = a.cbrt();
        let y = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        let y0 = newton_cubic(p, q, y);
        return Ok(CardanoSolution {
            y0,
            discriminant: d,
            regime: RootRegime::SingleReal,
            roots: vec![y0],
        });
    }
    // three real roots (trigonometric form); p ≤ 0 here
    let r = 2.0 * (-p / 3.0).sqrt();
    let mut roots: Vec<f64> = if r == 0.0 {
        vec![0.0; 3]
    } else {
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| newton_cubic(p, q, r * (phi - TAU * k as f64 / 3.0).cos()))
            .collect()
    };
    roots.sort_by(f64::total_cmp);
    let y0 = roots
        .iter()
        .copied()
        .filter(|&y| trap.curvature(y) >= 0.0)
        .min_by(|a, b| trap.energy(*a, c).total_cmp(&trap.energy(*b, c)))
        .unwrap_or(roots[0]);
    Ok(CardanoSolution {
        y0,
        discriminant: d,
        regime: RootRegime::ThreeReal,
        roots,
    })
}

/// First-order expansion of the single real root in small p:
/// y0 ≈ −q^{1/3} + (q^{2/3}/3)(p/q) − (p/3)(q^{1/3}/27)(p/q)², real cube roots.
pub fn y0_first_order(trap: &CubicTrap1D, c: &PhysicalConstants) -> Result<f64> {
    if trap.a2 == 0.0 || trap.e_y == 0.0 {
        return Err(Error::domain("expansion needs a2 ≠ 0 and E_y ≠ 0"));
    }
    let (p, q) = trap.pq(c);
    let q13 = q.cbrt();
    let r = p / q;
    Ok(-q13 + q13 * q13 / 3.0 * r - p / 3.0 * q13 / 27.0 * r * r)
}

/// ω̃ = √(U''(y0)/m_e) at the Cardano minimum.
pub fn effective_frequency(trap: &CubicTrap1D, c: &PhysicalConstants) -> Result<Frequency> {
    let sol = cardano_minimum(trap, c)?;
    let k = trap.curvature(sol.y0);
    if !(k > 0.0) {
        return Err(Error::domain(format!(
            "saddle: non-positive curvature {k:.3e} J/m² at y0 = {:.3e} m",
            sol.y0
        )));
    }
    Ok(Frequency((k / c.m_e).sqrt()))
}

/// ω_min² ≈ (12 a2^{1/3}/m_e)(e E_y/4)^{2/3}; zero if E_y = 0 or a2 = 0.
pub fn omega_min(a2: f64, e_y: f64, c: &PhysicalConstants) -> Frequency {
    if a2 <= 0.0 || e_y == 0.0 {
        return Frequency(0.0);
    }
    let w2 = 12.0 * a2.cbrt() / c.m_e * (c.e * e_y.abs() / 4.0).powf(2.0 / 3.0);
    Frequency(w2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRate {
    /// γ₁ (1/s).
    pub gamma_1: f64,
    /// T1 = 1/γ₁ (s).
    pub t1: f64,
}

impl DecayRate {
    fn new(gamma_1: f64) -> Self {
        DecayRate {
            gamma_1,
            t1: 1.0 / gamma_1,
        }
    }
}

/// Purcell decay through the resonator: γ₁ = g²κ/(Δ² + (κ/2)²).
pub fn purcell_resonator(g: f64, kappa: f64, delta_er: f64) -> Result<DecayRate> {
    if !(kappa > 0.0) {
        return Err(Error::domain("κ must be positive"));
    }
    Ok(DecayRate::new(
        g * g * kappa / (delta_er * delta_er + kappa * kappa / 4.0),
    ))
}

/// Electron-to-electrode capacitance C_c = (e²/m_eω_e²)(∂α/∂y)².
pub fn bias_capacitance(dalpha_dy: f64, omega_e: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(omega_e > 0.0) {
        return Err(Error::domain("ω_e must be positive"));
    }
    Ok(c.e * c.e / (c.m_e * omega_e * omega_e) * dalpha_dy * dalpha_dy)
}

/// Bias electrode with an on-chip LC filter into a load Z0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasFilterCircuit {
    /// H
    pub l_f: f64,
    /// F
    pub c_f: f64,
    /// Ω
    pub z0: f64,
    /// F
    pub c_c: f64,
    /// F
    pub c_other: f64,
}

impl BiasFilterCircuit {
    /// Guard-electrode filter (12 nH, 0.8 pF, 50 Ω) with C_c from the given
    /// gradient and frequency, and C_other = C_c / `cc_over_cother`.
    pub fn guard(
        dalpha_dy: f64,
        omega_e: f64,
        cc_over_cother: f64,
        c: &PhysicalConstants,
    ) -> Result<Self> {
        if !(cc_over_cother > 0.0 && cc_over_cother <= 1.0) {
            return Err(Error::domain("C_c/C_other must lie in (0, 1]"));
        }
        let c_c = bias_capacitance(dalpha_dy, omega_e, c)?;
        Ok(BiasFilterCircuit {
            l_f: 12e-9,
            c_f: 0.8e-12,
            z0: 50.0,
            c_c,
            c_other: c_c / cc_over_cother,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_f > 0.0 && self.c_f > 0.0 && self.z0 > 0.0 && self.c_c >= 0.0 && self.c_other > 0.0)
        {
            return Err(Error::domain("bias circuit elements must be positive"));
        }
        if self.c_c > self.c_other {
            return Err(Error::domain("C_c must not exceed C_other"));
        }
        Ok(())
    }

    /// 1/√(L_f C_f) (rad/s).
    pub fn filter_resonance(&self) -> Frequency {
        Frequency(1.0 / (self.l_f * self.c_f).sqrt())
    }
}

/// Decay through a bias electrode:
/// γ₁ = ω (C_c/C_o) ω Z0 C_c / [(1 − ω² L_f (C_f+C_c))² + (ω Z0 (C_f+C_c))²].
pub fn purcell_bias(circuit: &BiasFilterCircuit, omega_e: f64) -> Result<DecayRate> {
    circuit.validate()?;
    let w = omega_e;
    let ct = circuit.c_f + circuit.c_c;
    let re = 1.0 - w * w * circuit.l_f * ct;
    let im = w * circuit.z0 * ct;
    let gamma = w * (circuit.c_c / circuit.c_other) * w * circuit.z0 * circuit.c_c / (re * re + im * im);
    Ok(DecayRate::new(gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinCouplings {
    /// Spin-charge coupling (rad/s).
    pub g_cs: f64,
    /// Spin-photon coupling (rad/s).
    pub g_s: f64,
}

/// g_cs = μ_B a_x ∂B_z/∂x / (√2 ħ); g_s = g_c g_cs / Δ_cs.
pub fn spin_couplings(
    g_c: f64,
    dbz_dx: f64,
    a_x: f64,
    delta_cs: f64,
    c: &PhysicalConstants,
) -> Result<SpinCouplings> {
    if delta_cs == 0.0 {
        return Err(Error::domain("Δ_cs must be non-zero"));
    }
    let g_cs = c.mu_b * a_x * dbz_dx / (SQRT_2 * c.hbar);
    Ok(SpinCouplings {
        g_cs,
        g_s: g_c * g_cs / delta_cs,
    })
}

/// Depression of the helium surface at the channel center:
/// ρ G H w² / (8σ).
pub fn helium_depression(height: f64, w_ch: f64, c: &PhysicalConstants) -> Result<f64> {
    if height < 0.0 || w_ch < 0.0 {
        return Err(Error::domain("helium height and channel width must be non-negative"));
    }
    Ok(c.rho_he * c.g_earth * height * w_ch * w_ch / (8.0 * c.sigma_he))
}

/// C = 4g²/(κΓ₂).
pub fn cooperativity(g: f64, kappa: f64, gamma_2: f64) -> Result<f64> {
    if !(kappa > 0.0 && gamma_2 > 0.0) {
        return Err(Error::domain("κ and Γ₂ must be positive"));
    }
    Ok(4.0 * g * g / (kappa * gamma_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CODATA;
    use proptest::prelude::*;

    fn mhz(f: f64) -> f64 {
        TAU * f * 1e6
    }

    fn grid_min(trap: &CubicTrap1D, lo: f64, hi: f64) -> f64 {
        // coarse scan then successively finer scans around the best node
        let (mut a, mut b) = (lo, hi);
        let mut best = 0.0;
        for _ in 0..6 {
            let n = 2000;
            let mut bu = f64::INFINITY;
            for k in 0..=n {
                let y = a + (b - a) * k as f64 / n as f64;
                let u = trap.energy(y, &CODATA);
                if u < bu {
                    bu = u;
                    best = y;
                }
            }
            let w = (b - a) / n as f64 * 2.0;
            a = best - w;
            b = best + w;
        }
        best
    }

    #[test]
    fn zero_point_length_and_coupling_chain() {
        let res = ResonatorParams::default();
        let chain = coupling_g(&res, 2.2e-6, Frequency::from_ghz(7.162), &CODATA).unwrap();
        assert!((chain.l_y - 36e-9).abs() / 36e-9 < 0.03, "{}", chain.l_y);
        assert!((chain.v_zpf - 40e-6).abs() / 40e-6 < 0.05);
        let double = coupling_g(&res, 4.4e-6, Frequency::from_ghz(7.162), &CODATA).unwrap();
        assert!((double.g * 2.0 - chain.g).abs() < 1e-9 * chain.g);
    }

    #[test]
    fn quoted_intermediates_give_about_158_mhz() {
        // independent scalar evaluation with rounded inputs
        let g = 1.602176634e-19 * 36e-9 * 40e-6 / (6.62607015e-34 / TAU * 2.2e-6) / TAU;
        let ours = coupling_from_parts(36e-9, 40e-6, 2.2e-6, &CODATA).unwrap() / TAU;
        assert!((ours - g).abs() < 1e-6 * g);
        assert!((ours / 1e6 - 158.2).abs() < 0.5, "{}", ours / 1e6);
    }

    #[test]
    fn symmetric_trap_minimum_at_origin() {
        let t = CubicTrap1D {
            a1: 1e-10,
            a2: 300.0,
            e_y: 0.0,
        };
        let s = cardano_minimum(&t, &CODATA).unwrap();
        assert_eq!(s.regime, RootRegime::SingleReal);
        assert!(s.y0.abs() < 1e-20);
    }

    #[test]
    fn linear_case_and_flat_case() {
        let t = CubicTrap1D {
            a1: 2e-10,
            a2: 0.0,
            e_y: 500.0,
        };
        let s = cardano_minimum(&t, &CODATA).unwrap();
        assert!((s.y0 - CODATA.e * 500.0 / 4e-10).abs() < 1e-20);
        let flat = CubicTrap1D {
            a1: 0.0,
            a2: 0.0,
            e_y: 1.0,
        };
        assert!(cardano_minimum(&flat, &CODATA).is_err());
    }

    #[test]
    fn double_well_picks_lowest_root() {
        let t = CubicTrap1D {
            a1: -2e-10,
            a2: 400.0,
            e_y: 5.0,
        };
        let s = cardano_minimum(&t, &CODATA).unwrap();
        assert_eq!(s.regime, RootRegime::ThreeReal);
        assert_eq!(s.roots.len(), 3);
        for &r in &s.roots {
            let f = r.powi(3) + t.pq(&CODATA).0 * r + t.pq(&CODATA).1;
            assert!(f.abs() < 1e-30, "{f}");
            assert!(t.energy(s.y0, &CODATA) <= t.energy(r, &CODATA));
        }
        assert!(s.y0 > 0.0);
        assert!((s.y0 - grid_min(&t, -2e-6, 2e-6)).abs() < 1e-11);
    }

    #[test]
    fn negative_quartic_large_field_single_root() {
        let t = CubicTrap1D {
            a1: 1e-10,
            a2: -50.0,
            e_y: 2e4,
        };
        let s = cardano_minimum(&t, &CODATA).unwrap();
        assert_eq!(s.regime, RootRegime::SingleReal);
        let (p, q) = t.pq(&CODATA);
        assert!((s.y0.powi(3) + p * s.y0 + q).abs() < 1e-12 * q.abs());
    }

    proptest! {
        #[test]
        fn cardano_matches_grid_scan(
            a1 in -3e-10f64..3e-10,
            a2 in 50.0f64..2000.0,
            e_y in 1.0f64..3e3,
        ) {
            let t = CubicTrap1D { a1, a2, e_y };
            let s = cardano_minimum(&t, &CODATA).unwrap();
            prop_assume!(s.regime == RootRegime::SingleReal);
            let y_grid = grid_min(&t, -3e-6, 3e-6);
            prop_assert!((s.y0 - y_grid).abs() < 1e-11, "{} vs {}", s.y0, y_grid);
        }
    }

    #[test]
    fn first_order_expansion_close_for_small_p() {
        let t0 = CubicTrap1D {
            a1: 0.0,
            a2: 400.0,
            e_y: 1240.0,
        };
        let (_, q) = t0.pq(&CODATA);
        for &ratio in &[-0.05, -0.02, 0.0, 0.02, 0.05] {
            // |p|/|q|^{2/3} = |ratio|
            let p = ratio * q.abs().powf(2.0 / 3.0);
            let t = CubicTrap1D {
                a1: 2.0 * t0.a2 * p,
                ..t0
            };
            let exact = cardano_minimum(&t, &CODATA).unwrap().y0;
            let approx = y0_first_order(&t, &CODATA).unwrap();
            assert!((approx - exact).abs() / exact < 0.01, "{ratio}: {approx} {exact}");
        }
    }

    #[test]
    fn effective_frequency_harmonic_limit() {
        let w = TAU * 6e9;
        let t = CubicTrap1D {
            a1: 0.5 * CODATA.m_e * w * w,
            a2: 0.0,
            e_y: 0.0,
        };
        let got = effective_frequency(&t, &CODATA).unwrap().value();
        assert!((got - w).abs() < 1e-12 * w);
        let inverted = CubicTrap1D { a1: -1e-10, ..t };
        assert!(effective_frequency(&inverted, &CODATA).is_err());
    }

    #[test]
    fn omega_min_lifts_minimum_and_vanishes_without_field() {
        let (a2, e_y) = (395.0, 1240.0);
        assert_eq!(omega_min(a2, 0.0, &CODATA).value(), 0.0);
        assert_eq!(omega_min(0.0, e_y, &CODATA).value(), 0.0);
        // ω at a1 = 0 is exactly the estimate
        let t = CubicTrap1D { a1: 0.0, a2, e_y };
        let w0 = effective_frequency(&t, &CODATA).unwrap().value();
        assert!((w0 - omega_min(a2, e_y, &CODATA).value()).abs() < 1e-9 * w0);
        // non-monotone over a1 with a nonzero floor
        let ws: Vec<f64> = (-40..=40)
            .map(|k| {
                let t = CubicTrap1D {
                    a1: k as f64 * 2e-11,
                    a2,
                    e_y,
                };
                effective_frequency(&t, &CODATA).unwrap().value()
            })
            .collect();
        let (imin, wmin) = ws
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(imin > 0 && imin < ws.len() - 1);
        assert!(wmin > 0.5 * w0);
    }

    #[test]
    fn purcell_resonator_values() {
        let (g, k) = (mhz(110.0), mhz(23.0));
        let on = purcell_resonator(g, k, 0.0).unwrap();
        assert!((on.gamma_1 - 4.0 * g * g / k).abs() < 1e-9 * on.gamma_1);
        assert!((on.t1 - 7.6e-11).abs() / 7.6e-11 < 0.01, "{}", on.t1);
        let t1 = purcell_resonator(g, k, mhz(1100.0)).unwrap().t1;
        assert!(t1 > 0.6e-6 && t1 < 0.8e-6 && t1 < 1e-6, "{t1}");
        let far = purcell_resonator(g, k, 100.0 * k).unwrap().gamma_1;
        let lim = (g / (100.0 * k)).powi(2) * k;
        assert!((far - lim).abs() / lim < 0.01);
        let d = mhz(300.0);
        assert_eq!(
            purcell_resonator(g, k, d).unwrap().gamma_1,
            purcell_resonator(g, k, -d).unwrap().gamma_1
        );
    }

    #[test]
    fn bias_capacitance_scaling() {
        assert_eq!(bias_capacitance(0.0, 1e10, &CODATA).unwrap(), 0.0);
        let c1 = bias_capacitance(0.03e6, TAU * 5e9, &CODATA).unwrap();
        let c2 = bias_capacitance(0.03e6, TAU * 10e9, &CODATA).unwrap();
        assert!((c1 / c2 - 4.0).abs() < 1e-12);
        let direct = 1.602176634e-19f64.powi(2) / (9.1093837015e-31 * (TAU * 5e9f64).powi(2)) * 0.03e6f64.powi(2);
        assert!((c1 - direct).abs() < 1e-12 * direct);
        assert!((c1 - 2.57e-20).abs() / 2.57e-20 < 0.01, "{c1}");
    }

    #[test]
    fn guard_t1_exceeds_one_ms_above_3ghz() {
        for k in 0..=70 {
            let w = TAU * (3.0 + 0.1 * k as f64) * 1e9;
            let c = BiasFilterCircuit::guard(0.03e6, w, 1.0, &CODATA).unwrap();
            let t1 = purcell_bias(&c, w).unwrap().t1;
            assert!(t1 > 1e-3, "{} GHz: {t1}", w / TAU / 1e9);
        }
        let c = BiasFilterCircuit::guard(0.03e6, TAU * 5e9, 1.0, &CODATA).unwrap();
        assert!((c.filter_resonance().ghz() - 1.62).abs() < 0.01);
    }

    #[test]
    fn bias_decay_vanishes_with_coupling() {
        let c = BiasFilterCircuit {
            l_f: 12e-9,
            c_f: 0.8e-12,
            z0: 50.0,
            c_c: 0.0,
            c_other: 1e-18,
        };
        assert_eq!(purcell_bias(&c, 3e10).unwrap().gamma_1, 0.0);
    }

    #[test]
    fn spin_values() {
        let s = spin_couplings(mhz(120.0), 0.1e-3 / 1e-9, 50e-9, mhz(2000.0), &CODATA).unwrap();
        assert!((s.g_cs / TAU / 1e6 - 50.0).abs() / 50.0 < 0.02);
        assert!((s.g_s / TAU / 1e6 - 3.0).abs() / 3.0 < 0.05);
        let z = spin_couplings(mhz(120.0), 0.0, 50e-9, mhz(2000.0), &CODATA).unwrap();
        assert_eq!((z.g_cs, z.g_s), (0.0, 0.0));
    }

    #[test]
    fn depression_values() {
        let d = helium_depression(3e-3, 1.4e-6, &CODATA).unwrap();
        assert!(d > 2e-9 && d < 3e-9, "{d}");
        assert_eq!(helium_depression(3e-3, 0.0, &CODATA).unwrap(), 0.0);
        let d2 = helium_depression(6e-3, 1.4e-6, &CODATA).unwrap();
        assert!((d2 / d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cooperativity_values() {
        let c = cooperativity(mhz(118.0), mhz(23.0), mhz(75.0)).unwrap();
        assert!((31.0..=34.0).contains(&c), "{c}");
        assert_eq!(cooperativity(0.0, 1.0, 1.0).unwrap(), 0.0);
        let s = cooperativity(3.0 * mhz(118.0), 3.0 * mhz(23.0), 3.0 * mhz(75.0)).unwrap();
        assert!((s - c).abs() < 1e-12 * c);
        // strong coupling bookkeeping
        assert!(mhz(118.0) > mhz(23.0) && mhz(118.0) > mhz(75.0));
    }
}
