use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};

use super::*;
use crate::analytic::effective_frequency;
use crate::potential::{make_analytic, AnalyticCoefficients};
use crate::CODATA;

fn harmonic(fx: f64, fy: f64) -> PotentialField {
    make_analytic(
        AnalyticCoefficients::harmonic(TAU * fx, TAU * fy, CODATA.m_e),
        0.0,
        0.0,
        &CODATA,
    )
}

/// √(ħ/2m_eω)
fn l_zpf(w: f64) -> f64 {
    (CODATA.hbar / (2.0 * CODATA.m_e * w)).sqrt()
}

fn solve(field: &PotentialField, window: &Rect, n: usize, k: usize) -> EigenSolution {
    let h = build_hamiltonian(field, window, n, n).unwrap();
    eigenstates(&h, k, &KrylovOptions::default()).unwrap()
}

/// Dense finite-difference 1D oracle on `n` interior nodes.
fn dense_1d(u: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n + 1) as f64;
    let k = CODATA.hbar * CODATA.hbar / (2.0 * CODATA.m_e * h * h);
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * k + u(lo + (i + 1) as f64 * h)
        } else if i.abs_diff(j) == 1 {
            -k
        } else {
            0.0
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn particle_in_a_box() {
    let flat = make_analytic(AnalyticCoefficients::default(), 0.0, 0.0, &CODATA);
    let (a, b) = (200e-9, 300e-9);
    let window = Rect::centered(0.0, 0.0, a / 2.0, b / 2.0);
    let sol = solve(&flat, &window, 64, 3);
    let e11 = CODATA.hbar.powi(2) * PI * PI / (2.0 * CODATA.m_e) * (1.0 / (a * a) + 1.0 / (b * b));
    assert!((sol.energies[0] / e11 - 1.0).abs() < 2e-3, "{}", sol.energies[0] / e11);
    // discrete Dirichlet spectrum is known exactly
    let h = build_hamiltonian(&flat, &window, 64, 64).unwrap();
    let mode = |k: f64, n: usize| 2.0 * (1.0 - (k * PI / (n + 1) as f64).cos());
    let exact = h.kin_x * mode(1.0, 64) + h.kin_y * mode(1.0, 64);
    assert!((sol.energies[0] - exact).abs() < 1e-10 * exact);
}

#[test]
fn reflection_symmetry_of_operator() {
    let f = make_analytic(
        AnalyticCoefficients { a2x: 300.0, ..AnalyticCoefficients::harmonic(TAU * 9e9, TAU * 6e9, CODATA.m_e) },
        0.0,
        900.0,
        &CODATA,
    );
    let h = build_hamiltonian(&f, &Rect::centered(0.0, 0.0, 3e-7, 3e-7), 40, 36).unwrap();
    let (nx, ny) = (h.nx(), h.ny());
    let reflect = |v: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; v.len()];
        for j in 0..ny {
            for i in 0..nx {
                r[j * nx + (nx - 1 - i)] = v[j * nx + i];
            }
        }
        r
    };
    let v: Vec<f64> = (0..nx * ny).map(|k| ((k * 37 % 101) as f64).sin()).collect();
    let mut hv = vec![0.0; v.len()];
    let mut hrv = vec![0.0; v.len()];
    h.apply(&v, &mut hv);
    h.apply(&reflect(&v), &mut hrv);
    let scale = hv.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    for (a, b) in reflect(&hv).iter().zip(&hrv) {
        assert!((a - b).abs() < 1e-13 * scale);
    }
    let sol = eigenstates(&h, 3, &KrylovOptions::default()).unwrap();
    for psi in &sol.wavefunctions {
        let r = reflect(&psi.data);
        let peak = psi.data.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        for (a, b) in psi.data.iter().zip(&r) {
            assert!((a.abs() - b.abs()).abs() < 1e-6 * peak);
        }
    }
}

#[test]
fn ground_state_converges_quadratically() {
    let f = harmonic(6e9, 8e9);
    let w = Rect::centered(0.0, 0.0, 2.5e-7, 2.2e-7);
    let exact = 0.5 * CODATA.hbar * TAU * (6e9 + 8e9);
    let grids = [39usize, 79, 159];
    let e: Vec<f64> = grids.iter().map(|&n| solve(&f, &w, n, 1).energies[0]).collect();
    let ratio = (e[0] - e[1]) / (e[1] - e[2]);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    // |ΔE₀| ≤ C h² with C stable across grids
    let c: Vec<f64> = grids
        .iter()
        .zip(&e)
        .map(|(&n, &v)| {
            let h = 5e-7 / (n + 1) as f64;
            (v - exact).abs() / (h * h)
        })
        .collect();
    assert!((c[0] / c[2] - 1.0).abs() < 0.05 && (c[1] / c[2] - 1.0).abs() < 0.05, "{c:?}");
}

#[test]
fn isotropic_oscillator_degeneracies() {
    let w = TAU * 6e9;
    let f = harmonic(6e9, 6e9);
    let half = 6.0 * l_zpf(w);
    let sol = solve(&f, &Rect::centered(0.0, 0.0, half, half), DEFAULT_POINTS, 6);
    let hw = CODATA.hbar * w;
    let expect = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0];
    for (k, &m) in expect.iter().enumerate() {
        let got = (sol.energies[k] - sol.energies[0]) / hw;
        assert!(k == 0 || (got / (m - 1.0) - 1.0).abs() < 1e-3, "level {k}: {got}");
    }
    assert!(((sol.energies[0] / hw) - 1.0).abs() < 1e-3);
    for a in 0..6 {
        for b in 0..6 {
            let o = sol.overlap(a, b);
            assert!((o - if a == b { 1.0 } else { 0.0 }).abs() < 1e-8);
        }
        assert!(sol.residual_norms[a] < 1e-6);
    }
}

#[test]
fn harmonic_trap_has_no_anharmonicity() {
    let f = harmonic(40e9, 6e9);
    let sol = solve(&f, &auto_window(&f).unwrap(), DEFAULT_POINTS, 3);
    let t = transitions(&sol, &CODATA).unwrap();
    assert!(t.alpha_e.abs() < 1e-3 * 6e9, "{}", t.alpha_e);
}

#[test]
fn anisotropic_gap_is_softer_axis() {
    let f = harmonic(5e9, 9e9);
    let window = auto_window(&f).unwrap();
    let sol = solve(&f, &window, DEFAULT_POINTS, 3);
    let gap = (sol.energies[1] - sol.energies[0]) / CODATA.hbar;
    assert!((gap / (TAU * 5e9) - 1.0).abs() < 1e-3);
}

#[test]
fn quartic_well_matches_dense_1d() {
    let a2 = 395.0;
    let c = AnalyticCoefficients { a2y: a2, ..AnalyticCoefficients::harmonic(TAU * 80e9, 0.0, CODATA.m_e) };
    let f = make_analytic(c, 0.0, 0.0, &CODATA);
    let w = auto_window(&f).unwrap();
    let sol = solve(&f, &w, DEFAULT_POINTS, 3);
    let gap = sol.energies[1] - sol.energies[0];
    let ev = dense_1d(|y| a2 * y.powi(4), w.y_min, w.y_max, 600);
    let oracle = ev[1] - ev[0];
    assert!((gap / oracle - 1.0).abs() < 0.01, "{} vs {}", gap, oracle);
    assert!(transitions(&sol, &CODATA).unwrap().alpha_e > 0.0);
}

#[test]
fn quartic_admixture_raises_upper_spacing() {
    let base = AnalyticCoefficients::harmonic(TAU * 40e9, TAU * 6e9, CODATA.m_e);
    for a2 in [395.0, 4000.0] {
        let f = make_analytic(AnalyticCoefficients { a2y: a2, ..base }, 0.0, 0.0, &CODATA);
        let w = auto_window(&f).unwrap();
        let sol = solve(&f, &w, DEFAULT_POINTS, 3);
        let t = transitions(&sol, &CODATA).unwrap();
        // same nodes in y, so the comparison isolates the 2D solver
        let ev = dense_1d(|y| base.a1y * y * y + a2 * y.powi(4), w.y_min, w.y_max, DEFAULT_POINTS);
        let oracle = (ev[2] - 2.0 * ev[1] + ev[0]) / CODATA.h;
        assert!(t.alpha_e > 0.0);
        assert!((t.alpha_e / oracle - 1.0).abs() < 1e-4, "{} vs {}", t.alpha_e, oracle);
        // the fine-grid continuum value has the same sign
        let fine = dense_1d(|y| base.a1y * y * y + a2 * y.powi(4), w.y_min, w.y_max, 600);
        assert!(fine[2] - 2.0 * fine[1] + fine[0] > 0.0);
    }
}

#[test]
fn harmonic_limit_matches_classical_frequency() {
    let c = AnalyticCoefficients::harmonic(TAU * 30e9, TAU * 6.5e9, CODATA.m_e);
    let f = make_analytic(c, 0.0, 1240.0, &CODATA);
    let w = auto_window(&f).unwrap();
    assert!(w.y_min < 0.0 && w.y_max > 2.0 * CODATA.e * 1240.0 / (2.0 * c.a1y));
    let sol = solve(&f, &w, DEFAULT_POINTS, 3);
    let t = transitions(&sol, &CODATA).unwrap();
    let classical = effective_frequency(&CubicTrap1D { a1: c.a1y, a2: 0.0, e_y: 1240.0 }, &CODATA).unwrap();
    assert!((t.omega_01.value() / classical.value() - 1.0).abs() < 2e-3);
}

#[test]
fn k_and_grid_preconditions() {
    let f = harmonic(6e9, 6e9);
    let w = Rect::centered(0.0, 0.0, 2e-7, 2e-7);
    assert_eq!(build_hamiltonian(&f, &w, 16, 64).unwrap_err().kind(), "usage");
    let h = build_hamiltonian(&f, &w, 40, 40).unwrap();
    assert_eq!(eigenstates(&h, 0, &KrylovOptions::default()).unwrap_err().kind(), "usage");
    assert_eq!(eigenstates(&h, 21, &KrylovOptions::default()).unwrap_err().kind(), "usage");
    let sol = eigenstates(&h, 2, &KrylovOptions::default()).unwrap();
    assert_eq!(transitions(&sol, &CODATA).unwrap_err().kind(), "usage");
    let off = build_hamiltonian(&f, &Rect::centered(5e-7, 0.0, 2e-7, 2e-7), 40, 40).unwrap();
    assert!(off.has_flag("window-misses-minimum"));
    assert!(!h.has_flag("window-misses-minimum"));
}

#[test]
fn eigenstates_are_deterministic() {
    let f = harmonic(6e9, 7e9);
    let h = build_hamiltonian(&f, &auto_window(&f).unwrap(), 48, 48).unwrap();
    let a = eigenstates(&h, 4, &KrylovOptions::default()).unwrap();
    let b = eigenstates(&h, 4, &KrylovOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sqrt_voltage_law() {
    let unit = AnalyticCoefficients::harmonic(TAU * 6e9, TAU * 6e9, CODATA.m_e);
    let src = SweepSource::Analytic {
        base: AnalyticCoefficients { a1x: 9.0 * unit.a1x, ..Default::default() },
        per_volt: AnalyticCoefficients { a1y: unit.a1y, ..Default::default() },
        label: "u".into(),
    };
    let volts = [0.5, 1.0, 2.0, 4.0];
    let rows = frequency_vs_voltage(&src, &volts, &QSweepOptions { jobs: 2, ..Default::default() }, &CODATA);
    for r in &rows {
        let expect = 6e9 * r.voltage.sqrt();
        assert!((r.f01 / expect - 1.0).abs() < 2e-3, "{r:?}");
    }
    assert!(frequency_rows_to_csv(&rows).starts_with("voltage_V,f01_GHz,f12_GHz,alpha_e_MHz,residual,flags\n"));
}

/// Surrogate of a compensated trap: a1y swept through zero with a quartic
/// term and a moderate vertical field.
fn surrogate(e_y: f64) -> (SweepSource, QSweepOptions) {
    let stiff = AnalyticCoefficients::harmonic(TAU * 30e9, 0.0, CODATA.m_e);
    let per_volt = AnalyticCoefficients { a1y: 2e-10, ..Default::default() };
    let src = SweepSource::Analytic {
        base: AnalyticCoefficients { a2y: 395.0, a1x: stiff.a1x, ..Default::default() },
        per_volt,
        label: "u".into(),
    };
    (src, QSweepOptions { e_y, nx: 101, ny: 101, jobs: 4, ..Default::default() })
}

#[test]
fn compensated_surrogate_crosses_resonator_twice() {
    let (src, opts) = surrogate(1240.0);
    let volts: Vec<f64> = (-6..=12).map(|k| k as f64 * 0.5).collect();
    let rows = frequency_vs_voltage(&src, &volts, &opts, &CODATA);
    let f: Vec<f64> = rows.iter().map(|r| r.f01).collect();
    assert!(f.iter().all(|v| v.is_finite()), "{rows:?}");
    let imin = (0..f.len()).min_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
    assert!(imin > 0 && imin < f.len() - 1);
    assert!(f[imin] > 4e9 && f[imin] < 7.162e9, "{}", f[imin]);
    let crossings = f.windows(2).filter(|w| (w[0] - 7.162e9) * (w[1] - 7.162e9) < 0.0).count();
    assert_eq!(crossings, 2, "{f:?}");
}

#[test]
fn vertical_field_lifts_the_minimum() {
    let volts: Vec<f64> = (-4..=4).map(|k| k as f64 * 0.5).collect();
    let min_f01 = |e_y| {
        let (src, opts) = surrogate(e_y);
        frequency_vs_voltage(&src, &volts, &opts, &CODATA)
            .iter()
            .map(|r| r.f01)
            .fold(f64::INFINITY, f64::min)
    };
    let without = min_f01(0.0);
    let with = min_f01(1240.0);
    assert!(with > 2.0 * without, "{without} {with}");
}

