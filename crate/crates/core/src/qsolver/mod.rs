//! Single-electron 2D Schrödinger eigensolver on a finite-difference grid.

mod eigen;

use serde::{Deserialize, Serialize};

use crate::analytic::{cardano_minimum, CubicTrap1D};
use crate::cluster::{minimize, parallel_map, Init, MinimizeOptions};
use crate::potential::{Grid2, PotentialField, Rect, SweepSource};
use crate::units::Frequency;
use crate::{Error, PhysicalConstants, Result};

pub use eigen::KrylovOptions;

pub const DEFAULT_POINTS: usize = 151;
/// Auto window half-width in units of the zero-point length.
pub const WINDOW_LENGTHS: f64 = 8.0;

/// H = −(ħ²/2m_e)∇²_h + U on the interior nodes of a window, ψ = 0 on its edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteHamiltonian {
    pub window: Rect,
    /// Interior node coordinates (m).
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// U at the nodes (J), `[j * nx + i]`.
    pub potential: Vec<f64>,
    /// ħ²/(2m_e h²) per axis (J).
    pub kin_x: f64,
    pub kin_y: f64,
    pub flags: Vec<String>,
}

impl DiscreteHamiltonian {
    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx(), self.ny());
        let (kx, ky) = (self.kin_x, self.kin_y);
        for j in 0..ny {
            for i in 0..nx {
                let idx = j * nx + i;
                let mut s = (self.potential[idx] + 2.0 * kx + 2.0 * ky) * v[idx];
                if i > 0 {
                    s -= kx * v[idx - 1];
                }
                if i + 1 < nx {
                    s -= kx * v[idx + 1];
                }
                if j > 0 {
                    s -= ky * v[idx - nx];
                }
                if j + 1 < ny {
                    s -= ky * v[idx + nx];
                }
                out[idx] = s;
            }
        }
    }

    /// Gershgorin bounds on the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self
            .potential
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
        (lo, hi + 4.0 * (self.kin_x + self.kin_y))
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|s| s == f)
    }
}

fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (lo + hi);
    let h = (hi - lo) / (n + 1) as f64;
    let mid = (n + 1) as f64 / 2.0;
    (0..n).map(|i| c + ((i + 1) as f64 - mid) * h).collect()
}

pub fn build_hamiltonian(field: &PotentialField, window: &Rect, nx: usize, ny: usize) -> Result<DiscreteHamiltonian> {
    if nx < 32 || ny < 32 {
        return Err(Error::usage(format!("grid {nx}×{ny} is below the 32×32 minimum")));
    }
    if !window.is_valid() {
        return Err(Error::usage("window must have positive extent"));
    }
    if let Some(d) = field.domain() {
        if !d.contains_rect(window) {
            return Err(Error::domain("window extends outside the coupling-map domain"));
        }
    }
    let c = field.constants();
    let x = nodes(window.x_min, window.x_max, nx);
    let y = nodes(window.y_min, window.y_max, ny);
    let hx = (window.x_max - window.x_min) / (nx + 1) as f64;
    let hy = (window.y_max - window.y_min) / (ny + 1) as f64;
    let mut potential = Vec::with_capacity(nx * ny);
    for &yy in &y {
        for &xx in &x {
            potential.push(field.energy(xx, yy)?);
        }
    }
    let mut flags = Vec::new();
    let imin = potential
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let (i, j) = (imin % nx, imin / nx);
    if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
        flags.push("window-misses-minimum".to_string());
    }
    let kin = |h: f64| c.hbar * c.hbar / (2.0 * c.m_e * h * h);
    Ok(DiscreteHamiltonian {
        window: *window,
        x,
        y,
        potential,
        kin_x: kin(hx),
        kin_y: kin(hy),
        flags,
    })
}

/// Window centred on the classical minimum with half-widths of
/// [`WINDOW_LENGTHS`] zero-point lengths √(ħ/2m_eω) per axis. Where the local
/// curvature is too weak the quartic length (ħ²/2m_e a2)^{1/6} is used instead.
pub fn auto_window(field: &PotentialField) -> Result<Rect> {
    let c = field.constants();
    let len = |k: f64, a2: f64| {
        let harm = if k > 0.0 { (c.hbar / (2.0 * (c.m_e * k).sqrt())).sqrt() } else { f64::INFINITY };
        let quart = if a2 > 0.0 {
            (c.hbar * c.hbar / (2.0 * c.m_e * a2)).powf(1.0 / 6.0)
        } else {
            f64::INFINITY
        };
        harm.min(quart)
    };
    if let Some(a) = field.analytic_coefficients() {
        let mut center = [0.0; 2];
        let mut half = [0.0; 2];
        for (axis, (a1, a2, e)) in [(a.a1x, a.a2x, field.e_x), (a.a1y, a.a2y, field.e_y)].into_iter().enumerate() {
            let trap = CubicTrap1D { a1, a2, e_y: e };
            let sol = cardano_minimum(&trap, c)?;
            let l = len(trap.curvature(sol.y0), a2);
            if !l.is_finite() {
                return Err(Error::domain("potential does not confine the electron"));
            }
            if e == 0.0 && sol.y0 != 0.0 {
                // symmetric double well: cover both minima
                half[axis] = sol.y0.abs() + WINDOW_LENGTHS * l;
            } else {
                center[axis] = sol.y0;
                half[axis] = WINDOW_LENGTHS * l;
            }
        }
        return Ok(Rect::centered(center[0], center[1], half[0], half[1]));
    }
    let dom = field.derivative_domain().ok_or_else(|| Error::domain("field has no domain"))?;
    let cfg = minimize(field, 1, &Init::Auto, &MinimizeOptions { max_restarts: 1, ..Default::default() })?;
    let [x0, y0] = cfg.positions[0];
    let h = field.energy_hessian(x0, y0)?;
    let (lx, ly) = (len(h[0][0], 0.0), len(h[1][1], 0.0));
    let hx = (WINDOW_LENGTHS * lx).min(x0 - dom.x_min).min(dom.x_max - x0);
    let hy = (WINDOW_LENGTHS * ly).min(y0 - dom.y_min).min(dom.y_max - y0);
    if !(hx > 0.0 && hy > 0.0) {
        return Err(Error::domain("no confining minimum inside the coupling-map domain"));
    }
    Ok(Rect::centered(x0, y0, hx, hy))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    /// Ascending (J).
    pub energies: Vec<f64>,
    /// Normalized so that Σψ² h_x h_y = 1.
    pub wavefunctions: Vec<Grid2>,
    /// ‖Hψ − Eψ‖/‖ψ‖ divided by the spectral span.
    pub residual_norms: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl EigenSolution {
    pub fn overlap(&self, a: usize, b: usize) -> f64 {
        let hx = self.x[1] - self.x[0];
        let hy = self.y[1] - self.y[0];
        let (u, v) = (&self.wavefunctions[a].data, &self.wavefunctions[b].data);
        u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>() * hx * hy
    }
}

pub fn eigenstates(h: &DiscreteHamiltonian, k: usize, opts: &KrylovOptions) -> Result<EigenSolution> {
    if !(1..=20).contains(&k) {
        return Err(Error::usage(format!("k = {k} outside 1..=20")));
    }
    let (nx, ny) = (h.nx(), h.ny());
    let n = h.dim();
    let (lo, hi) = h.spectral_bounds();
    let span = hi - lo;
    let diag0 = 2.0 * (h.kin_x + h.kin_y);
    let mut shift = lo;
    let factor = loop {
        let entry = |i: usize, d: usize| match d {
            0 => h.potential[i] + diag0 - shift,
            1 if !i.is_multiple_of(nx) => -h.kin_x,
            d if d == nx => -h.kin_y,
            _ => 0.0,
        };
        if let Some(f) = eigen::BandCholesky::factor(n, nx, entry) {
            break f;
        }
        shift -= 1e-6 * span;
    };
    let pairs = eigen::lowest_eigenpairs(n, k, |v, out| h.apply(v, out), &factor, span, opts)?;
    let hx = h.x[1] - h.x[0];
    let hy = h.y[1] - h.y[0];
    let wavefunctions = pairs
        .vectors
        .into_iter()
        .map(|mut v| {
            let norm = (v.iter().map(|a| a * a).sum::<f64>() * hx * hy).sqrt();
            // fix the sign by the largest component
            let big = v.iter().copied().fold(0.0, |m: f64, a| if a.abs() > m.abs() { a } else { m });
            let s = big.signum() / norm;
            v.iter_mut().for_each(|a| *a *= s);
            Grid2 { nx, ny, data: v }
        })
        .collect();
    Ok(EigenSolution {
        energies: pairs.values,
        wavefunctions,
        residual_norms: pairs.residuals,
        x: h.x.clone(),
        y: h.y.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transitions {
    pub omega_01: Frequency,
    pub omega_12: Frequency,
    /// α_e = (ω_12 − ω_01)/2π (Hz).
    pub alpha_e: f64,
}

pub fn transitions(sol: &EigenSolution, c: &PhysicalConstants) -> Result<Transitions> {
    let e = &sol.energies;
    if e.len() < 3 {
        return Err(Error::usage(format!("need at least 3 states, got {}", e.len())));
    }
    let w01 = (e[1] - e[0]) / c.hbar;
    let w12 = (e[2] - e[1]) / c.hbar;
    Ok(Transitions {
        omega_01: Frequency(w01),
        omega_12: Frequency(w12),
        alpha_e: (w12 - w01) / std::f64::consts::TAU,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WindowSpec {
    Auto,
    Fixed(Rect),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QSweepOptions {
    pub window: WindowSpec,
    pub nx: usize,
    pub ny: usize,
    pub e_x: f64,
    pub e_y: f64,
    pub jobs: usize,
    pub seed: u64,
}

impl Default for QSweepOptions {
    fn default() -> Self {
        QSweepOptions {
            window: WindowSpec::Auto,
            nx: DEFAULT_POINTS,
            ny: DEFAULT_POINTS,
            e_x: 0.0,
            e_y: 0.0,
            jobs: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub voltage: f64,
    /// Hz
    pub f01: f64,
    pub f12: f64,
    pub alpha_e: f64,
    /// Largest relative residual of the three states.
    pub residual: f64,
    pub flags: Vec<String>,
}

impl FrequencyRow {
    pub fn csv_header() -> &'static str {
        "voltage_V,f01_GHz,f12_GHz,alpha_e_MHz,residual,flags"
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{:.9},{:.9},{:.6},{:.3e},{}",
            self.voltage,
            self.f01 / 1e9,
            self.f12 / 1e9,
            self.alpha_e / 1e6,
            self.residual,
            self.flags.join(";")
        )
    }
}

pub fn frequency_rows_to_csv(rows: &[FrequencyRow]) -> String {
    let mut s = String::from(FrequencyRow::csv_header());
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

/// Solves the three lowest states of a single field.
pub fn solve_point(field: &PotentialField, opts: &QSweepOptions) -> Result<(Transitions, EigenSolution, DiscreteHamiltonian)> {
    let window = match opts.window {
        WindowSpec::Auto => auto_window(field)?,
        WindowSpec::Fixed(r) => r,
    };
    let h = build_hamiltonian(field, &window, opts.nx, opts.ny)?;
    let sol = eigenstates(&h, 3, &KrylovOptions { seed: opts.seed, ..Default::default() })?;
    let t = transitions(&sol, field.constants())?;
    Ok((t, sol, h))
}

/// ω_01, ω_12 and α_e along a voltage sweep. Failed points keep NaN
/// frequencies and an `error:` flag.
pub fn frequency_vs_voltage(
    source: &SweepSource,
    voltages: &[f64],
    opts: &QSweepOptions,
    consts: &PhysicalConstants,
) -> Vec<FrequencyRow> {
    parallel_map(voltages, opts.jobs, |&v| {
        let res = source
            .field_at(v, opts.e_x, opts.e_y, consts)
            .and_then(|f| solve_point(&f, opts));
        match res {
            Ok((t, sol, h)) => FrequencyRow {
                voltage: v,
                f01: t.omega_01.hz(),
                f12: t.omega_12.hz(),
                alpha_e: t.alpha_e,
                residual: sol.residual_norms.iter().cloned().fold(0.0, f64::max),
                flags: h.flags,
            },
            Err(e) => FrequencyRow {
                voltage: v,
                f01: f64::NAN,
                f12: f64::NAN,
                alpha_e: f64::NAN,
                residual: f64::NAN,
                flags: vec![format!("error:{}", e.kind())],
            },
        }
    })
}

#[cfg(test)]
mod tests;
