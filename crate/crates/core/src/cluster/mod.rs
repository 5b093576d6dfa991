//! Classical N-electron clusters: energy minimization, normal modes and the
//! coupled electron-resonator spectrum.

mod sweep;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::zero_point_length;
use crate::potential::{CouplingGradientMap, PotentialField};
use crate::resonator::ResonatorParams;
use crate::synth::rng_from_seed;
use crate::{Error, Result};

pub use sweep::{parallel_map, rows_to_csv, shift_vs_voltage_sweep, ShiftRow, SweepMode, SweepOptions};

/// Closest allowed approach of two electrons (m).
pub const MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectronConfiguration {
    /// (x, y) per electron (m).
    pub positions: Vec<[f64; 2]>,
    /// J
    pub total_energy: f64,
    pub converged: bool,
    /// Euclidean norm of ∇U_tot over all coordinates (J/m).
    pub gradient_norm: f64,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_restarts: usize,
    pub seed: u64,
    /// J/m
    pub grad_tol: f64,
    pub rel_energy_tol: f64,
    pub max_iterations: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_restarts: 8,
            seed: 0,
            grad_tol: 1e-28,
            rel_energy_tol: 1e-14,
            max_iterations: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Auto,
    Positions(Vec<[f64; 2]>),
}

fn check_separations(pos: &[[f64; 2]]) -> Result<()> {
    for i in 0..pos.len() {
        for j in 0..i {
            let d = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
            if !(d > MIN_SEPARATION) {
                return Err(Error::domain(format!(
                    "electrons {j} and {i} are {d:.3e} m apart (minimum {MIN_SEPARATION:e} m)"
                )));
            }
        }
    }
    Ok(())
}

/// U_tot = Σᵢ U(rᵢ) + Σ_{i<j} e²/(4πε₀|rᵢ − rⱼ|).
pub fn total_energy(field: &PotentialField, pos: &[[f64; 2]]) -> Result<f64> {
    check_separations(pos)?;
    let k = field.constants().coulomb_k();
    let mut e = 0.0;
    for (i, p) in pos.iter().enumerate() {
        e += field.energy(p[0], p[1])?;
        for q in &pos[..i] {
            e += k / (p[0] - q[0]).hypot(p[1] - q[1]);
        }
    }
    Ok(e)
}

/// ∇U_tot, flattened as (x₀, y₀, x₁, y₁, …) (J/m).
pub fn total_gradient(field: &PotentialField, pos: &[[f64; 2]]) -> Result<Vec<f64>> {
    check_separations(pos)?;
    let k = field.constants().coulomb_k();
    let mut g = vec![0.0; 2 * pos.len()];
    for (i, p) in pos.iter().enumerate() {
        let gi = field.energy_gradient(p[0], p[1])?;
        g[2 * i] += gi[0];
        g[2 * i + 1] += gi[1];
        for (j, q) in pos[..i].iter().enumerate() {
            let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
            let d = dx.hypot(dy);
            let f = -k / (d * d * d);
            g[2 * i] += f * dx;
            g[2 * i + 1] += f * dy;
            g[2 * j] -= f * dx;
            g[2 * j + 1] -= f * dy;
        }
    }
    Ok(g)
}

/// Hessian of U_tot (J/m²), 2N×2N, symmetric.
pub fn total_hessian(field: &PotentialField, pos: &[[f64; 2]]) -> Result<DMatrix<f64>> {
    check_separations(pos)?;
    let n = pos.len();
    let k = field.constants().coulomb_k();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for (i, p) in pos.iter().enumerate() {
        let hi = field.energy_hessian(p[0], p[1])?;
        for a in 0..2 {
            for b in 0..2 {
                h[(2 * i + a, 2 * i + b)] += hi[a][b];
            }
        }
        for (j, q) in pos[..i].iter().enumerate() {
            let r = [p[0] - q[0], p[1] - q[1]];
            let d = r[0].hypot(r[1]);
            let (d3, d5) = (d * d * d, d.powi(5));
            for a in 0..2 {
                for b in 0..2 {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    let blk = k * (3.0 * r[a] * r[b] / d5 - delta / d3);
                    h[(2 * i + a, 2 * i + b)] += blk;
                    h[(2 * j + a, 2 * j + b)] += blk;
                    h[(2 * i + a, 2 * j + b)] -= blk;
                    h[(2 * j + a, 2 * i + b)] -= blk;
                }
            }
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

fn to_positions(x: &[f64], scale: f64) -> Vec<[f64; 2]> {
    x.chunks(2).map(|c| [c[0] * scale, c[1] * scale]).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Problem in dimensionless units: x̃ = x/L, Ẽ = E/E₀.
struct Scaled<'a> {
    field: &'a PotentialField,
    len: f64,
    e0: f64,
}

impl Scaled<'_> {
    fn energy(&self, x: &[f64]) -> f64 {
        total_energy(self.field, &to_positions(x, self.len)).map_or(f64::INFINITY, |e| e / self.e0)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let g = total_gradient(self.field, &to_positions(x, self.len)).ok()?;
        Some(g.into_iter().map(|v| v * self.len / self.e0).collect())
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let h = total_hessian(self.field, &to_positions(x, self.len)).ok()?;
        Some(h * (self.len * self.len / self.e0))
    }
}

struct LocalResult {
    x: Vec<f64>,
    energy: f64,
    converged: bool,
}

/// BFGS with Armijo backtracking, then Newton polish on the positive
/// eigenspace of the analytic Hessian. Energy never increases.
fn local_minimize(p: &Scaled, x0: Vec<f64>, opts: &MinimizeOptions) -> LocalResult {
    let n = x0.len();
    let grad_tol = opts.grad_tol * p.len / p.e0;
    let mut x = x0;
    let mut e = p.energy(&x);
    let Some(mut g) = p.gradient(&x) else {
        return LocalResult {
            x,
            energy: f64::INFINITY,
            converged: false,
        };
    };
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut converged = false;
    let mut stalled = false;
    for _ in 0..opts.max_iterations {
        if norm(&g) < grad_tol {
            converged = true;
            break;
        }
        let gv = DVector::from_column_slice(&g);
        let mut d = -(&hinv * &gv);
        if d.dot(&gv) >= 0.0 {
            hinv = DMatrix::identity(n, n);
            d = -gv.clone();
        }
        // cap the step at a fraction of the length scale
        let dn = d.norm();
        if dn > 0.5 {
            d *= 0.5 / dn;
        }
        let slope = d.dot(&gv);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xt: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + t * b).collect();
            let et = p.energy(&xt);
            if et.is_finite() && et <= e + 1e-4 * t * slope {
                accepted = Some((xt, et));
                break;
            }
            t *= 0.5;
        }
        let Some((xt, et)) = accepted else {
            stalled = true;
            break;
        };
        let Some(gt) = p.gradient(&xt) else {
            stalled = true;
            break;
        };
        let s = DVector::from_iterator(n, xt.iter().zip(&x).map(|(a, b)| a - b));
        let yv = DVector::from_iterator(n, gt.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&yv);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let a = &i - &s * yv.transpose() * rho;
            hinv = &a * &hinv * a.transpose() + &s * s.transpose() * rho;
        }
        let rel = (e - et).abs() / e.abs().max(1e-300);
        x = xt;
        e = et;
        g = gt;
        if rel < opts.rel_energy_tol {
            converged = true;
            break;
        }
    }
    let _ = stalled;

    // Newton polish
    for _ in 0..30 {
        if norm(&g) < grad_tol {
            converged = true;
            break;
        }
        let Some(h) = p.hessian(&x) else { break };
        let eig = SymmetricEigen::new(h);
        let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let gv = DVector::from_column_slice(&g);
        let mut step = DVector::zeros(n);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 1e-10 * lmax {
                let v = eig.eigenvectors.column(k);
                step -= v * (v.dot(&gv) / l);
            }
        }
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let xt: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            let et = p.energy(&xt);
            if let (true, Some(gt)) = (et <= e, p.gradient(&xt)) {
                if norm(&gt) < norm(&g) || et < e {
                    let rel = (e - et).abs() / e.abs().max(1e-300);
                    x = xt;
                    e = et;
                    g = gt;
                    improved = true;
                    if rel < opts.rel_energy_tol {
                        converged = true;
                    }
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if norm(&g) < grad_tol {
        converged = true;
    }
    LocalResult { x, energy: e, converged }
}

/// Lowest-energy point of a single electron: Newton/BFGS from the origin
/// (analytic) or from the lowest interior grid node (gridded).
fn single_particle_seed(field: &PotentialField) -> [f64; 2] {
    match field.derivative_domain() {
        None => [0.0, 0.0],
        Some(d) => {
            let maps = field.coupling_maps().expect("gridded field");
            let mut best = (f64::INFINITY, [0.5 * (d.x_min + d.x_max), 0.5 * (d.y_min + d.y_max)]);
            for &y in &maps.axes.y {
                for &x in &maps.axes.x {
                    if d.contains(x, y) {
                        if let Ok(u) = field.energy(x, y) {
                            if u < best.0 {
                                best = (u, [x, y]);
                            }
                        }
                    }
                }
            }
            best.1
        }
    }
}

/// Triangular-lattice sites nearest the origin, unit spacing.
fn lattice(n: usize) -> Vec<[f64; 2]> {
    let m = (n as f64).sqrt().ceil() as i64 + 2;
    let mut pts = Vec::new();
    for j in -m..=m {
        for i in -m..=m {
            let x = i as f64 + 0.5 * (j.rem_euclid(2)) as f64;
            let y = j as f64 * 3f64.sqrt() / 2.0;
            pts.push([x, y]);
        }
    }
    pts.sort_by(|a, b| {
        (a[0].hypot(a[1]))
            .total_cmp(&b[0].hypot(b[1]))
            .then(a[1].total_cmp(&b[1]))
            .then(a[0].total_cmp(&b[0]))
    });
    pts.truncate(n);
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    pts.iter().map(|p| [p[0] - cx, p[1] - cy]).collect()
}

/// Finds the minimum-energy configuration of `n` electrons, keeping the
/// lowest over `max_restarts` seeded starts.
pub fn minimize(field: &PotentialField, n: usize, init: &Init, opts: &MinimizeOptions) -> Result<ElectronConfiguration> {
    if n == 0 {
        return Err(Error::usage("need at least one electron"));
    }
    if let Init::Positions(p) = init {
        if p.len() != n {
            return Err(Error::usage(format!("{} initial positions for {n} electrons", p.len())));
        }
        check_separations(p)?;
    }
    // length scale from the single-particle trap curvature
    let kc = field.constants().coulomb_k();
    let seed_pt = match init {
        Init::Positions(p) => [
            p.iter().map(|q| q[0]).sum::<f64>() / n as f64,
            p.iter().map(|q| q[1]).sum::<f64>() / n as f64,
        ],
        Init::Auto => single_particle_seed(field),
    };
    let curv = field
        .energy_hessian(seed_pt[0], seed_pt[1])
        .map(|h| {
            let tr = 0.5 * (h[0][0] + h[1][1]);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let disc = (tr * tr - det).max(0.0).sqrt();
            (tr - disc).abs().max((tr + disc).abs() * 1e-3)
        })
        .unwrap_or(1e-10);
    let curv = if curv > 0.0 && curv.is_finite() { curv } else { 1e-10 };
    let len = (kc / curv).cbrt();
    let p = Scaled {
        field,
        len,
        e0: curv * len * len,
    };

    let center = match init {
        Init::Positions(_) => seed_pt,
        Init::Auto => {
            let r = local_minimize(
                &Scaled {
                    field,
                    len,
                    e0: p.e0,
                },
                vec![seed_pt[0] / len, seed_pt[1] / len],
                opts,
            );
            if r.energy.is_finite() {
                [r.x[0] * len, r.x[1] * len]
            } else {
                seed_pt
            }
        }
    };
    let base: Vec<[f64; 2]> = match init {
        Init::Positions(q) => q.iter().map(|v| [v[0] / len, v[1] / len]).collect(),
        Init::Auto => lattice(n)
            .into_iter()
            .map(|v| [center[0] / len + v[0], center[1] / len + v[1]])
            .collect(),
    };

    let mut rng = rng_from_seed(opts.seed);
    let restarts = opts.max_restarts.max(1);
    let mut best: Option<(LocalResult, usize)> = None;
    for k in 0..restarts {
        let mut x: Vec<f64> = base.iter().flat_map(|v| [v[0], v[1]]).collect();
        if k > 0 || (matches!(init, Init::Auto) && n > 1) {
            let sigma = if k == 0 { 0.02 } else { 0.3 };
            let rot: f64 = rng.random_range(0.0..std::f64::consts::TAU) * if k == 0 { 0.0 } else { 1.0 };
            let (s, c) = rot.sin_cos();
            let (cx, cy) = (center[0] / len, center[1] / len);
            for pair in x.chunks_mut(2) {
                let (dx, dy) = (pair[0] - cx, pair[1] - cy);
                let nx: f64 = StandardNormal.sample(&mut rng);
                let ny: f64 = StandardNormal.sample(&mut rng);
                pair[0] = cx + c * dx - s * dy + sigma * nx;
                pair[1] = cy + s * dx + c * dy + sigma * ny;
            }
            if check_separations(&to_positions(&x, len)).is_err() {
                continue;
            }
        }
        let r = local_minimize(&p, x, opts);
        let better = match &best {
            None => true,
            Some((b, _)) => {
                (r.converged && !b.converged) || (r.converged == b.converged && r.energy < b.energy)
            }
        };
        if better {
            best = Some((r, k + 1));
        }
    }
    let (r, _) = best.ok_or_else(|| Error::domain("no valid starting configuration"))?;
    let positions = to_positions(&r.x, len);
    let total = total_energy(field, &positions)?;
    let gn = norm(&total_gradient(field, &positions)?);
    Ok(ElectronConfiguration {
        positions,
        total_energy: total,
        converged: r.converged,
        gradient_norm: gn,
        restarts_used: restarts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalModes {
    /// Angular frequencies, ascending. Unstable directions appear with a
    /// negative sign (magnitude of the imaginary frequency).
    pub frequencies: Vec<f64>,
    /// Columns are orthonormal mode vectors in (x₀, y₀, x₁, y₁, …).
    #[serde(skip)]
    pub eigenvectors: DMatrix<f64>,
    pub saddle: bool,
    /// |ω| of the unstable modes (rad/s).
    pub unstable: Vec<f64>,
}

/// Normal modes from the 2N×2N Hessian: ω_k = √(λ_k/m_e).
pub fn normal_modes(field: &PotentialField, config: &ElectronConfiguration) -> Result<NormalModes> {
    let h = total_hessian(field, &config.positions)?;
    let m = field.constants().m_e;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lmax = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = 1e-9 * lmax;
    let n = order.len();
    let mut vecs = DMatrix::zeros(n, n);
    let mut freqs = Vec::with_capacity(n);
    let mut unstable = Vec::new();
    for (c, &k) in order.iter().enumerate() {
        let l = eig.eigenvalues[k];
        let w = (l.abs() / m).sqrt();
        if l < -tol {
            unstable.push(w);
            freqs.push(-w);
        } else {
            freqs.push(if l > 0.0 { w } else { 0.0 });
        }
        vecs.set_column(c, &eig.eigenvectors.column(k));
    }
    Ok(NormalModes {
        frequencies: freqs,
        eigenvectors: vecs,
        saddle: !unstable.is_empty(),
        unstable,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledModes {
    /// Angular frequencies of the 2N+1 hybrid modes, ascending.
    pub frequencies: Vec<f64>,
    /// Squared resonator component of each hybrid mode.
    pub participations: Vec<f64>,
    /// Frequency of the most resonator-like mode minus the bare ω_r (rad/s).
    pub shift: f64,
    /// Mechanical-mode couplings g_k at the resonator frequency (rad/s).
    pub mode_couplings: Vec<f64>,
}

/// Per-mode couplings g_k = Σᵢ gᵢ v_k[yᵢ] with gᵢ = (e/ħ) l_y(ω_r) V_zpf ∂α⁻/∂y(rᵢ).
pub fn mode_couplings(
    modes: &NormalModes,
    config: &ElectronConfiguration,
    res: &ResonatorParams,
    gradmap: &CouplingGradientMap,
    consts: &crate::PhysicalConstants,
) -> Result<Vec<f64>> {
    let d = res.derived(consts)?;
    let l_y = zero_point_length(d.omega_r.value(), consts);
    let pref = consts.e / consts.hbar * l_y * d.v_zpf;
    let gi: Vec<f64> = config
        .positions
        .iter()
        .map(|p| gradmap.at(p[0], p[1]).map(|v| pref * v))
        .collect::<Result<_>>()?;
    let n = modes.frequencies.len();
    Ok((0..n)
        .map(|k| (0..gi.len()).map(|i| gi[i] * modes.eigenvectors[(2 * i + 1, k)]).sum())
        .collect())
}

/// Hybridizes the resonator with the mechanical modes in ω² space.
///
/// Diagonal: ω_r², ω_k². Off-diagonal: 2 g_k ω_r, with g_k evaluated at the
/// resonator frequency. This equals 2 g_k(ω_k) √(ω_r ω_k) when each mode's own
/// zero-point length is used, and gives the 2g splitting on resonance.
pub fn coupled_spectrum(
    modes: &NormalModes,
    config: &ElectronConfiguration,
    res: &ResonatorParams,
    gradmap: &CouplingGradientMap,
    consts: &crate::PhysicalConstants,
) -> Result<CoupledModes> {
    let gk = mode_couplings(modes, config, res, gradmap, consts)?;
    let wr = res.omega_r().value();
    Ok(hybridize(wr, &modes.frequencies, &gk))
}

/// The (M+1)×(M+1) ω²-space eigenproblem for a resonator at `wr` coupled to
/// modes `wk` with couplings `gk`.
pub fn hybridize(wr: f64, wk: &[f64], gk: &[f64]) -> CoupledModes {
    let m = wk.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    a[(0, 0)] = wr * wr;
    for k in 0..m {
        a[(k + 1, k + 1)] = wk[k] * wk[k].abs();
        a[(0, k + 1)] = 2.0 * gk[k] * wr;
        a[(k + 1, 0)] = 2.0 * gk[k] * wr;
    }
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..=m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let freqs: Vec<f64> = order
        .iter()
        .map(|&k| {
            let l = eig.eigenvalues[k];
            l.signum() * l.abs().sqrt()
        })
        .collect();
    let parts: Vec<f64> = order.iter().map(|&k| eig.eigenvectors[(0, k)].powi(2)).collect();
    let imax = parts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    CoupledModes {
        shift: freqs[imax] - wr,
        frequencies: freqs,
        participations: parts,
        mode_couplings: gk.to_vec(),
    }
}
