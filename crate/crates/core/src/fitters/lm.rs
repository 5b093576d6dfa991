//! Levenberg–Marquardt least squares with bound-enforcing parameter
//! transforms and linearized covariance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::{Error, Result};

/// Map from an unconstrained internal coordinate u to the natural parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    /// p = offset + scale·u
    Linear { offset: f64, scale: f64 },
    /// p = exp(u), keeps rates positive.
    Log,
    /// p = sin²(u), keeps fractions in [0, 1].
    UnitInterval,
}

impl Transform {
    pub fn identity() -> Self {
        Transform::Linear {
            offset: 0.0,
            scale: 1.0,
        }
    }

    fn to_natural(self, u: f64) -> f64 {
        match self {
            Transform::Linear { offset, scale } => offset + scale * u,
            Transform::Log => u.exp(),
            Transform::UnitInterval => u.sin().powi(2),
        }
    }

    fn to_internal(self, p: f64) -> Result<f64> {
        match self {
            Transform::Linear { offset, scale } => Ok((p - offset) / scale),
            Transform::Log if p > 0.0 => Ok(p.ln()),
            Transform::UnitInterval if (0.0..=1.0).contains(&p) => Ok(p.sqrt().asin()),
            _ => Err(Error::usage(format!("initial value {p} outside the parameter bounds"))),
        }
    }

    fn derivative(self, u: f64) -> f64 {
        match self {
            Transform::Linear { scale, .. } => scale,
            Transform::Log => u.exp(),
            Transform::UnitInterval => (2.0 * u).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub init: f64,
    pub transform: Transform,
}

impl ParamSpec {
    pub fn new(name: &str, init: f64, transform: Transform) -> Self {
        ParamSpec {
            name: name.to_owned(),
            init,
            transform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub value: f64,
    /// One-sigma uncertainty; NaN when the covariance is singular.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BTreeMap<String, ParamEstimate>,
    pub rss: f64,
    /// Accepted steps.
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl FitResult {
    pub fn value(&self, name: &str) -> f64 {
        self.params.get(name).map_or(f64::NAN, |p| p.value)
    }

    pub fn sigma(&self, name: &str) -> f64 {
        self.params.get(name).map_or(f64::NAN, |p| p.sigma)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub(crate) fn flag(&mut self, flag: &str) {
        if !self.has_flag(flag) {
            self.flags.push(flag.to_owned());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Converged when an accepted step lowers the cost by less than this
    /// relative amount.
    pub rel_cost_tol: f64,
    /// Converged when ‖Jᵀr‖∞ falls below this (internal coordinates).
    pub grad_tol: f64,
    /// Converged when the step is this small relative to ‖u‖.
    pub step_tol: f64,
    /// Central-difference step in internal coordinates.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            rel_cost_tol: 1e-10,
            grad_tol: 1e-14,
            step_tol: 1e-12,
            fd_step: 1e-6,
        }
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes Σ rᵢ(p)² where `residuals(p, out)` fills `out` (length `m`)
/// from natural parameter values `p`.
pub fn least_squares(
    specs: &[ParamSpec],
    m: usize,
    mut residuals: impl FnMut(&[f64], &mut [f64]),
    opts: &LmOptions,
) -> Result<FitResult> {
    let n = specs.len();
    if n == 0 || m < n {
        return Err(Error::usage(format!("need 1 ≤ parameters ≤ residuals, got {n} and {m}")));
    }
    let mut u: Vec<f64> = specs
        .iter()
        .map(|s| s.transform.to_internal(s.init))
        .collect::<Result<_>>()?;
    let natural = |u: &[f64]| -> Vec<f64> {
        specs.iter().zip(u).map(|(s, &v)| s.transform.to_natural(v)).collect()
    };
    let mut eval = |u: &[f64], out: &mut [f64]| {
        residuals(&natural(u), out);
    };

    let mut r = vec![0.0; m];
    eval(&u, &mut r);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::usage("residuals are not finite at the initial point"));
    }
    let mut c = cost(&r);
    let c_init = c;

    let jacobian = |u: &[f64], eval: &mut dyn FnMut(&[f64], &mut [f64])| -> DMatrix<f64> {
        let mut j = DMatrix::zeros(m, n);
        let mut up = u.to_vec();
        let mut rp = vec![0.0; m];
        let mut rm = vec![0.0; m];
        for k in 0..n {
            let h = opts.fd_step * u[k].abs().max(1.0);
            up[k] = u[k] + h;
            eval(&up, &mut rp);
            up[k] = u[k] - h;
            eval(&up, &mut rm);
            up[k] = u[k];
            for i in 0..m {
                j[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        j
    };

    // start close to Gauss–Newton; rejected steps raise the damping quickly
    let mut lambda = 1e-8;
    let mut converged = false;
    let mut iterations = 0;
    let mut attempts = 0;
    let mut trial = vec![0.0; m];
    let mut jac = jacobian(&u, &mut eval);
    while attempts < opts.max_iterations {
        attempts += 1;
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &rv;
        if jtr.amax() < opts.grad_tol * (1.0 + c) {
            converged = true;
            break;
        }
        let diag: Vec<f64> = (0..n).map(|k| jtj[(k, k)].max(1e-12 * jtj.diagonal().max())).collect();
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * diag[k];
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&jtr));
            let ut: Vec<f64> = u.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            eval(&ut, &mut trial);
            let ct = cost(&trial);
            if ct.is_finite() && ct < c {
                let rel = (c - ct) / c.max(f64::MIN_POSITIVE);
                let unorm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                let small_step = delta.norm() <= opts.step_tol * (unorm + opts.step_tol);
                u = ut;
                std::mem::swap(&mut r, &mut trial);
                c = ct;
                lambda = (lambda / 5.0).max(1e-15);
                accepted = true;
                iterations += 1;
                // an exact fit has no further relative decrease to measure
                let at_floor = c <= 1e-24 * c_init;
                if rel < opts.rel_cost_tol || small_step || at_floor {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
        }
        if !accepted {
            // no decrease possible at any damping: the current point is a
            // minimum to working precision unless the system was singular
            if jtj.diagonal().iter().all(|d| *d == 0.0) {
                return Err(Error::NonConvergence {
                    detail: format!("singular normal equations after {iterations} iterations, cost {c:.6e}"),
                });
            }
            converged = true;
            break;
        }
        jac = jacobian(&u, &mut eval);
        if converged {
            break;
        }
    }

    // covariance s²(JᵀJ)⁻¹ in internal coordinates, mapped by the delta method
    let mut result = FitResult {
        params: BTreeMap::new(),
        rss: c,
        iterations,
        converged,
        flags: Vec::new(),
    };
    let dof = (m - n).max(1) as f64;
    let s2 = c / dof;
    let jtj = jac.transpose() * &jac;
    let eig = SymmetricEigen::new(jtj);
    let emax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut cov = DMatrix::zeros(n, n);
    let mut undetermined = vec![false; n];
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        if ev > 1e-12 * emax && emax > 0.0 {
            cov += (v * v.transpose()) * (s2 / ev);
        } else {
            for (i, x) in v.iter().enumerate() {
                if x.abs() > 1e-6 {
                    undetermined[i] = true;
                }
            }
        }
    }
    if undetermined.iter().any(|&b| b) {
        result.flag("singular-covariance");
    }
    let p = natural(&u);
    for (i, s) in specs.iter().enumerate() {
        let sigma = if undetermined[i] {
            f64::NAN
        } else {
            s.transform.derivative(u[i]).abs() * cov[(i, i)].max(0.0).sqrt()
        };
        result.params.insert(s.name.clone(), ParamEstimate { value: p[i], sigma });
    }
    if !converged {
        result.flag("max-iterations");
    }
    Ok(result)
}
