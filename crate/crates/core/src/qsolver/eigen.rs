//! Lowest eigenpairs of a sparse symmetric operator by shift-invert block
//! Krylov iteration with Rayleigh-Ritz extraction.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::synth::rng_from_seed;
use crate::{Error, Result};

/// Dot product with independent partial sums so the loop vectorizes.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// Symmetric positive-definite band matrix factored as L·Lᵀ.
/// `l[i * (bw + 1) + bw − d]` holds L(i, i − d).
pub(crate) struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// `entry(i, d)` returns A(i, i − d) for d ≤ bw.
    pub(crate) fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Option<Self> {
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let dmax = bw.min(i);
            for d in (1..=dmax).rev() {
                let j = i - d;
                // Σ_k L(i,k) L(j,k) over the shared band left of column j
                let kmax = (bw - d).min(j);
                let s = entry(i, d)
                    - dot(
                        &l[i * w + bw - d - kmax..i * w + bw - d],
                        &l[j * w + bw - kmax..j * w + bw],
                    );
                l[i * w + bw - d] = s / l[j * w + bw];
            }
            let row = &l[i * w + bw - dmax..i * w + bw];
            let s = entry(i, 0) - dot(row, row);
            if !(s > 0.0) {
                return None;
            }
            l[i * w + bw] = s.sqrt();
        }
        Some(BandCholesky { n, bw, l })
    }

    pub(crate) fn solve_in_place(&self, b: &mut [f64]) {
        let (w, bw) = (self.bw + 1, self.bw);
        for i in 0..self.n {
            let dmax = bw.min(i);
            let row = &self.l[i * w..(i + 1) * w];
            b[i] = (b[i] - dot(&row[bw - dmax..bw], &b[i - dmax..i])) / row[bw];
        }
        for i in (0..self.n).rev() {
            let dmax = bw.min(i);
            let row = &self.l[i * w..(i + 1) * w];
            let x = b[i] / row[bw];
            b[i] = x;
            b[i - dmax..i].iter_mut().zip(&row[bw - dmax..bw]).for_each(|(y, a)| *y -= a * x);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub seed: u64,
    /// Extra block vectors beyond the requested count.
    pub guard: usize,
    /// Krylov blocks per restart.
    pub blocks: usize,
    pub max_restarts: usize,
    /// Target residual relative to the spectral span.
    pub tol: f64,
    /// Largest residual still reported as converged.
    pub accept: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            seed: 0,
            guard: 3,
            blocks: 5,
            max_restarts: 60,
            tol: 1e-9,
            accept: 1e-6,
        }
    }
}

pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// ‖Av − λv‖ / span per pair.
    pub residuals: Vec<f64>,
}


/// Orthonormalizes `v` against `basis` (two passes); `None` if it vanishes.
fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n0 = dot(&v, &v).sqrt();
    for _ in 0..2 {
        for b in basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = dot(&v, &v).sqrt();
    if !(n > 1e-10 * n0) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= n);
    Some(v)
}

/// k lowest eigenpairs of `apply` given a factorization of (A − σ).
pub(crate) fn lowest_eigenpairs(
    n: usize,
    k: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    inv: &BandCholesky,
    span: f64,
    opts: &KrylovOptions,
) -> Result<Eigenpairs> {
    let p = (k + opts.guard).min(n);
    let mut rng = rng_from_seed(opts.seed);
    let mut block: Vec<Vec<f64>> = Vec::with_capacity(p);
    while block.len() < p {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(v) = orthonormalize(v, &block) {
            block.push(v);
        }
    }
    let mut best: Option<Eigenpairs> = None;
    let mut av = vec![0.0; n];
    for _ in 0..opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in block.drain(..) {
            if let Some(v) = orthonormalize(v, &basis) {
                basis.push(v);
            }
        }
        let mut last: Vec<usize> = (0..basis.len()).collect();
        for _ in 1..opts.blocks {
            let mut next = Vec::new();
            for &i in &last {
                let mut w = basis[i].clone();
                inv.solve_in_place(&mut w);
                if let Some(w) = orthonormalize(w, &basis) {
                    basis.push(w);
                    next.push(basis.len() - 1);
                }
            }
            if next.is_empty() || basis.len() >= n {
                break;
            }
            last = next;
        }
        let m = basis.len();
        let hv: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| {
                apply(v, &mut av);
                av.clone()
            })
            .collect();
        let t = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&basis[i], &hv[j]) + dot(&basis[j], &hv[i])));
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut values = Vec::with_capacity(p);
        let mut vectors = Vec::with_capacity(p);
        let mut residuals = Vec::with_capacity(p);
        for &c in order.iter().take(p.min(m)) {
            let s = eig.eigenvectors.column(c);
            let mut y = vec![0.0; n];
            let mut hy = vec![0.0; n];
            for (j, (b, h)) in basis.iter().zip(&hv).enumerate() {
                let sj = s[j];
                y.iter_mut().zip(b).for_each(|(a, x)| *a += sj * x);
                hy.iter_mut().zip(h).for_each(|(a, x)| *a += sj * x);
            }
            let theta = eig.eigenvalues[c];
            let r = hy.iter().zip(&y).map(|(a, b)| (a - theta * b).powi(2)).sum::<f64>().sqrt();
            values.push(theta);
            residuals.push(r / span);
            vectors.push(y);
        }
        let worst = residuals[..k].iter().cloned().fold(0.0, f64::max);
        let done = worst < opts.tol;
        let improved = best.as_ref().is_none_or(|b| worst < b.residuals[..k].iter().cloned().fold(0.0, f64::max));
        block = vectors.clone();
        if improved {
            best = Some(Eigenpairs { values, vectors, residuals });
        }
        if done {
            break;
        }
    }
    let mut best = best.expect("at least one restart");
    best.values.truncate(k);
    best.vectors.truncate(k);
    best.residuals.truncate(k);
    let worst = best.residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst < opts.accept) {
        return Err(Error::NonConvergence {
            detail: format!("eigensolver residuals {:?} (relative to span)", best.residuals),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_cholesky_solves_tridiagonal() {
        let n = 50;
        let entry = |i: usize, d: usize| match d {
            0 => 2.0 + 0.01 * i as f64,
            1 => -1.0,
            _ => 0.0,
        };
        let f = BandCholesky::factor(n, 2, entry).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = entry(i, 0) * x[i];
            if i > 0 {
                b[i] += entry(i, 1) * x[i - 1];
            }
            if i + 1 < n {
                b[i] += entry(i + 1, 1) * x[i + 1];
            }
        }
        f.solve_in_place(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12);
        }
        assert!(BandCholesky::factor(3, 1, |_, d| if d == 0 { -1.0 } else { 0.0 }).is_none());
    }

    #[test]
    fn krylov_matches_dense_eigensolver() {
        let n = 120;
        let diag = |i: usize| 2.0 + ((i * 7) % 11) as f64 * 0.05;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let mut s = diag(i) * v[i];
                if i > 0 {
                    s -= v[i - 1];
                }
                if i + 1 < n {
                    s -= v[i + 1];
                }
                out[i] = s;
            }
        };
        let inv = BandCholesky::factor(n, 1, |i, d| if d == 0 { diag(i) } else { -1.0 }).unwrap();
        let r = lowest_eigenpairs(n, 5, apply, &inv, 4.0, &KrylovOptions::default()).unwrap();
        let dense = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag(i)
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in r.values.iter().zip(&ev) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
