//! Trap depth and local-minimum search over a rectangular region.

use serde::Serialize;

use super::grid::Rect;
use super::PotentialField;
use crate::{Error, Result};

const SAMPLES: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapDepth {
    /// U_boundary_min − U_interior_min (J); 0 when `no_trap`.
    pub depth: f64,
    /// depth / h in GHz.
    pub depth_ghz: f64,
    pub no_trap: bool,
    pub interior_min: [f64; 2],
    pub boundary_min: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMinimum {
    pub x: f64,
    pub y: f64,
    /// U at the minimum (J).
    pub energy: f64,
}

fn check_region(field: &PotentialField, region: &Rect) -> Result<()> {
    if !region.is_valid() {
        return Err(Error::usage("trap region must have positive extent"));
    }
    if let Some(d) = field.domain() {
        if !d.contains_rect(region) {
            return Err(Error::domain("trap region extends outside the potential domain"));
        }
    }
    Ok(())
}

fn sample(field: &PotentialField, region: &Rect) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let lin = |a: f64, b: f64| -> Vec<f64> {
        (0..SAMPLES)
            .map(|k| a + (b - a) * k as f64 / (SAMPLES - 1) as f64)
            .collect()
    };
    let xs = lin(region.x_min, region.x_max);
    let ys = lin(region.y_min, region.y_max);
    let mut u = Vec::with_capacity(SAMPLES * SAMPLES);
    for &y in &ys {
        for &x in &xs {
            u.push(field.energy(x, y)?);
        }
    }
    Ok((xs, ys, u))
}

/// Newton iterations on ∇U = 0 from a sampled minimum; returns the refined
/// point if it stays in the region and lowers U.
fn newton_polish(field: &PotentialField, region: &Rect, x0: f64, y0: f64) -> (f64, f64, f64) {
    let u0 = field.energy(x0, y0).unwrap_or(f64::INFINITY);
    let (mut x, mut y) = (x0, y0);
    for _ in 0..50 {
        let (Ok(g), Ok(h)) = (field.energy_gradient(x, y), field.energy_hessian(x, y)) else {
            break;
        };
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if !(h[0][0] > 0.0 && det > 0.0) {
            break;
        }
        let dx = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
        let (nx, ny) = (x + dx, y + dy);
        if !region.contains(nx, ny) {
            break;
        }
        x = nx;
        y = ny;
        if dx.abs() < 1e-15 && dy.abs() < 1e-15 {
            break;
        }
    }
    match field.energy(x, y) {
        Ok(u) if u <= u0 => (x, y, u),
        _ => (x0, y0, u0),
    }
}

/// Golden-section minimum of `f` on [a, b].
fn golden(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Depth of the trap inside `region`: the lowest point of U on the region
/// boundary minus the lowest point of U in the region.
pub fn trap_depth(field: &PotentialField, region: &Rect) -> Result<TrapDepth> {
    check_region(field, region)?;
    let (xs, ys, u) = sample(field, region)?;
    let n = SAMPLES;
    let at = |i: usize, j: usize| u[j * n + i];

    let mut best_in = (f64::INFINITY, 0, 0);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            if at(i, j) < best_in.0 {
                best_in = (at(i, j), i, j);
            }
        }
    }
    let mut best_edge = (f64::INFINITY, 0, 0);
    for k in 0..n {
        for (i, j) in [(k, 0), (k, n - 1), (0, k), (n - 1, k)] {
            if at(i, j) < best_edge.0 {
                best_edge = (at(i, j), i, j);
            }
        }
    }

    let (ix, iy, u_in) = newton_polish(field, region, xs[best_in.1], ys[best_in.2]);

    // refine the boundary minimum along the edge it was found on
    let (bi, bj) = (best_edge.1, best_edge.2);
    let e = |x: f64, y: f64| field.energy(x, y).unwrap_or(f64::INFINITY);
    let (bx, by, u_edge) = if bj == 0 || bj == n - 1 {
        let y = ys[bj];
        let a = xs[bi.saturating_sub(1)];
        let b = xs[(bi + 1).min(n - 1)];
        let (x, v) = golden(a, b, |x| e(x, y));
        if v < best_edge.0 {
            (x, y, v)
        } else {
            (xs[bi], y, best_edge.0)
        }
    } else {
        let x = xs[bi];
        let a = ys[bj.saturating_sub(1)];
        let b = ys[(bj + 1).min(n - 1)];
        let (y, v) = golden(a, b, |y| e(x, y));
        if v < best_edge.0 {
            (x, y, v)
        } else {
            (x, ys[bj], best_edge.0)
        }
    };

    let h = field.constants().h;
    let depth = u_edge - u_in;
    let no_trap = !(depth > 0.0) || !(u_in < u_edge);
    let depth = if no_trap { 0.0 } else { depth };
    Ok(TrapDepth {
        depth,
        depth_ghz: depth / h * 1e-9,
        no_trap,
        interior_min: [ix, iy],
        boundary_min: [bx, by],
    })
}

/// All strict local minima of U on a 401×401 scan of the region interior,
/// refined by Newton iteration and sorted by energy.
pub fn find_local_minima(field: &PotentialField, region: &Rect) -> Result<Vec<LocalMinimum>> {
    check_region(field, region)?;
    let (xs, ys, u) = sample(field, region)?;
    let n = SAMPLES;
    let at = |i: usize, j: usize| u[j * n + i];
    let mut out: Vec<LocalMinimum> = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let c = at(i, j);
            let mut is_min = true;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let v = at((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    // ties broken towards the lower index so plateaus yield one point
                    if v < c || (v == c && (dj < 0 || (dj == 0 && di < 0))) {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                let (x, y, e) = newton_polish(field, region, xs[i], ys[j]);
                let dx = xs[1] - xs[0];
                let dy = ys[1] - ys[0];
                if !out.iter().any(|m| (m.x - x).abs() < dx && (m.y - y).abs() < dy) {
                    out.push(LocalMinimum { x, y, energy: e });
                }
            }
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}
