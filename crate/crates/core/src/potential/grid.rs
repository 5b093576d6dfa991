//! Rectilinear grids with bilinear interpolation.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-major 2D array: `data[j * nx + i]` is the value at `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Grid2 {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Grid2 {
            nx,
            ny,
            data: vec![0.0; nx * ny],
        }
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j));
            }
        }
        Grid2 { nx, ny, data }
    }

    /// Builds from nested rows (outer index = y).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ny = rows.len();
        let nx = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nx) {
            return Err(Error::usage("ragged rows"));
        }
        Ok(Grid2 {
            nx,
            ny,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.nx).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }
}

/// A pair of strictly increasing coordinate axes (m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Cell index and fractional offset for a coordinate on one axis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Locate {
    pub cell: usize,
    pub t: f64,
    pub width: f64,
}

pub(crate) fn strictly_increasing(a: &[f64]) -> bool {
    a.len() >= 2 && a.iter().all(|v| v.is_finite()) && a.windows(2).all(|w| w[1] > w[0])
}

fn locate(axis: &[f64], v: f64) -> Option<Locate> {
    let (lo, hi) = (axis[0], axis[axis.len() - 1]);
    if !(v >= lo && v <= hi) {
        return None;
    }
    // last cell whose left edge is <= v, clamped so the final node maps to t = 1
    let cell = match axis.binary_search_by(|a| a.partial_cmp(&v).unwrap()) {
        Ok(k) => k.min(axis.len() - 2),
        Err(k) => k - 1,
    };
    let width = axis[cell + 1] - axis[cell];
    Some(Locate {
        cell,
        t: (v - axis[cell]) / width,
        width,
    })
}

impl Axes {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if !strictly_increasing(&x) || !strictly_increasing(&y) {
            return Err(Error::usage("axes must be finite, strictly increasing, length >= 2"));
        }
        Ok(Axes { x, y })
    }

    pub fn uniform(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Result<Self> {
        let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
            (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
        };
        Self::new(lin(x0, x1, nx), lin(y0, y1, ny))
    }

    pub fn bounds(&self) -> Rect {
        Rect {
            x_min: self.x[0],
            x_max: *self.x.last().unwrap(),
            y_min: self.y[0],
            y_max: *self.y.last().unwrap(),
        }
    }

    pub(crate) fn locate(&self, x: f64, y: f64) -> Option<(Locate, Locate)> {
        Some((locate(&self.x, x)?, locate(&self.y, y)?))
    }

    /// Bilinear interpolation of `g` at `(x, y)`; `None` outside the axes.
    pub fn interpolate(&self, g: &Grid2, x: f64, y: f64) -> Option<f64> {
        let (lx, ly) = self.locate(x, y)?;
        let (i, j) = (lx.cell, ly.cell);
        let (tx, ty) = (lx.t, ly.t);
        let v00 = g.at(i, j);
        let v10 = g.at(i + 1, j);
        let v01 = g.at(i, j + 1);
        let v11 = g.at(i + 1, j + 1);
        let lower = (1.0 - tx) * v00 + tx * v10;
        let upper = (1.0 - tx) * v01 + tx * v11;
        Some((1.0 - ty) * lower + ty * upper)
    }
}

/// Axis-aligned rectangle (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn centered(cx: f64, cy: f64, half_x: f64, half_y: f64) -> Self {
        Rect {
            x_min: cx - half_x,
            x_max: cx + half_x,
            y_min: cy - half_y,
            y_max: cy + half_y,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.x_min, other.y_min) && self.contains(other.x_max, other.y_max)
    }

    pub fn is_valid(&self) -> bool {
        self.x_max > self.x_min && self.y_max > self.y_min
    }
}
