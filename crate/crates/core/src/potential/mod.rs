//! Electrostatic trapping potential: coupling-map superposition or an
//! analytic quartic surrogate, both with uniform compensating fields.
//!
//! Sign convention: φ is the electrostatic potential (V) including the
//! compensating fields, φ_total = Σᵢ αᵢVᵢ + E_x·x + E_y·y, and the electron
//! energy is U = −e·φ_total. A positive E_y therefore pushes the electron
//! towards +y.

pub mod grid;
pub mod maps;
pub mod trap;

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::constants::PhysicalConstants;
use crate::{Error, Result};

pub use grid::{Axes, Grid2, Rect};
pub use maps::{load_coupling_maps, CouplingGradientMap, CouplingMapSet, VoltageSet};
pub use trap::{find_local_minima, trap_depth, LocalMinimum, TrapDepth};

/// Coefficients of U(x, y) = a1x x² + a2x x⁴ + a1y y² + a2y y⁴ + a1xy x y
/// (J/m², J/m⁴).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyticCoefficients {
    pub a1x: f64,
    pub a1y: f64,
    pub a2x: f64,
    pub a2y: f64,
    pub a1xy: f64,
}

impl AnalyticCoefficients {
    /// Isotropic harmonic bowl with a1 = m_e ω²/2 on both axes.
    pub fn harmonic(omega_x: f64, omega_y: f64, m_e: f64) -> Self {
        AnalyticCoefficients {
            a1x: 0.5 * m_e * omega_x * omega_x,
            a1y: 0.5 * m_e * omega_y * omega_y,
            ..Default::default()
        }
    }

    /// `self + t·other`, coefficient-wise.
    pub fn add_scaled(&self, other: &Self, t: f64) -> Self {
        AnalyticCoefficients {
            a1x: self.a1x + t * other.a1x,
            a1y: self.a1y + t * other.a1y,
            a2x: self.a2x + t * other.a2x,
            a2y: self.a2y + t * other.a2y,
            a1xy: self.a1xy + t * other.a1xy,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Gridded {
        maps: Arc<CouplingMapSet>,
        voltages: VoltageSet,
        /// Σᵢ αᵢVᵢ at the grid nodes (V).
        phi: Grid2,
    },
    Analytic(AnalyticCoefficients),
}

/// An evaluable 2D potential. Immutable once built.
#[derive(Debug, Clone)]
pub struct PotentialField {
    kind: Kind,
    pub e_x: f64,
    pub e_y: f64,
    consts: PhysicalConstants,
}

/// Superposes coupling maps with electrode voltages.
pub fn compose(
    maps: Arc<CouplingMapSet>,
    voltages: &VoltageSet,
    e_x: f64,
    e_y: f64,
    consts: &PhysicalConstants,
) -> Result<PotentialField> {
    let mut phi = Grid2::zeros(maps.axes.x.len(), maps.axes.y.len());
    for (name, &v) in voltages {
        let k = maps
            .index_of(name)
            .ok_or_else(|| Error::usage(format!("unknown electrode '{name}'")))?;
        if !v.is_finite() {
            return Err(Error::usage(format!("non-finite voltage on '{name}'")));
        }
        for (p, a) in phi.data.iter_mut().zip(&maps.grids[k].data) {
            *p += a * v;
        }
    }
    Ok(PotentialField {
        kind: Kind::Gridded {
            maps,
            voltages: voltages.clone(),
            phi,
        },
        e_x,
        e_y,
        consts: *consts,
    })
}

/// Analytic quartic surrogate, defined on the whole plane.
pub fn make_analytic(
    coeffs: AnalyticCoefficients,
    e_x: f64,
    e_y: f64,
    consts: &PhysicalConstants,
) -> PotentialField {
    PotentialField {
        kind: Kind::Analytic(coeffs),
        e_x,
        e_y,
        consts: *consts,
    }
}

impl PotentialField {
    pub fn constants(&self) -> &PhysicalConstants {
        &self.consts
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.kind, Kind::Analytic(_))
    }

    pub fn analytic_coefficients(&self) -> Option<&AnalyticCoefficients> {
        match &self.kind {
            Kind::Analytic(c) => Some(c),
            Kind::Gridded { .. } => None,
        }
    }

    pub fn voltages(&self) -> Option<&VoltageSet> {
        match &self.kind {
            Kind::Gridded { voltages, .. } => Some(voltages),
            Kind::Analytic(_) => None,
        }
    }

    pub fn coupling_maps(&self) -> Option<&Arc<CouplingMapSet>> {
        match &self.kind {
            Kind::Gridded { maps, .. } => Some(maps),
            Kind::Analytic(_) => None,
        }
    }

    /// Domain of definition; `None` means unbounded.
    pub fn domain(&self) -> Option<Rect> {
        match &self.kind {
            Kind::Gridded { maps, .. } => Some(maps.domain()),
            Kind::Analytic(_) => None,
        }
    }

    /// Region where derivatives are available (one grid cell inside the domain).
    pub fn derivative_domain(&self) -> Option<Rect> {
        match &self.kind {
            Kind::Gridded { maps, .. } => {
                let (x, y) = (&maps.axes.x, &maps.axes.y);
                Some(Rect {
                    x_min: x[1],
                    x_max: x[x.len() - 2],
                    y_min: y[1],
                    y_max: y[y.len() - 2],
                })
            }
            Kind::Analytic(_) => None,
        }
    }

    fn out_of_domain(x: f64, y: f64) -> Error {
        Error::domain(format!("point ({x:.6e}, {y:.6e}) m outside the potential domain"))
    }

    fn field_term(&self, x: f64, y: f64) -> f64 {
        self.e_x * x + self.e_y * y
    }

    /// φ_total(x, y) in volts.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Self::out_of_domain(x, y));
        }
        match &self.kind {
            Kind::Gridded { maps, phi, .. } => maps
                .axes
                .interpolate(phi, x, y)
                .map(|p| p + self.field_term(x, y))
                .ok_or_else(|| Self::out_of_domain(x, y)),
            Kind::Analytic(c) => {
                let u = c.a1x * x * x + c.a2x * x.powi(4) + c.a1y * y * y + c.a2y * y.powi(4) + c.a1xy * x * y;
                Ok(-u / self.consts.e + self.field_term(x, y))
            }
        }
    }

    /// ∇φ_total (V/m).
    pub fn gradient(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        match &self.kind {
            Kind::Gridded { maps, phi, .. } => {
                let (hx, hy) = self.fd_steps(maps, x, y)?;
                let f = |x, y| maps.axes.interpolate(phi, x, y).unwrap();
                Ok([
                    (f(x + hx, y) - f(x - hx, y)) / (2.0 * hx) + self.e_x,
                    (f(x, y + hy) - f(x, y - hy)) / (2.0 * hy) + self.e_y,
                ])
            }
            Kind::Analytic(c) => {
                let e = self.consts.e;
                let dux = 2.0 * c.a1x * x + 4.0 * c.a2x * x.powi(3) + c.a1xy * y;
                let duy = 2.0 * c.a1y * y + 4.0 * c.a2y * y.powi(3) + c.a1xy * x;
                Ok([-dux / e + self.e_x, -duy / e + self.e_y])
            }
        }
    }

    /// Hessian of φ_total (V/m²), symmetric.
    pub fn hessian(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        match &self.kind {
            Kind::Gridded { maps, phi, .. } => {
                let (hx, hy) = self.fd_steps(maps, x, y)?;
                let f = |x, y| maps.axes.interpolate(phi, x, y).unwrap();
                let f0 = f(x, y);
                let fxx = (f(x + hx, y) - 2.0 * f0 + f(x - hx, y)) / (hx * hx);
                let fyy = (f(x, y + hy) - 2.0 * f0 + f(x, y - hy)) / (hy * hy);
                let fxy = (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy)
                    + f(x - hx, y - hy))
                    / (4.0 * hx * hy);
                Ok([[fxx, fxy], [fxy, fyy]])
            }
            Kind::Analytic(c) => {
                let e = self.consts.e;
                let uxx = 2.0 * c.a1x + 12.0 * c.a2x * x * x;
                let uyy = 2.0 * c.a1y + 12.0 * c.a2y * y * y;
                Ok([[-uxx / e, -c.a1xy / e], [-c.a1xy / e, -uyy / e]])
            }
        }
    }

    /// Finite-difference steps: the width of the grid cell containing the
    /// point, required to stay inside the domain on both sides.
    fn fd_steps(&self, maps: &CouplingMapSet, x: f64, y: f64) -> Result<(f64, f64)> {
        let (lx, ly) = maps.axes.locate(x, y).ok_or_else(|| Self::out_of_domain(x, y))?;
        let (hx, hy) = (lx.width, ly.width);
        let d = maps.domain();
        let tol = 1e-9;
        if x - hx < d.x_min - tol * hx
            || x + hx > d.x_max + tol * hx
            || y - hy < d.y_min - tol * hy
            || y + hy > d.y_max + tol * hy
        {
            return Err(Error::domain(format!(
                "point ({x:.6e}, {y:.6e}) m within one grid cell of the domain edge"
            )));
        }
        Ok((hx, hy))
    }

    /// Electron potential energy U = −eφ_total (J).
    pub fn energy(&self, x: f64, y: f64) -> Result<f64> {
        Ok(-self.consts.e * self.evaluate(x, y)?)
    }

    /// ∇U (J/m).
    pub fn energy_gradient(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        let g = self.gradient(x, y)?;
        let e = self.consts.e;
        Ok([-e * g[0], -e * g[1]])
    }

    /// Hessian of U (J/m²).
    pub fn energy_hessian(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        let h = self.hessian(x, y)?;
        let e = self.consts.e;
        Ok([[-e * h[0][0], -e * h[0][1]], [-e * h[1][0], -e * h[1][1]]])
    }
}

/// A one-parameter family of fields used by voltage sweeps.
#[derive(Debug, Clone)]
pub enum SweepSource {
    /// Coupling maps with one electrode swept on top of fixed base voltages.
    Gridded {
        maps: Arc<CouplingMapSet>,
        base: VoltageSet,
        electrode: String,
    },
    /// Surrogate whose coefficients are affine in the sweep voltage:
    /// c(V) = base + V·per_volt.
    Analytic {
        base: AnalyticCoefficients,
        per_volt: AnalyticCoefficients,
        label: String,
    },
}

impl SweepSource {
    pub fn label(&self) -> &str {
        match self {
            SweepSource::Gridded { electrode, .. } => electrode,
            SweepSource::Analytic { label, .. } => label,
        }
    }

    pub fn field_at(
        &self,
        v: f64,
        e_x: f64,
        e_y: f64,
        consts: &PhysicalConstants,
    ) -> Result<PotentialField> {
        match self {
            SweepSource::Gridded {
                maps,
                base,
                electrode,
            } => {
                let mut volts = base.clone();
                volts.insert(electrode.clone(), v);
                compose(maps.clone(), &volts, e_x, e_y, consts)
            }
            SweepSource::Analytic { base, per_volt, .. } => {
                Ok(make_analytic(base.add_scaled(per_volt, v), e_x, e_y, consts))
            }
        }
    }
}
