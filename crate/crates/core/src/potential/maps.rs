//! Electrode coupling maps αᵢ(x, y) and the resonator differential-mode
//! gradient ∂α⁻/∂y, as exported from an electrostatics solver.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use super::grid::{Axes, Grid2, Rect};
use crate::{Error, Result};

/// Tolerance on α around [0, 1] accepted on load (FEM noise); values are
/// clamped into [0, 1] afterwards.
const ALPHA_SLACK: f64 = 0.01;

const UM: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMapSet {
    pub electrode_names: Vec<String>,
    pub grids: Vec<Grid2>,
    pub axes: Axes,
    pub diff_grad: Option<CouplingGradientMap>,
    pub metadata: serde_json::Value,
}

/// ∂α⁻/∂y (1/m) of the resonator differential mode (arms at ±½ V).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGradientMap {
    pub axes: Axes,
    pub grid: Grid2,
}

/// Electrode voltages (V) keyed by electrode name; absent electrodes are 0 V.
pub type VoltageSet = BTreeMap<String, f64>;

#[derive(Serialize, Deserialize)]
struct MapFile {
    version: u32,
    x_axis_um: Vec<f64>,
    y_axis_um: Vec<f64>,
    electrodes: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resonator_diff_grad_per_um: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    metadata: serde_json::Value,
}

fn check_shape(rows: &[Vec<f64>], nx: usize, ny: usize, who: &str) -> Result<Grid2> {
    if rows.len() != ny || rows.iter().any(|r| r.len() != nx) {
        return Err(Error::format(
            Some(who),
            format!(
                "grid shape does not match axes: expected {ny} rows of {nx}, got {} rows",
                rows.len()
            ),
        ));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::format(Some(who), "non-finite value in grid"));
    }
    Grid2::from_rows(rows).map_err(|e| Error::format(Some(who), e.to_string()))
}

impl CouplingMapSet {
    /// Builds a set by sampling `alpha(electrode_index, x, y)` on the axes.
    pub fn from_fn(
        names: &[&str],
        axes: Axes,
        mut alpha: impl FnMut(usize, f64, f64) -> f64,
    ) -> Result<Self> {
        let grids = (0..names.len())
            .map(|k| Grid2::from_fn(axes.x.len(), axes.y.len(), |i, j| alpha(k, axes.x[i], axes.y[j])))
            .collect();
        let set = CouplingMapSet {
            electrode_names: names.iter().map(|s| s.to_string()).collect(),
            grids,
            axes,
            diff_grad: None,
            metadata: serde_json::Value::Null,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn with_diff_grad(mut self, grid: Grid2) -> Result<Self> {
        if grid.nx != self.axes.x.len() || grid.ny != self.axes.y.len() {
            return Err(Error::format(Some("resonator_diff_grad"), "shape does not match axes"));
        }
        self.diff_grad = Some(CouplingGradientMap {
            axes: self.axes.clone(),
            grid,
        });
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (nx, ny) = (self.axes.x.len(), self.axes.y.len());
        if self.electrode_names.len() != self.grids.len() {
            return Err(Error::format(None, "electrode name/grid count mismatch"));
        }
        for (name, g) in self.electrode_names.iter().zip(&self.grids) {
            if g.nx != nx || g.ny != ny {
                return Err(Error::format(Some(name), "grid shape does not match axes"));
            }
            if let Some(bad) = g.data.iter().find(|a| !(**a >= -ALPHA_SLACK && **a <= 1.0 + ALPHA_SLACK)) {
                return Err(Error::format(
                    Some(name),
                    format!("alpha value {bad} outside [0, 1] beyond tolerance {ALPHA_SLACK}"),
                ));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.electrode_names.iter().position(|n| n == name)
    }

    pub fn domain(&self) -> Rect {
        self.axes.bounds()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(s)?;
        if file.version != 1 {
            return Err(Error::format(None, format!("unsupported version {}", file.version)));
        }
        let to_m = |a: &[f64]| a.iter().map(|v| v * UM).collect::<Vec<_>>();
        let axes = Axes::new(to_m(&file.x_axis_um), to_m(&file.y_axis_um))
            .map_err(|_| Error::format(None, "axes must be finite and strictly increasing"))?;
        let (nx, ny) = (axes.x.len(), axes.y.len());
        let mut names = Vec::new();
        let mut grids = Vec::new();
        for (name, rows) in &file.electrodes {
            let mut g = check_shape(rows, nx, ny, name)?;
            if let Some(bad) = g.data.iter().find(|a| !(**a >= -ALPHA_SLACK && **a <= 1.0 + ALPHA_SLACK)) {
                return Err(Error::format(
                    Some(name),
                    format!("alpha value {bad} outside [0, 1] beyond tolerance {ALPHA_SLACK}"),
                ));
            }
            g.data.iter_mut().for_each(|a| *a = a.clamp(0.0, 1.0));
            names.push(name.clone());
            grids.push(g);
        }
        if names.is_empty() {
            return Err(Error::format(None, "no electrodes"));
        }
        let diff_grad = match &file.resonator_diff_grad_per_um {
            Some(rows) => {
                let mut g = check_shape(rows, nx, ny, "resonator_diff_grad_per_um")?;
                g.data.iter_mut().for_each(|v| *v /= UM);
                Some(CouplingGradientMap {
                    axes: axes.clone(),
                    grid: g,
                })
            }
            None => None,
        };
        Ok(CouplingMapSet {
            electrode_names: names,
            grids,
            axes,
            diff_grad,
            metadata: file.metadata,
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = MapFile {
            version: 1,
            x_axis_um: self.axes.x.iter().map(|v| v / UM).collect(),
            y_axis_um: self.axes.y.iter().map(|v| v / UM).collect(),
            electrodes: self
                .electrode_names
                .iter()
                .cloned()
                .zip(self.grids.iter().map(Grid2::to_rows))
                .collect(),
            resonator_diff_grad_per_um: self.diff_grad.as_ref().map(|d| {
                d.grid
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| v * UM).collect())
                    .collect()
            }),
            metadata: self.metadata.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }
}

/// Reads a coupling-map JSON file; axes are converted from μm to m.
pub fn load_coupling_maps(path: impl AsRef<Path>) -> Result<CouplingMapSet> {
    CouplingMapSet::from_json_str(&std::fs::read_to_string(path)?)
}

impl CouplingGradientMap {
    /// A spatially constant gradient covering `domain`.
    pub fn uniform(dalpha_dy: f64, domain: Rect) -> Self {
        CouplingGradientMap {
            axes: Axes {
                x: vec![domain.x_min, domain.x_max],
                y: vec![domain.y_min, domain.y_max],
            },
            grid: Grid2 {
                nx: 2,
                ny: 2,
                data: vec![dalpha_dy; 4],
            },
        }
    }

    pub fn at(&self, x: f64, y: f64) -> Result<f64> {
        self.axes.interpolate(&self.grid, x, y).ok_or_else(|| {
            Error::domain(format!(
                "gradient map undefined at ({:.4e}, {:.4e}) m",
                x, y
            ))
        })
    }

    /// Coupling length ℓ = (∂α⁻/∂y)⁻¹; infinite where the gradient vanishes.
    pub fn coupling_length(&self, x: f64, y: f64) -> Result<f64> {
        Ok(1.0 / self.at(x, y)?)
    }
}
