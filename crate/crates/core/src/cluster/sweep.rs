use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{coupled_spectrum, minimize, normal_modes, Init, MinimizeOptions};
use crate::potential::{CouplingGradientMap, SweepSource};
use crate::resonator::ResonatorParams;
use crate::{Error, PhysicalConstants, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SweepMode {
    /// Each point starts from the previous converged configuration.
    #[default]
    Sequential,
    /// Points are independent; spread across `jobs` threads.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub mode: SweepMode,
    pub jobs: usize,
    pub minimize: MinimizeOptions,
    /// Uniform E field (V/m).
    pub e_x: f64,
    pub e_y: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mode: SweepMode::Sequential,
            jobs: 1,
            minimize: MinimizeOptions::default(),
            e_x: 0.0,
            e_y: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub electrode: String,
    pub voltage: f64,
    /// Δω_r (rad/s)
    pub shift: f64,
    /// Normal-mode angular frequencies (rad/s).
    pub mode_freqs: Vec<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

impl ShiftRow {
    pub fn csv_header() -> &'static str {
        "electrode,voltage_V,delta_omega_r_over_2pi_MHz,mode_freqs_GHz,converged"
    }

    pub fn to_csv_line(&self) -> String {
        let tau = std::f64::consts::TAU;
        let modes: Vec<String> = self.mode_freqs.iter().map(|w| format!("{:.9}", w / tau / 1e9)).collect();
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{:.9},{},{}",
            self.electrode,
            self.voltage,
            self.shift / tau / 1e6,
            modes.join(";"),
            self.converged
        );
        s
    }
}

pub fn rows_to_csv(rows: &[ShiftRow]) -> String {
    let mut s = String::from(ShiftRow::csv_header());
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

struct Ctx<'a> {
    source: &'a SweepSource,
    n: usize,
    res: &'a ResonatorParams,
    gradmap: Option<&'a CouplingGradientMap>,
    opts: &'a SweepOptions,
    consts: &'a PhysicalConstants,
}

impl Ctx<'_> {
    fn point(&self, v: f64, warm: Option<&[[f64; 2]]>) -> (ShiftRow, Option<Vec<[f64; 2]>>) {
        let mut row = ShiftRow {
            electrode: self.source.label().to_string(),
            voltage: v,
            shift: 0.0,
            mode_freqs: Vec::new(),
            converged: true,
            error: None,
        };
        if self.n == 0 {
            return (row, None);
        }
        match self.solve(v, warm) {
            Ok((shift, modes, converged, pos)) => {
                row.shift = shift;
                row.mode_freqs = modes;
                row.converged = converged;
                (row, converged.then_some(pos))
            }
            Err(e) => {
                row.converged = false;
                row.shift = f64::NAN;
                row.error = Some(e.to_string());
                (row, None)
            }
        }
    }

    fn solve(&self, v: f64, warm: Option<&[[f64; 2]]>) -> Result<(f64, Vec<f64>, bool, Vec<[f64; 2]>)> {
        let field = self.source.field_at(v, self.opts.e_x, self.opts.e_y, self.consts)?;
        let init = warm.map_or(Init::Auto, |p| Init::Positions(p.to_vec()));
        let mut mopts = self.opts.minimize;
        if warm.is_some() {
            mopts.max_restarts = 1;
        }
        let mut cfg = minimize(&field, self.n, &init, &mopts)?;
        if warm.is_some() && !cfg.converged {
            cfg = minimize(&field, self.n, &Init::Auto, &self.opts.minimize)?;
        }
        let modes = normal_modes(&field, &cfg)?;
        let owned;
        let gm = match (self.gradmap, field.coupling_maps()) {
            (Some(g), _) => g,
            (None, Some(m)) => {
                owned = m.diff_grad.clone().ok_or_else(|| Error::usage("coupling maps carry no differential gradient map"))?;
                &owned
            }
            (None, None) => return Err(Error::usage("a gradient map is required for an analytic field")),
        };
        let cm = coupled_spectrum(&modes, &cfg, self.res, gm, self.consts)?;
        Ok((cm.shift, modes.frequencies, cfg.converged && !modes.saddle, cfg.positions))
    }
}

/// Resonator shift versus the voltage on one electrode. Failed points are
/// flagged in their row and the sweep continues.
#[allow(clippy::too_many_arguments)]
pub fn shift_vs_voltage_sweep(
    source: &SweepSource,
    voltages: &[f64],
    n: usize,
    res: &ResonatorParams,
    gradmap: Option<&CouplingGradientMap>,
    opts: &SweepOptions,
    consts: &PhysicalConstants,
) -> Vec<ShiftRow> {
    let ctx = Ctx {
        source,
        n,
        res,
        gradmap,
        opts,
        consts,
    };
    match opts.mode {
        SweepMode::Sequential => {
            let mut warm: Option<Vec<[f64; 2]>> = None;
            voltages
                .iter()
                .map(|&v| {
                    let (row, pos) = ctx.point(v, warm.as_deref());
                    warm = pos;
                    row
                })
                .collect()
        }
        SweepMode::Parallel => parallel_map(voltages, opts.jobs, |v| ctx.point(*v, None).0),
    }
}

/// Order-preserving map over `items` using up to `jobs` scoped threads.
pub fn parallel_map<T: Sync + Copy, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                s.spawn(move || c.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}
