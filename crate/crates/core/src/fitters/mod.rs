//! Nonlinear least squares and the fit recipes for bare-resonator,
//! vacuum-Rabi and two-tone data.
//!
//! Fitted rates and frequencies are angular (rad/s).

mod lm;
mod peaks;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cavity::{s21_bare, s21_resonant, s21_with_crosstalk, two_tone_dip, CrosstalkParams, SpectrumTrace, TwoLevelElectron};
use crate::resonator::ResonatorParams;
use crate::{Error, Result};

pub use lm::{least_squares, FitResult, LmOptions, ParamEstimate, ParamSpec, Transform};
pub use peaks::{boxcar, find_peaks, Peak};

/// Starting point for a bare-resonator fit; `None` fields use the recipe.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BareInit {
    pub omega_r: Option<f64>,
    pub kappa_tot: Option<f64>,
    pub t: Option<f64>,
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RabiInit {
    pub g: Option<f64>,
    pub gamma_2: Option<f64>,
    pub omega_e: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DipInit {
    pub omega_e: Option<f64>,
    pub gamma: Option<f64>,
    pub depth: Option<f64>,
    pub offset: Option<f64>,
}

fn push_complex(r: &mut [f64], k: usize, d: C64) {
    r[2 * k] = d.re;
    r[2 * k + 1] = d.im;
}

/// Full width at half maximum of `y` around index `ip`, by linear
/// interpolation of the half-level crossings.
fn fwhm(x: &[f64], y: &[f64], ip: usize) -> f64 {
    let half = y[ip] / 2.0;
    let cross = |range: &mut dyn Iterator<Item = usize>, dir: isize| -> Option<f64> {
        for k in range {
            let j = (k as isize + dir) as usize;
            if y[j] <= half {
                let t = (y[k] - half) / (y[k] - y[j]);
                return Some(x[k] + t * (x[j] - x[k]));
            }
        }
        None
    };
    let left = cross(&mut (1..=ip).rev(), -1);
    let right = cross(&mut (ip..y.len() - 1), 1);
    match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (x[ip] - l),
        (None, Some(r)) => 2.0 * (r - x[ip]),
        (None, None) => x[x.len() - 1] - x[0],
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

/// Recipe guesses: ω_r at max |S21|, κ from the FWHM of |S21|².
pub fn bare_initial_guess(trace: &SpectrumTrace) -> Result<(f64, f64)> {
    trace.validate()?;
    let p2: Vec<f64> = trace.s21.iter().map(|s| s.norm_sqr()).collect();
    let ip = argmax(&p2);
    if ip == 0 || ip + 1 == p2.len() {
        return Err(Error::domain("transmission maximum lies at the edge of the trace"));
    }
    let kappa = fwhm(&trace.probe_freqs, &p2, ip);
    let step = trace.probe_freqs[ip + 1] - trace.probe_freqs[ip - 1];
    Ok((trace.probe_freqs[ip], kappa.max(step / 2.0)))
}

/// Indices of samples within ±`half_width` of `center`.
fn window(trace: &SpectrumTrace, center: f64, half_width: f64) -> Vec<usize> {
    (0..trace.len())
        .filter(|&k| (trace.probe_freqs[k] - center).abs() <= half_width)
        .collect()
}

/// Fits s21_with_crosstalk with g = 0 to the samples within
/// ±`window_kappa`·κ of the transmission peak.
///
/// Reported parameters: `omega_r`, `kappa_tot`, `kappa_prod` (κ₁κ₂), `T`,
/// `zeta`.
pub fn fit_bare_resonator(trace: &SpectrumTrace, init: &BareInit, window_kappa: f64) -> Result<FitResult> {
    let (w_peak, k_guess) = bare_initial_guess(trace)?;
    let w0 = init.omega_r.unwrap_or(w_peak);
    let k0 = init.kappa_tot.unwrap_or(k_guess);
    let idx = window(trace, w_peak, window_kappa * k0);
    if idx.len() < 6 {
        return Err(Error::domain(format!(
            "only {} samples inside the ±{window_kappa}κ peak window",
            idx.len()
        )));
    }
    let xs: Vec<f64> = idx.iter().map(|&k| trace.probe_freqs[k]).collect();
    let ys: Vec<C64> = idx.iter().map(|&k| trace.s21[k]).collect();
    let peak = ys.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let a0 = peak * k0 / 2.0;

    let cost_at = |t: f64, zeta: f64| -> f64 {
        let ct = CrosstalkParams { t, zeta, theta: 0.0 };
        xs.iter()
            .zip(&ys)
            .map(|(&w, &y)| (s21_bare(w0, k0, a0, &ct, w) - y).norm_sqr())
            .sum()
    };
    let (t0, z0) = match (init.t, init.zeta) {
        (Some(t), Some(z)) => (t, z),
        _ => {
            let mut best = (f64::INFINITY, 1e-3, 0.0);
            for &t in &[1e-4, 1e-3, 4e-3, 1e-2, 3e-2, 0.1] {
                for k in 0..16 {
                    let z = -std::f64::consts::PI + k as f64 * std::f64::consts::PI / 8.0;
                    let c = cost_at(init.t.unwrap_or(t), init.zeta.unwrap_or(z));
                    if c < best.0 {
                        best = (c, init.t.unwrap_or(t), init.zeta.unwrap_or(z));
                    }
                }
            }
            (best.1, best.2)
        }
    };
    // keep sin²(u) off its stationary point at T = 0
    let t0 = t0.max(1e-6);

    let specs = [
        ParamSpec::new("omega_r", w0, Transform::Linear { offset: w0, scale: k0 }),
        ParamSpec::new("kappa_tot", k0, Transform::Log),
        ParamSpec::new("sqrt_kappa_prod", a0, Transform::Log),
        ParamSpec::new("T", t0, Transform::UnitInterval),
        ParamSpec::new("zeta", z0, Transform::identity()),
    ];
    let mut fit = least_squares(
        &specs,
        2 * xs.len(),
        |p, r| {
            let ct = CrosstalkParams {
                t: p[3],
                zeta: p[4],
                theta: 0.0,
            };
            for (k, (&w, &y)) in xs.iter().zip(&ys).enumerate() {
                push_complex(r, k, s21_bare(p[0], p[1], p[2], &ct, w) - y);
            }
        },
        &LmOptions::default(),
    )?;
    let a = fit.params.remove("sqrt_kappa_prod").unwrap();
    fit.params.insert(
        "kappa_prod".into(),
        ParamEstimate {
            value: a.value * a.value,
            sigma: 2.0 * a.value * a.sigma,
        },
    );
    let zeta = fit.params.get_mut("zeta").unwrap();
    zeta.value = (zeta.value + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;

    let rms = (fit.rss / (2 * xs.len()) as f64).sqrt();
    let height = 2.0 * a.value / fit.value("kappa_tot");
    if !(height > 5.0 * rms) {
        fit.flag("no-signal");
        fit.converged = false;
    }
    if !(xs[0]..=xs[xs.len() - 1]).contains(&fit.value("omega_r")) {
        fit.flag("center-outside-window");
        fit.converged = false;
    }
    Ok(fit)
}

/// Resonator parameters implied by a bare fit, keeping the element
/// impedance of `template`. κ₁ = κ₂ = √(κ₁κ₂) with the remainder of κ_tot
/// as internal loss.
pub fn resonator_from_bare_fit(fit: &FitResult, template: &ResonatorParams) -> Result<ResonatorParams> {
    let w = fit.value("omega_r");
    let kappa = fit.value("kappa_tot");
    let a = fit.value("kappa_prod").sqrt();
    let z = (template.l_r / template.c_r).sqrt();
    let mut res = ResonatorParams::from_frequency_impedance(crate::units::Frequency(w), z)?;
    res.l_tail = template.l_tail;
    res.c_dot = template.c_dot;
    if 2.0 * a <= kappa {
        res.kappa_1 = a;
        res.kappa_2 = a;
        res.kappa_int = kappa - 2.0 * a;
    } else {
        res = res.with_symmetric_kappa(kappa);
    }
    Ok(res)
}

pub fn crosstalk_from_bare_fit(fit: &FitResult) -> CrosstalkParams {
    CrosstalkParams {
        t: fit.value("T"),
        zeta: fit.value("zeta"),
        theta: 0.0,
    }
}

/// Recipe guesses for a Rabi fit: g from half the separation of the two
/// strongest peaks, ω_e from their midpoint, Γ₂ = 2κ.
pub fn rabi_initial_guess(trace: &SpectrumTrace, res: &ResonatorParams) -> Result<(f64, f64, f64)> {
    let mags = trace.magnitudes();
    let top = mags.iter().cloned().fold(0.0, f64::max);
    let mut peaks = find_peaks(&trace.probe_freqs, &mags, 0.05 * top, 0);
    if peaks.len() < 2 {
        return Err(Error::domain(format!(
            "found {} transmission peak(s); a Rabi doublet needs two or an explicit initial guess",
            peaks.len()
        )));
    }
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    let (lo, hi) = if peaks[0].freq < peaks[1].freq {
        (peaks[0].freq, peaks[1].freq)
    } else {
        (peaks[1].freq, peaks[0].freq)
    };
    let wr = res.omega_r().value();
    let sep = hi - lo;
    // ω± = (ω_r + ω_e)/2 ± √(g² + Δ²/4)
    let we = lo + hi - wr;
    let d = we - wr;
    let g = (sep * sep / 4.0 - d * d / 4.0).max(sep * sep / 16.0).sqrt();
    Ok((g, 2.0 * res.kappa_tot(), we))
}

fn rabi_specs(trace: &SpectrumTrace, res: &ResonatorParams, init: &RabiInit) -> Result<[ParamSpec; 3]> {
    let (g0, gam0, we0) = match (init.g, init.gamma_2, init.omega_e) {
        (Some(g), Some(gm), Some(we)) => (g, gm, we),
        _ => {
            let (g, gm, we) = rabi_initial_guess(trace, res)?;
            (init.g.unwrap_or(g), init.gamma_2.unwrap_or(gm), init.omega_e.unwrap_or(we))
        }
    };
    let scale = g0.abs().max(res.kappa_tot());
    Ok([
        ParamSpec::new("g", g0, Transform::Linear { offset: 0.0, scale }),
        ParamSpec::new("Gamma_2", gam0, Transform::Log),
        ParamSpec::new("omega_e", we0, Transform::Linear { offset: we0, scale }),
    ])
}

/// Fits s21_resonant with fixed resonator parameters; free (g, Γ₂, ω_e).
pub fn fit_rabi(trace: &SpectrumTrace, res: &ResonatorParams, init: &RabiInit) -> Result<FitResult> {
    res.validate()?;
    let specs = rabi_specs(trace, res, init)?;
    let mut fit = least_squares(
        &specs,
        2 * trace.len(),
        |p, r| {
            let el = TwoLevelElectron::new(p[2], p[1]);
            for (k, (&w, &y)) in trace.probe_freqs.iter().zip(&trace.s21).enumerate() {
                let m = s21_resonant(res, &el, p[0], w).unwrap_or(C64::new(f64::NAN, 0.0));
                push_complex(r, k, m - y);
            }
        },
        &LmOptions::default(),
    )?;
    let g = fit.params.get_mut("g").unwrap();
    g.value = g.value.abs();
    Ok(fit)
}

/// Rabi fit of an uncompensated trace through the full crosstalk model;
/// free (g, Γ₂, ω_e, T, ζ).
pub fn fit_rabi_with_crosstalk(
    trace: &SpectrumTrace,
    res: &ResonatorParams,
    init: &RabiInit,
    ct_init: &CrosstalkParams,
) -> Result<FitResult> {
    res.validate()?;
    let [a, b, c] = rabi_specs(trace, res, init)?;
    let specs = [
        a,
        b,
        c,
        ParamSpec::new("T", ct_init.t.max(1e-6), Transform::UnitInterval),
        ParamSpec::new("zeta", ct_init.zeta, Transform::identity()),
    ];
    let mut fit = least_squares(
        &specs,
        2 * trace.len(),
        |p, r| {
            let el = TwoLevelElectron::new(p[2], p[1]);
            let ct = CrosstalkParams {
                t: p[3],
                zeta: p[4],
                theta: 0.0,
            };
            for (k, (&w, &y)) in trace.probe_freqs.iter().zip(&trace.s21).enumerate() {
                let m = s21_with_crosstalk(res, &el, p[0], &ct, w).unwrap_or(C64::new(f64::NAN, 0.0));
                push_complex(r, k, m - y);
            }
        },
        &LmOptions::default(),
    )?;
    let g = fit.params.get_mut("g").unwrap();
    g.value = g.value.abs();
    Ok(fit)
}

/// Fits the two-tone Lorentzian dip; parameters `omega_e`, `gamma`
/// (HWHM), `depth`, `offset`.
pub fn fit_lorentzian_dip(drive_freqs: &[f64], values: &[f64], init: &DipInit) -> Result<FitResult> {
    let n = drive_freqs.len();
    if n != values.len() || n < 5 {
        return Err(Error::usage("dip data needs ≥ 5 points and matching lengths"));
    }
    if values.iter().chain(drive_freqs).any(|v| !v.is_finite()) {
        return Err(Error::usage("non-finite dip data"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let offset0 = init.offset.unwrap_or(sorted[(3 * n) / 4]);
    let neg: Vec<f64> = values.iter().map(|v| offset0 - v).collect();
    let imin = argmax(&neg);
    let depth0 = init.depth.unwrap_or(neg[imin]);
    let span = drive_freqs[n - 1] - drive_freqs[0];
    let gamma0 = init.gamma.unwrap_or_else(|| {
        if neg[imin] > 0.0 {
            0.5 * fwhm(drive_freqs, &neg, imin)
        } else {
            span / 10.0
        }
    });
    let gamma0 = gamma0.max(span / (4.0 * n as f64));
    let w0 = init.omega_e.unwrap_or(drive_freqs[imin]);
    let dscale = depth0.abs().max(1e-3 * offset0.abs()).max(f64::MIN_POSITIVE);
    let specs = [
        ParamSpec::new("omega_e", w0, Transform::Linear { offset: w0, scale: gamma0 }),
        ParamSpec::new("gamma", gamma0, Transform::Log),
        ParamSpec::new("depth", depth0, Transform::Linear { offset: 0.0, scale: dscale }),
        ParamSpec::new("offset", offset0, Transform::Linear { offset: offset0, scale: dscale }),
    ];
    let mut fit = least_squares(
        &specs,
        n,
        |p, r| {
            for k in 0..n {
                r[k] = two_tone_dip(p[0], p[1], p[2], p[3], drive_freqs[k]) - values[k];
            }
        },
        &LmOptions::default(),
    )?;
    let (we, g) = (fit.value("omega_e"), fit.value("gamma"));
    let (lo, hi) = (drive_freqs[0], drive_freqs[n - 1]);
    if we < lo || we > hi {
        fit.flag("center-outside-window");
        fit.converged = false;
    } else if we - lo < g || hi - we < g {
        fit.flag("center-near-edge");
    }
    Ok(fit)
}
