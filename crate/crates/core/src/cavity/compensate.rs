//! Removal of parasitic transmission and the frequency-dependent "other"
//! background using an electron-free (far detuned) reference trace.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{s21_bare, CrosstalkParams, SpectrumTrace};
use crate::fitters::{crosstalk_from_bare_fit, fit_bare_resonator, resonator_from_bare_fit, BareInit, FitResult};
use crate::resonator::ResonatorParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompensationOptions {
    /// Half-width of the step-1 fit window in units of κ_tot.
    pub window_kappa: f64,
}

impl Default for CompensationOptions {
    fn default() -> Self {
        CompensationOptions { window_kappa: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Compensation {
    pub compensated: SpectrumTrace,
    pub crosstalk: CrosstalkParams,
    /// Resonator implied by the reference fit (impedance from the initial guess).
    pub resonator: ResonatorParams,
    pub reference_fit: FitResult,
    /// S21_other on the shared frequency axis.
    pub other: Vec<C64>,
}

/// Three steps: fit the far-detuned trace near its peak to the bare
/// resonator with crosstalk; take the remainder of that trace as S21_other;
/// subtract parasitic and other from the target.
pub fn compensate_background(
    far_detuned: &SpectrumTrace,
    target: &SpectrumTrace,
    res_init: &ResonatorParams,
    ct_init: Option<&CrosstalkParams>,
    opts: &CompensationOptions,
) -> Result<Compensation> {
    far_detuned.validate()?;
    target.validate()?;
    if !far_detuned.same_axis(target) {
        return Err(Error::usage("reference and target traces must share a frequency axis"));
    }
    let init = BareInit {
        omega_r: None,
        kappa_tot: None,
        t: ct_init.map(|c| c.t),
        zeta: ct_init.map(|c| c.zeta),
    };
    let fit = fit_bare_resonator(far_detuned, &init, opts.window_kappa)?;
    if !fit.converged {
        return Err(Error::NonConvergence {
            detail: format!(
                "reference fit did not converge: {}",
                serde_json::to_string(&fit).unwrap_or_default()
            ),
        });
    }
    let ct = crosstalk_from_bare_fit(&fit);
    let (wr, kappa, a) = (fit.value("omega_r"), fit.value("kappa_tot"), fit.value("kappa_prod").sqrt());
    let parasitic = ct.s21();
    let other: Vec<C64> = far_detuned
        .probe_freqs
        .iter()
        .zip(&far_detuned.s21)
        .map(|(&w, &s)| s - s21_bare(wr, kappa, a, &ct, w))
        .collect();
    let s21 = target
        .s21
        .iter()
        .zip(&other)
        .map(|(&s, &o)| s - parasitic - o)
        .collect();
    let mut meta = target.metadata.clone();
    if let serde_json::Value::Object(m) = &mut meta {
        m.insert("compensated".into(), serde_json::Value::Bool(true));
    }
    Ok(Compensation {
        compensated: SpectrumTrace {
            probe_freqs: target.probe_freqs.clone(),
            s21,
            metadata: meta,
        },
        crosstalk: ct,
        resonator: resonator_from_bare_fit(&fit, res_init)?,
        reference_fit: fit,
        other,
    })
}
