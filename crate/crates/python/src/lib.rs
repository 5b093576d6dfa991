//! Python bindings. All rates and frequencies are angular (rad/s), lengths in m.

use std::collections::BTreeMap;

use helidot_core::analytic::{self, CubicTrap1D};
use helidot_core::cavity::{self, CompensationOptions, CrosstalkParams, SpectrumTrace, TwoLevelElectron};
use helidot_core::cluster::{self, Init, MinimizeOptions};
use helidot_core::fitters::{self, BareInit, DipInit, RabiInit};
use helidot_core::potential::{make_analytic, AnalyticCoefficients, CouplingGradientMap, Rect};
use helidot_core::qsolver::{self, KrylovOptions};
use helidot_core::synth::{self, DipSpec, OtherBackground, SpectrumSpec};
use helidot_core::{Error, Frequency, ResonatorParams, CODATA};
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::NonConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Resonator", module = "helidot")]
#[derive(Clone)]
struct PyResonator {
    inner: ResonatorParams,
}

#[pymethods]
impl PyResonator {
    /// Lumped-element resonator; defaults to the TiN nanowire device.
    #[new]
    #[pyo3(signature = (l_r=None, c_r=None, kappa_1=None, kappa_2=None, kappa_int=None))]
    fn new(
        l_r: Option<f64>,
        c_r: Option<f64>,
        kappa_1: Option<f64>,
        kappa_2: Option<f64>,
        kappa_int: Option<f64>,
    ) -> PyResult<Self> {
        let mut r = ResonatorParams::default();
        r.l_r = l_r.unwrap_or(r.l_r);
        r.c_r = c_r.unwrap_or(r.c_r);
        r.kappa_1 = kappa_1.unwrap_or(r.kappa_1);
        r.kappa_2 = kappa_2.unwrap_or(r.kappa_2);
        r.kappa_int = kappa_int.unwrap_or(r.kappa_int);
        r.validate().map_err(py_err)?;
        Ok(PyResonator { inner: r })
    }

    #[staticmethod]
    #[pyo3(signature = (omega_r, impedance, kappa_tot=None))]
    fn from_frequency_impedance(omega_r: f64, impedance: f64, kappa_tot: Option<f64>) -> PyResult<Self> {
        let mut r = ResonatorParams::from_frequency_impedance(Frequency(omega_r), impedance).map_err(py_err)?;
        if let Some(k) = kappa_tot {
            r = r.with_symmetric_kappa(k);
        }
        Ok(PyResonator { inner: r })
    }

    #[getter]
    fn omega_r(&self) -> f64 {
        self.inner.omega_r().value()
    }

    #[getter]
    fn kappa_tot(&self) -> f64 {
        self.inner.kappa_tot()
    }

    #[getter]
    fn impedance(&self) -> PyResult<f64> {
        Ok(self.inner.derived(&CODATA).map_err(py_err)?.impedance)
    }

    #[getter]
    fn v_zpf(&self) -> PyResult<f64> {
        Ok(self.inner.derived(&CODATA).map_err(py_err)?.v_zpf)
    }

    fn __repr__(&self) -> String {
        format!(
            "Resonator(f_r={:.6} GHz, kappa_tot/2pi={:.3} MHz)",
            self.inner.omega_r().hz() / 1e9,
            self.inner.kappa_tot() / std::f64::consts::TAU / 1e6
        )
    }
}

#[pyclass(name = "Trace", module = "helidot")]
#[derive(Clone)]
struct PyTrace {
    inner: SpectrumTrace,
}

#[pymethods]
impl PyTrace {
    #[new]
    fn new(probe_freqs: Vec<f64>, s21: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyTrace { inner: SpectrumTrace::new(probe_freqs, s21).map_err(py_err)? })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(PyTrace { inner: SpectrumTrace::read(path).map_err(py_err)? })
    }

    fn write(&self, path: &str) -> PyResult<()> {
        self.inner.write(path).map_err(py_err)
    }

    #[getter]
    fn probe_freqs(&self) -> Vec<f64> {
        self.inner.probe_freqs.clone()
    }

    #[getter]
    fn s21(&self) -> Vec<Complex64> {
        self.inner.s21.clone()
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.inner.magnitudes()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "FitResult", module = "helidot", get_all)]
#[derive(Clone)]
struct PyFitResult {
    /// name -> (value, sigma)
    params: BTreeMap<String, (f64, f64)>,
    rss: f64,
    iterations: usize,
    converged: bool,
    flags: Vec<String>,
}

impl From<fitters::FitResult> for PyFitResult {
    fn from(f: fitters::FitResult) -> Self {
        PyFitResult {
            params: f.params.iter().map(|(k, p)| (k.clone(), (p.value, p.sigma))).collect(),
            rss: f.rss,
            iterations: f.iterations,
            converged: f.converged,
            flags: f.flags,
        }
    }
}

#[pymethods]
impl PyFitResult {
    fn value(&self, name: &str) -> PyResult<f64> {
        self.params.get(name).map(|p| p.0).ok_or_else(|| PyValueError::new_err(format!("no parameter '{name}'")))
    }

    fn sigma(&self, name: &str) -> PyResult<f64> {
        self.params.get(name).map(|p| p.1).ok_or_else(|| PyValueError::new_err(format!("no parameter '{name}'")))
    }

    fn __repr__(&self) -> String {
        let ps: Vec<String> = self.params.iter().map(|(k, (v, s))| format!("{k}={v:.6e}±{s:.1e}")).collect();
        format!("FitResult({}, converged={})", ps.join(", "), self.converged)
    }
}

#[pyfunction]
#[pyo3(signature = (resonator, omega_e, gamma_2, g, half_span, points, snr=None, crosstalk_t=0.0, crosstalk_zeta=0.0, center=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn synth_spectrum(
    resonator: &PyResonator,
    omega_e: f64,
    gamma_2: f64,
    g: f64,
    half_span: f64,
    points: usize,
    snr: Option<f64>,
    crosstalk_t: f64,
    crosstalk_zeta: f64,
    center: Option<f64>,
    seed: u64,
) -> PyResult<PyTrace> {
    let spec = SpectrumSpec {
        resonator: resonator.inner,
        electron: TwoLevelElectron::new(omega_e, gamma_2),
        g,
        crosstalk: CrosstalkParams { t: crosstalk_t, zeta: crosstalk_zeta, theta: 0.0 },
        other: OtherBackground::default(),
        center: center.unwrap_or(resonator.inner.omega_r().value()),
        half_span,
        points,
        snr,
    };
    Ok(PyTrace { inner: synth::synth_spectrum(&spec, seed).map_err(py_err)? })
}

#[pyfunction]
#[pyo3(signature = (omega_e, gamma, half_span, points, depth=1.0, offset=0.0, noise_frac=0.01, seed=0))]
#[allow(clippy::too_many_arguments)]
fn synth_dip(
    omega_e: f64,
    gamma: f64,
    half_span: f64,
    points: usize,
    depth: f64,
    offset: f64,
    noise_frac: f64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let spec = DipSpec { omega_e, gamma, depth, offset, center: omega_e, half_span, points, noise_frac };
    synth::synth_dip(&spec, seed).map_err(py_err)
}

/// Returns (compensated trace, resonator from the reference fit, crosstalk T, crosstalk ζ).
#[pyfunction]
fn compensate(far_detuned: &PyTrace, target: &PyTrace, resonator: &PyResonator) -> PyResult<(PyTrace, PyResonator, f64, f64)> {
    let c = cavity::compensate_background(
        &far_detuned.inner,
        &target.inner,
        &resonator.inner,
        None,
        &CompensationOptions::default(),
    )
    .map_err(py_err)?;
    Ok((
        PyTrace { inner: c.compensated },
        PyResonator { inner: c.resonator },
        c.crosstalk.t,
        c.crosstalk.zeta,
    ))
}

#[pyfunction]
#[pyo3(signature = (trace, window_kappa=2.0))]
fn fit_bare(trace: &PyTrace, window_kappa: f64) -> PyResult<PyFitResult> {
    Ok(fitters::fit_bare_resonator(&trace.inner, &BareInit::default(), window_kappa).map_err(py_err)?.into())
}

#[pyfunction]
fn fit_rabi(trace: &PyTrace, resonator: &PyResonator) -> PyResult<PyFitResult> {
    Ok(fitters::fit_rabi(&trace.inner, &resonator.inner, &RabiInit::default()).map_err(py_err)?.into())
}

#[pyfunction]
fn fit_dip(drive_freqs: Vec<f64>, values: Vec<f64>) -> PyResult<PyFitResult> {
    Ok(fitters::fit_lorentzian_dip(&drive_freqs, &values, &DipInit::default()).map_err(py_err)?.into())
}

#[pyfunction]
fn s21(resonator: &PyResonator, omega_e: f64, gamma_2: f64, g: f64, omega_p: f64) -> PyResult<Complex64> {
    cavity::s21_resonant(&resonator.inner, &TwoLevelElectron::new(omega_e, gamma_2), g, omega_p).map_err(py_err)
}

/// Returns (g, l_y, v_zpf).
#[pyfunction]
fn coupling_g(resonator: &PyResonator, ell: f64, omega_e: f64) -> PyResult<(f64, f64, f64)> {
    let c = analytic::coupling_g(&resonator.inner, ell, Frequency(omega_e), &CODATA).map_err(py_err)?;
    Ok((c.g, c.l_y, c.v_zpf))
}

#[pyfunction]
fn cooperativity(g: f64, kappa: f64, gamma_2: f64) -> PyResult<f64> {
    analytic::cooperativity(g, kappa, gamma_2).map_err(py_err)
}

/// Purcell T1 (s) through the resonator.
#[pyfunction]
fn purcell_t1(g: f64, kappa: f64, delta: f64) -> PyResult<f64> {
    Ok(analytic::purcell_resonator(g, kappa, delta).map_err(py_err)?.t1)
}

/// Returns (g_cs, g_s).
#[pyfunction]
fn spin_couplings(g_c: f64, dbz_dx: f64, a_x: f64, delta_cs: f64) -> PyResult<(f64, f64)> {
    let s = analytic::spin_couplings(g_c, dbz_dx, a_x, delta_cs, &CODATA).map_err(py_err)?;
    Ok((s.g_cs, s.g_s))
}

/// Returns (y0, ω_eff) for U(y) = a1 y² + a2 y⁴ − e E_y y.
#[pyfunction]
fn cardano_minimum(a1: f64, a2: f64, e_y: f64) -> PyResult<(f64, f64)> {
    let t = CubicTrap1D { a1, a2, e_y };
    let s = analytic::cardano_minimum(&t, &CODATA).map_err(py_err)?;
    let w = analytic::effective_frequency(&t, &CODATA).map_err(py_err)?;
    Ok((s.y0, w.value()))
}

#[pyfunction]
fn omega_min(a2: f64, e_y: f64) -> f64 {
    analytic::omega_min(a2, e_y, &CODATA).value()
}

/// Lowest `states` energies (J) of a harmonic trap on an nx×ny grid.
#[pyfunction]
#[pyo3(signature = (omega_x, omega_y, nx=151, ny=151, states=3))]
fn harmonic_levels(omega_x: f64, omega_y: f64, nx: usize, ny: usize, states: usize) -> PyResult<Vec<f64>> {
    let field = make_analytic(AnalyticCoefficients::harmonic(omega_x, omega_y, CODATA.m_e), 0.0, 0.0, &CODATA);
    let window = qsolver::auto_window(&field).map_err(py_err)?;
    let h = qsolver::build_hamiltonian(&field, &window, nx, ny).map_err(py_err)?;
    Ok(qsolver::eigenstates(&h, states, &KrylovOptions::default()).map_err(py_err)?.energies)
}

/// N electrons in a harmonic trap with a uniform ∂α/∂y: returns (Δω_r, mode frequencies).
#[pyfunction]
fn cluster_shift(n: usize, omega_x: f64, omega_y: f64, resonator: &PyResonator, dalpha_dy: f64) -> PyResult<(f64, Vec<f64>)> {
    let field = make_analytic(AnalyticCoefficients::harmonic(omega_x, omega_y, CODATA.m_e), 0.0, 0.0, &CODATA);
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let cfg = cluster::minimize(&field, n, &Init::Auto, &MinimizeOptions::default()).map_err(py_err)?;
    let modes = cluster::normal_modes(&field, &cfg).map_err(py_err)?;
    let grad = CouplingGradientMap::uniform(dalpha_dy, Rect::centered(0.0, 0.0, 1e-3, 1e-3));
    let cm = cluster::coupled_spectrum(&modes, &cfg, &resonator.inner, &grad, &CODATA).map_err(py_err)?;
    Ok((cm.shift, modes.frequencies))
}

#[pymodule]
fn helidot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyResonator>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(synth_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(synth_dip, m)?)?;
    m.add_function(wrap_pyfunction!(compensate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_bare, m)?)?;
    m.add_function(wrap_pyfunction!(fit_rabi, m)?)?;
    m.add_function(wrap_pyfunction!(fit_dip, m)?)?;
    m.add_function(wrap_pyfunction!(s21, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_g, m)?)?;
    m.add_function(wrap_pyfunction!(cooperativity, m)?)?;
    m.add_function(wrap_pyfunction!(purcell_t1, m)?)?;
    m.add_function(wrap_pyfunction!(spin_couplings, m)?)?;
    m.add_function(wrap_pyfunction!(cardano_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(omega_min, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_levels, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_shift, m)?)?;
    Ok(())
}
