//! Seeded synthetic spectra and two-tone data.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cavity::{s21_with_crosstalk, two_tone_dip, CrosstalkParams, SpectrumTrace, TwoLevelElectron};
use crate::resonator::ResonatorParams;
use crate::{Error, Result};

/// Smooth, electron-independent background added to S21:
/// a(1 + s·x)·exp(i(φ + τ·x)) with x = (ω − ω_c)/half_span ∈ [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OtherBackground {
    pub amplitude: f64,
    pub slope: f64,
    pub phase: f64,
    pub phase_slope: f64,
}

impl OtherBackground {
    pub fn at(&self, x: f64) -> C64 {
        C64::from_polar(self.amplitude * (1.0 + self.slope * x), self.phase + self.phase_slope * x)
    }
}

/// Everything needed to synthesize one transmission trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub resonator: ResonatorParams,
    pub electron: TwoLevelElectron,
    /// rad/s
    pub g: f64,
    #[serde(default)]
    pub crosstalk: CrosstalkParams,
    #[serde(default)]
    pub other: OtherBackground,
    /// Probe window center and half-span (rad/s).
    pub center: f64,
    pub half_span: f64,
    pub points: usize,
    /// Amplitude SNR: peak|S21_bare| over the rms magnitude of the complex
    /// noise, so each quadrature gets σ = peak/(SNR·√2).
    /// `None` means noiseless.
    pub snr: Option<f64>,
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma` to both quadratures.
pub fn add_complex_noise(values: &mut [C64], sigma: f64, rng: &mut ChaCha8Rng) -> Result<()> {
    if sigma == 0.0 {
        return Ok(());
    }
    let n = Normal::new(0.0, sigma).map_err(|e| Error::usage(e.to_string()))?;
    for v in values {
        v.re += n.sample(rng);
        v.im += n.sample(rng);
    }
    Ok(())
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Noise σ for an amplitude SNR relative to the bare-resonator peak.
pub fn noise_sigma(res: &ResonatorParams, snr: Option<f64>) -> Result<f64> {
    match snr {
        None => Ok(0.0),
        Some(s) if s.is_infinite() && s > 0.0 => Ok(0.0),
        Some(s) if s > 0.0 => Ok(2.0 * (res.kappa_1 * res.kappa_2).sqrt() / res.kappa_tot() / (s * std::f64::consts::SQRT_2)),
        Some(s) => Err(Error::usage(format!("SNR must be positive, got {s}"))),
    }
}

pub fn synth_spectrum(spec: &SpectrumSpec, seed: u64) -> Result<SpectrumTrace> {
    spec.resonator.validate()?;
    spec.electron.validate()?;
    spec.crosstalk.validate()?;
    if !(spec.half_span > 0.0) || spec.points < 2 {
        return Err(Error::usage("need a positive span and at least two points"));
    }
    let (c, h) = (spec.center, spec.half_span);
    let mut tr = SpectrumTrace::sample(c - h, c + h, spec.points, |w| {
        Ok(s21_with_crosstalk(&spec.resonator, &spec.electron, spec.g, &spec.crosstalk, w)?
            + spec.other.at((w - c) / h))
    })?;
    let sigma = noise_sigma(&spec.resonator, spec.snr)?;
    add_complex_noise(&mut tr.s21, sigma, &mut rng_from_seed(seed))?;
    Ok(tr.with_metadata(serde_json::json!({ "synthetic": spec, "seed": seed })))
}

/// Two-tone dip samples with Gaussian noise of `noise_frac`·depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipSpec {
    pub omega_e: f64,
    pub gamma: f64,
    pub depth: f64,
    pub offset: f64,
    pub center: f64,
    pub half_span: f64,
    pub points: usize,
    pub noise_frac: f64,
}

pub fn synth_dip(spec: &DipSpec, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if spec.points < 2 || !(spec.half_span > 0.0) || spec.noise_frac < 0.0 {
        return Err(Error::usage("invalid dip sampling parameters"));
    }
    let n = spec.points;
    let xs: Vec<f64> = (0..n)
        .map(|k| spec.center - spec.half_span + 2.0 * spec.half_span * k as f64 / (n - 1) as f64)
        .collect();
    let mut ys: Vec<f64> = xs
        .iter()
        .map(|&w| two_tone_dip(spec.omega_e, spec.gamma, spec.depth, spec.offset, w))
        .collect();
    if spec.noise_frac > 0.0 {
        let nd = Normal::new(0.0, spec.noise_frac * spec.depth.abs()).map_err(|e| Error::usage(e.to_string()))?;
        let mut rng = rng_from_seed(seed);
        for y in &mut ys {
            *y += nd.sample(&mut rng);
        }
    }
    Ok((xs, ys))
}
