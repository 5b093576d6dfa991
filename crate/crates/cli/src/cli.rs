//! Argument definitions. Frequencies are cyclic (Hz unless suffixed).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;
use crate::parse;

#[derive(Debug, Parser)]
#[command(name = "helidot", version, about = "Electron-on-helium dot and resonator toolkit")]
pub struct Cli {
    /// JSON config with `constants` and `resonator` sections
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, value_delimiter = ',', default_values = ["csv", "json"])]
    pub format: Vec<Format>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cmd {
    /// Seeded synthetic transmission trace or two-tone dip
    Synth(SynthArgs),
    /// Least-squares fits of traces and dips
    #[command(subcommand)]
    Fit(FitCmd),
    /// Remove crosstalk and background using a far-detuned reference trace
    Compensate(CompensateArgs),
    /// Voltage sweeps of the cluster shift or the quantum transitions
    #[command(subcommand)]
    Sweep(SweepCmd),
    /// Lowest eigenstates of one trap
    Qsolve(QsolveArgs),
    /// Closed-form calculators
    #[command(subcommand)]
    Calc(CalcCmd),
}

impl Cmd {
    pub fn name(&self) -> String {
        match self {
            Cmd::Synth(_) => "synth".into(),
            Cmd::Fit(f) => format!("fit {}", f.name()),
            Cmd::Compensate(_) => "compensate".into(),
            Cmd::Sweep(SweepCmd::Shift(_)) => "sweep shift".into(),
            Cmd::Sweep(SweepCmd::Freq(_)) => "sweep freq".into(),
            Cmd::Qsolve(_) => "qsolve".into(),
            Cmd::Calc(c) => format!("calc {}", c.name()),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResonatorArgs {
    /// Resonator frequency
    #[arg(long, value_parser = parse::freq)]
    pub fr: Option<f64>,
    /// Characteristic impedance (Ω)
    #[arg(long)]
    pub impedance: Option<f64>,
    /// Total linewidth κ, split evenly between the two ports
    #[arg(long, value_parser = parse::freq)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Spectrum,
    Dip,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Spectrum)]
    pub kind: SynthKind,
    /// File stem (default `trace` or `dip`)
    #[arg(long)]
    pub name: Option<String>,
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    /// Electron frequency (spectrum default: resonator frequency)
    #[arg(long, value_parser = parse::freq)]
    pub fe: Option<f64>,
    #[arg(long, value_parser = parse::freq, default_value = "118MHz")]
    pub g: f64,
    #[arg(long, value_parser = parse::freq, default_value = "75MHz")]
    pub gamma2: f64,
    #[arg(long, value_parser = parse::freq, default_value = "0")]
    pub gamma1: f64,
    /// Direct transmission fraction T
    #[arg(long, default_value_t = 0.0)]
    pub crosstalk_t: f64,
    /// Crosstalk phase ζ (rad)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub crosstalk_zeta: f64,
    /// Smooth background a(1 + s·x)·exp(i(φ + τ·x)), x ∈ [−1, 1] across the span
    #[arg(long, default_value_t = 0.0)]
    pub other_amp: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub other_slope: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub other_phase: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub other_phase_slope: f64,
    /// Sweep center (default: resonator or dip frequency)
    #[arg(long, value_parser = parse::freq)]
    pub center: Option<f64>,
    #[arg(long, value_parser = parse::freq, default_value = "0.5GHz")]
    pub half_span: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Amplitude SNR; omit for noiseless data
    #[arg(long)]
    pub snr: Option<f64>,
    /// Dip half width at half maximum
    #[arg(long, value_parser = parse::freq, default_value = "102MHz")]
    pub hwhm: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub depth: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub offset: f64,
    /// Dip noise σ as a fraction of the depth
    #[arg(long, default_value_t = 0.01)]
    pub noise_frac: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitCmd {
    /// Bare resonator with crosstalk on a far-detuned trace
    Bare(FitBareArgs),
    /// Vacuum-Rabi fit with the resonator held fixed
    Rabi(FitRabiArgs),
    /// Lorentzian two-tone dip
    Twotone(FitTwotoneArgs),
}

impl FitCmd {
    fn name(&self) -> &'static str {
        match self {
            FitCmd::Bare(_) => "bare",
            FitCmd::Rabi(_) => "rabi",
            FitCmd::Twotone(_) => "twotone",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FitBareArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// Fit window half-width in units of κ
    #[arg(long, default_value_t = 2.0)]
    pub window_kappa: f64,
    /// Impedance template for the returned element values
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    #[arg(long, value_parser = parse::freq)]
    pub fr_guess: Option<f64>,
    #[arg(long, value_parser = parse::freq)]
    pub kappa_guess: Option<f64>,
    #[arg(long)]
    pub t_guess: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta_guess: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitRabiArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// JSON file with a `resonator` key (from `fit bare` or `compensate`)
    #[arg(long)]
    pub resonator_from: Option<PathBuf>,
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    /// Fit the uncompensated trace with free crosstalk (T, ζ)
    #[arg(long)]
    pub with_crosstalk: bool,
    #[arg(long, default_value_t = 0.0)]
    pub crosstalk_t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub crosstalk_zeta: f64,
    #[arg(long, value_parser = parse::freq)]
    pub g_guess: Option<f64>,
    #[arg(long, value_parser = parse::freq)]
    pub gamma2_guess: Option<f64>,
    #[arg(long, value_parser = parse::freq)]
    pub fe_guess: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitTwotoneArgs {
    /// Dip data as written by `synth --kind dip` (CSV or JSON)
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = parse::freq)]
    pub fe_guess: Option<f64>,
    #[arg(long, value_parser = parse::freq)]
    pub hwhm_guess: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub depth_guess: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub offset_guess: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompensateArgs {
    /// Electron-free (far-detuned) trace
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    #[arg(long, default_value_t = 2.0)]
    pub window_kappa: f64,
    #[arg(long, default_value = "compensated")]
    pub name: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Coupling-map JSON; omit to use the analytic surrogate
    #[arg(long)]
    pub maps: Option<PathBuf>,
    /// Swept electrode (maps) or sweep label (surrogate)
    #[arg(long)]
    pub electrode: Option<String>,
    /// Fixed electrode voltage, `name=volts`; repeatable
    #[arg(long = "bias", value_parser = parse::bias, allow_hyphen_values = true)]
    pub biases: Vec<(String, f64)>,
    /// Surrogate U = a1x x² + a1y y² + a2x x⁴ + a2y y⁴ + a1xy x y (J/m², J/m⁴)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a1x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a1y: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a2x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a2y: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a1xy: f64,
    /// Harmonic x frequency, added to a1x
    #[arg(long, value_parser = parse::freq)]
    pub fx: Option<f64>,
    /// Harmonic y frequency, added to a1y
    #[arg(long, value_parser = parse::freq)]
    pub fy: Option<f64>,
    /// Per-volt change of the surrogate coefficients
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub da1x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub da1y: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub da2x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub da2y: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub da1xy: f64,
    /// Uniform in-plane field (V/m)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub ex: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub ey: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RangeArgs {
    /// First voltage (V)
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    /// Last voltage (V)
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Warm start from the previous point (forces one job)
    Sequential,
    Parallel,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCmd {
    /// Classical cluster resonator shift vs voltage
    Shift(ShiftArgs),
    /// Quantum transition frequencies vs voltage
    Freq(FreqArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ShiftArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    /// Number of electrons
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Uniform differential coupling gradient ∂α/∂y (1/m)
    #[arg(long, allow_hyphen_values = true)]
    pub dalpha_dy: Option<f64>,
    /// Coupling length ℓ, sets ∂α/∂y = 1/ℓ
    #[arg(long, value_parser = parse::length)]
    pub ell: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Sequential)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 8)]
    pub max_restarts: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 151)]
    pub nx: usize,
    #[arg(long, default_value_t = 151)]
    pub ny: usize,
    /// Fixed window `x0,x1,y0,y1` in μm (default: automatic)
    #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
    pub window: Option<[f64; 4]>,
}

#[derive(Debug, Args, Serialize)]
pub struct FreqArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct QsolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Voltage on the swept electrode / surrogate parameter
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub voltage: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 3)]
    pub states: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalcCmd {
    /// Electron-photon coupling g from resonator, ℓ and ω_e
    G(CalcG),
    /// Minimum of a1 y² + a2 y⁴ − e E_y y
    Cardano(CalcCardano),
    /// Purcell T1 through the resonator
    PurcellRes(CalcPurcellRes),
    /// Purcell T1 through a filtered bias electrode
    PurcellBias(CalcPurcellBias),
    /// Spin-charge and spin-photon couplings
    Spin(CalcSpin),
    /// Helium surface depression in a channel
    Depression(CalcDepression),
    /// C = 4g²/(κΓ₂)
    Cooperativity(CalcCooperativity),
    /// Electron frequency from a dispersive resonator shift
    Dispersive(CalcDispersive),
}

impl CalcCmd {
    pub fn name(&self) -> &'static str {
        match self {
            CalcCmd::G(_) => "g",
            CalcCmd::Cardano(_) => "cardano",
            CalcCmd::PurcellRes(_) => "purcell-res",
            CalcCmd::PurcellBias(_) => "purcell-bias",
            CalcCmd::Spin(_) => "spin",
            CalcCmd::Depression(_) => "depression",
            CalcCmd::Cooperativity(_) => "cooperativity",
            CalcCmd::Dispersive(_) => "dispersive",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CalcG {
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    #[arg(long, value_parser = parse::length)]
    pub ell: f64,
    #[arg(long, value_parser = parse::freq)]
    pub fe: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcCardano {
    /// J/m²
    #[arg(long, allow_hyphen_values = true)]
    pub a1: f64,
    /// J/m⁴
    #[arg(long, default_value_t = 0.0)]
    pub a2: f64,
    /// V/m
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub ey: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcPurcellRes {
    #[arg(long, value_parser = parse::freq)]
    pub g: f64,
    #[arg(long, value_parser = parse::freq)]
    pub kappa: f64,
    /// Electron-resonator detuning
    #[arg(long, value_parser = parse::freq, allow_hyphen_values = true)]
    pub delta: f64,
    /// Plot range ±span for the SVG
    #[arg(long, value_parser = parse::freq, default_value = "3GHz")]
    pub span: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcPurcellBias {
    /// ∂α/∂y (1/m)
    #[arg(long)]
    pub dalpha_dy: Option<f64>,
    /// Coupling length, sets ∂α/∂y = 1/ℓ
    #[arg(long, value_parser = parse::length)]
    pub ell: Option<f64>,
    #[arg(long, value_parser = parse::freq)]
    pub fe: f64,
    /// C_c / C_other
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    /// Filter inductance (H)
    #[arg(long)]
    pub lf: Option<f64>,
    /// Filter capacitance (F)
    #[arg(long)]
    pub cf: Option<f64>,
    /// Load impedance (Ω)
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long, value_parser = parse::freq, default_value = "1GHz")]
    pub plot_from: f64,
    #[arg(long, value_parser = parse::freq, default_value = "12GHz")]
    pub plot_to: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcSpin {
    /// Charge-photon coupling g_c
    #[arg(long, value_parser = parse::freq)]
    pub gc: f64,
    /// Field gradient ∂B_z/∂x (T/m)
    #[arg(long, allow_hyphen_values = true)]
    pub dbz_dx: f64,
    /// Orbital displacement amplitude a_x
    #[arg(long, value_parser = parse::length)]
    pub ax: f64,
    /// Charge-spin detuning Δ_cs
    #[arg(long, value_parser = parse::freq, allow_hyphen_values = true)]
    pub delta_cs: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcDepression {
    /// Height of the film above the bulk helium
    #[arg(long, value_parser = parse::length)]
    pub height: f64,
    /// Channel width
    #[arg(long, value_parser = parse::length)]
    pub width: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcCooperativity {
    #[arg(long, value_parser = parse::freq)]
    pub g: f64,
    #[arg(long, value_parser = parse::freq)]
    pub kappa: f64,
    #[arg(long, value_parser = parse::freq)]
    pub gamma2: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalcDispersive {
    /// Measured resonator shift Δω_r/2π (signed)
    #[arg(long, value_parser = parse::freq, allow_hyphen_values = true)]
    pub shift: f64,
    #[arg(long, value_parser = parse::freq)]
    pub g: f64,
    #[command(flatten)]
    pub resonator: ResonatorArgs,
}
