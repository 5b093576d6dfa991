//! Command implementations.

use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use helidot_core::analytic::{
    coupling_g, cardano_minimum, cooperativity, effective_frequency, helium_depression, omega_min, purcell_bias,
    purcell_resonator, spin_couplings, BiasFilterCircuit, CubicTrap1D,
};
use helidot_core::cavity::{
    compensate_background, dispersive_electron_freq, s21_bare, s21_resonant, s21_with_crosstalk, two_tone_dip, CompensationOptions,
    CrosstalkParams, SpectrumTrace, TwoLevelElectron,
};
use helidot_core::cluster::{rows_to_csv, shift_vs_voltage_sweep, MinimizeOptions, SweepMode, SweepOptions};
use helidot_core::fitters::{
    crosstalk_from_bare_fit, fit_bare_resonator, fit_lorentzian_dip, fit_rabi, fit_rabi_with_crosstalk,
    resonator_from_bare_fit, BareInit, DipInit, FitResult, RabiInit,
};
use helidot_core::potential::{
    load_coupling_maps, AnalyticCoefficients, CouplingGradientMap, CouplingMapSet, Rect, SweepSource,
};
use helidot_core::qsolver::{
    build_hamiltonian, eigenstates, frequency_rows_to_csv, frequency_vs_voltage, transitions, auto_window,
    KrylovOptions, QSweepOptions, WindowSpec,
};
use helidot_core::synth::{synth_dip, synth_spectrum, DipSpec, OtherBackground, SpectrumSpec};
use helidot_core::{Config, Error, Frequency, PhysicalConstants, ResonatorParams, Result};
use serde_json::{json, Value};

use crate::cli::*;
use crate::output::{Format, Output};
use crate::svg::{Plot, Series};

/// What a command hands back for stdout.
pub type Report = Value;

pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub seed: u64,
    pub out: Output,
}

impl Ctx<'_> {
    fn consts(&self) -> &PhysicalConstants {
        &self.cfg.constants
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn rad(hz: f64) -> f64 {
    TAU * hz
}

impl ResonatorArgs {
    pub fn resolve(&self, base: &ResonatorParams) -> Result<ResonatorParams> {
        let mut r = *base;
        if self.fr.is_some() || self.impedance.is_some() {
            let fr = self.fr.unwrap_or(base.omega_r().hz());
            let z = self.impedance.unwrap_or((base.l_r / base.c_r).sqrt());
            let fresh = ResonatorParams::from_frequency_impedance(Frequency::from_hz(fr), z)?;
            r.l_r = fresh.l_r;
            r.c_r = fresh.c_r;
        }
        if let Some(k) = self.kappa {
            r = r.with_symmetric_kappa(rad(k));
        }
        r.validate()?;
        Ok(r)
    }
}

/// Input files named on the command line, in argument order.
pub fn inputs(cmd: &Cmd) -> Vec<String> {
    let p = |x: &Path| x.display().to_string();
    match cmd {
        Cmd::Fit(FitCmd::Bare(a)) => vec![p(&a.trace)],
        Cmd::Fit(FitCmd::Rabi(a)) => std::iter::once(p(&a.trace)).chain(a.resonator_from.as_deref().map(p)).collect(),
        Cmd::Fit(FitCmd::Twotone(a)) => vec![p(&a.data)],
        Cmd::Compensate(a) => vec![p(&a.reference), p(&a.target)],
        Cmd::Sweep(SweepCmd::Shift(a)) => a.source.maps.as_deref().map(p).into_iter().collect(),
        Cmd::Sweep(SweepCmd::Freq(a)) => a.source.maps.as_deref().map(p).into_iter().collect(),
        Cmd::Qsolve(a) => a.source.maps.as_deref().map(p).into_iter().collect(),
        _ => Vec::new(),
    }
}

pub fn dispatch(cmd: &Cmd, ctx: &mut Ctx) -> Result<Report> {
    match cmd {
        Cmd::Synth(a) => synth(a, ctx),
        Cmd::Fit(FitCmd::Bare(a)) => fit_bare(a, ctx),
        Cmd::Fit(FitCmd::Rabi(a)) => fit_rabi_cmd(a, ctx),
        Cmd::Fit(FitCmd::Twotone(a)) => fit_twotone(a, ctx),
        Cmd::Compensate(a) => compensate(a, ctx),
        Cmd::Sweep(SweepCmd::Shift(a)) => sweep_shift(a, ctx),
        Cmd::Sweep(SweepCmd::Freq(a)) => sweep_freq(a, ctx),
        Cmd::Qsolve(a) => qsolve(a, ctx),
        Cmd::Calc(c) => calc(c, ctx),
    }
}

fn written(ctx: &Ctx) -> Report {
    json!({ "written": ctx.out.written() })
}

fn magnitude_plot(title: &str, traces: &[(&str, &SpectrumTrace)]) -> Plot {
    Plot {
        title: title.into(),
        x_label: "probe frequency (GHz)".into(),
        y_label: "|S21|".into(),
        series: traces
            .iter()
            .map(|(label, t)| Series {
                label: (*label).into(),
                x: t.probe_freqs.iter().map(|w| w / TAU * 1e-9).collect(),
                y: t.magnitudes(),
            })
            .collect(),
    }
}

fn synth(a: &SynthArgs, ctx: &mut Ctx) -> Result<Report> {
    match a.kind {
        SynthKind::Spectrum => {
            let res = a.resonator.resolve(&ctx.cfg.resonator)?;
            let wr = res.omega_r().value();
            let mut el = TwoLevelElectron::new(a.fe.map_or(wr, rad), rad(a.gamma2));
            el.gamma_1 = rad(a.gamma1);
            let spec = SpectrumSpec {
                resonator: res,
                electron: el,
                g: rad(a.g),
                crosstalk: CrosstalkParams {
                    t: a.crosstalk_t,
                    zeta: a.crosstalk_zeta,
                    theta: 0.0,
                },
                other: OtherBackground {
                    amplitude: a.other_amp,
                    slope: a.other_slope,
                    phase: a.other_phase,
                    phase_slope: a.other_phase_slope,
                },
                center: a.center.map_or(wr, rad),
                half_span: rad(a.half_span),
                points: a.points,
                snr: a.snr,
            };
            let trace = synth_spectrum(&spec, ctx.seed)?;
            let stem = a.name.as_deref().unwrap_or("trace");
            ctx.out.trace(stem, &trace)?;
            if ctx.out.wants(Format::Svg) {
                ctx.out.svg(&format!("{stem}.svg"), &magnitude_plot("synthetic transmission", &[("data", &trace)]))?;
            }
        }
        SynthKind::Dip => {
            let fe = a.fe.ok_or_else(|| usage("synth --kind dip needs --fe"))?;
            let spec = DipSpec {
                omega_e: rad(fe),
                gamma: rad(a.hwhm),
                depth: a.depth,
                offset: a.offset,
                center: rad(a.center.unwrap_or(fe)),
                half_span: rad(a.half_span),
                points: a.points,
                noise_frac: a.noise_frac,
            };
            let (xs, ys) = synth_dip(&spec, ctx.seed)?;
            let ghz: Vec<f64> = xs.iter().map(|w| w / TAU * 1e-9).collect();
            let stem = a.name.as_deref().unwrap_or("dip");
            if ctx.out.wants(Format::Csv) {
                let mut body = String::from("drive_GHz,signal\n");
                for (x, y) in ghz.iter().zip(&ys) {
                    body.push_str(&format!("{x},{y}\n"));
                }
                ctx.out.csv(&format!("{stem}.csv"), &body)?;
            }
            if ctx.out.wants(Format::Json) {
                ctx.out.json(&format!("{stem}.json"), json!({ "synthetic": spec, "seed": ctx.seed, "drive_GHz": ghz, "signal": ys }))?;
            }
            if ctx.out.wants(Format::Svg) {
                let plot = Plot {
                    title: "synthetic two-tone dip".into(),
                    x_label: "drive frequency (GHz)".into(),
                    y_label: "signal".into(),
                    series: vec![Series { label: "data".into(), x: ghz, y: ys }],
                };
                ctx.out.svg(&format!("{stem}.svg"), &plot)?;
            }
        }
    }
    Ok(written(ctx))
}

/// Fit parameters that are angular rates, re-expressed in cyclic Hz.
fn cyclic(fit: &FitResult) -> Value {
    let mut m = serde_json::Map::new();
    for (name, p) in &fit.params {
        if matches!(name.as_str(), "omega_r" | "kappa_tot" | "sqrt_kappa_prod" | "g" | "Gamma_2" | "omega_e" | "gamma") {
            m.insert(name.clone(), json!({ "value_hz": p.value / TAU, "sigma_hz": p.sigma / TAU }));
        }
    }
    Value::Object(m)
}

fn with_path(p: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", p.display()))),
        Error::Format { electrode, message } => Error::Format {
            electrode,
            message: format!("{}: {message}", p.display()),
        },
        other => other,
    }
}

fn read_trace(p: &Path) -> Result<SpectrumTrace> {
    SpectrumTrace::read(p).map_err(|e| with_path(p, e))
}

fn fit_bare(a: &FitBareArgs, ctx: &mut Ctx) -> Result<Report> {
    let trace = read_trace(&a.trace)?;
    let template = a.resonator.resolve(&ctx.cfg.resonator)?;
    let init = BareInit {
        omega_r: a.fr_guess.map(rad),
        kappa_tot: a.kappa_guess.map(rad),
        t: a.t_guess,
        zeta: a.zeta_guess,
    };
    let fit = fit_bare_resonator(&trace, &init, a.window_kappa)?;
    let res = resonator_from_bare_fit(&fit, &template)?;
    let ct = crosstalk_from_bare_fit(&fit);
    let body = json!({ "fit": fit, "cyclic": cyclic(&fit), "resonator": res, "crosstalk": ct });
    let (wr, kappa, a12) = (fit.value("omega_r"), fit.value("kappa_tot"), fit.value("sqrt_kappa_prod"));
    write_fit(ctx, "fit_bare", body, &trace, |w| s21_bare(wr, kappa, a12, &ct, w).norm())
}

fn write_fit(ctx: &mut Ctx, stem: &str, body: Value, trace: &SpectrumTrace, model: impl Fn(f64) -> f64) -> Result<Report> {
    let report = ctx.out.with_run(body.clone());
    if ctx.out.wants(Format::Json) {
        ctx.out.json(&format!("{stem}.json"), body)?;
    }
    if ctx.out.wants(Format::Svg) {
        let x: Vec<f64> = trace.probe_freqs.iter().map(|w| w / TAU * 1e-9).collect();
        let plot = Plot {
            title: stem.replace('_', " "),
            x_label: "probe frequency (GHz)".into(),
            y_label: "|S21|".into(),
            series: vec![
                Series { label: "data".into(), x: x.clone(), y: trace.magnitudes() },
                Series { label: "model".into(), x, y: trace.probe_freqs.iter().map(|&w| model(w)).collect() },
            ],
        };
        ctx.out.svg(&format!("{stem}.svg"), &plot)?;
    }
    Ok(report)
}

fn resonator_from_file(p: &Path) -> Result<ResonatorParams> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p)?)?;
    let r = v
        .get("resonator")
        .ok_or_else(|| Error::Format { electrode: None, message: format!("{} has no 'resonator' key", p.display()) })?;
    Ok(serde_json::from_value(r.clone())?)
}

fn fit_rabi_cmd(a: &FitRabiArgs, ctx: &mut Ctx) -> Result<Report> {
    let trace = read_trace(&a.trace)?;
    let base = match &a.resonator_from {
        Some(p) => resonator_from_file(p)?,
        None => ctx.cfg.resonator,
    };
    let res = a.resonator.resolve(&base)?;
    let init = RabiInit {
        g: a.g_guess.map(rad),
        gamma_2: a.gamma2_guess.map(rad),
        omega_e: a.fe_guess.map(rad),
    };
    let ct_init = CrosstalkParams {
        t: a.crosstalk_t,
        zeta: a.crosstalk_zeta,
        theta: 0.0,
    };
    let fit = if a.with_crosstalk {
        fit_rabi_with_crosstalk(&trace, &res, &init, &ct_init)?
    } else {
        fit_rabi(&trace, &res, &init)?
    };
    let el = TwoLevelElectron::new(fit.value("omega_e"), fit.value("Gamma_2"));
    let g = fit.value("g");
    let ct = if a.with_crosstalk {
        CrosstalkParams { t: fit.value("T"), zeta: fit.value("zeta"), theta: 0.0 }
    } else {
        CrosstalkParams::default()
    };
    let body = json!({ "fit": fit, "cyclic": cyclic(&fit), "resonator": res });
    write_fit(ctx, "fit_rabi", body, &trace, |w| {
        if a.with_crosstalk {
            s21_with_crosstalk(&res, &el, g, &ct, w)
        } else {
            s21_resonant(&res, &el, g, w)
        }
        .map(|z| z.norm())
        .unwrap_or(f64::NAN)
    })
}

fn read_dip(p: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(p).map_err(|e| with_path(p, e.into()))?;
    let bad = |m: String| Error::Format { electrode: None, message: m };
    let (ghz, ys): (Vec<f64>, Vec<f64>) = if p.extension().is_some_and(|e| e == "json") {
        let v: Value = serde_json::from_str(&text)?;
        let col = |k: &str| -> Result<Vec<f64>> {
            v.get(k)
                .cloned()
                .ok_or_else(|| bad(format!("dip JSON lacks '{k}'")))
                .and_then(|c| Ok(serde_json::from_value(c)?))
        };
        (col("drive_GHz")?, col("signal")?)
    } else {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        match lines.next().map(str::trim) {
            Some("drive_GHz,signal") => {}
            h => return Err(bad(format!("unexpected dip header {h:?}"))),
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (k, l) in lines.enumerate() {
            let (x, y) = l.split_once(',').ok_or_else(|| bad(format!("data row {}: expected 2 columns", k + 1)))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("data row {}: {e}", k + 1)));
            xs.push(num(x)?);
            ys.push(num(y)?);
        }
        (xs, ys)
    };
    Ok((ghz.iter().map(|f| rad(f * 1e9)).collect(), ys))
}

fn fit_twotone(a: &FitTwotoneArgs, ctx: &mut Ctx) -> Result<Report> {
    let (xs, ys) = read_dip(&a.data)?;
    let init = DipInit {
        omega_e: a.fe_guess.map(rad),
        gamma: a.hwhm_guess.map(rad),
        depth: a.depth_guess,
        offset: a.offset_guess,
    };
    let fit = fit_lorentzian_dip(&xs, &ys, &init)?;
    let body = json!({ "fit": fit, "cyclic": cyclic(&fit) });
    let report = ctx.out.with_run(body.clone());
    if ctx.out.wants(Format::Json) {
        ctx.out.json("fit_twotone.json", body)?;
    }
    if ctx.out.wants(Format::Svg) {
        let ghz: Vec<f64> = xs.iter().map(|w| w / TAU * 1e-9).collect();
        let model = xs
            .iter()
            .map(|&w| two_tone_dip(fit.value("omega_e"), fit.value("gamma"), fit.value("depth"), fit.value("offset"), w))
            .collect();
        let plot = Plot {
            title: "two-tone dip fit".into(),
            x_label: "drive frequency (GHz)".into(),
            y_label: "signal".into(),
            series: vec![
                Series { label: "data".into(), x: ghz.clone(), y: ys },
                Series { label: "model".into(), x: ghz, y: model },
            ],
        };
        ctx.out.svg("fit_twotone.svg", &plot)?;
    }
    Ok(report)
}

fn compensate(a: &CompensateArgs, ctx: &mut Ctx) -> Result<Report> {
    let far = read_trace(&a.reference)?;
    let target = read_trace(&a.target)?;
    let res = a.resonator.resolve(&ctx.cfg.resonator)?;
    let comp = compensate_background(&far, &target, &res, None, &CompensationOptions { window_kappa: a.window_kappa })?;
    ctx.out.trace(&a.name, &comp.compensated)?;
    ctx.out.json(
        "compensation.json",
        json!({
            "crosstalk": comp.crosstalk,
            "resonator": comp.resonator,
            "reference_fit": comp.reference_fit,
            "reference_cyclic": cyclic(&comp.reference_fit),
        }),
    )?;
    if ctx.out.wants(Format::Svg) {
        let plot = magnitude_plot("background compensation", &[("target", &target), ("compensated", &comp.compensated)]);
        ctx.out.svg(&format!("{}.svg", a.name), &plot)?;
    }
    Ok(written(ctx))
}

impl SourceArgs {
    pub fn build(&self, c: &PhysicalConstants) -> Result<(SweepSource, Option<Arc<CouplingMapSet>>)> {
        match &self.maps {
            Some(p) => {
                let maps = Arc::new(load_coupling_maps(p)?);
                let electrode = self.electrode.clone().ok_or_else(|| usage("--maps needs --electrode"))?;
                let base = self.biases.iter().cloned().collect();
                Ok((SweepSource::Gridded { maps: maps.clone(), base, electrode }, Some(maps)))
            }
            None => {
                let mut base = AnalyticCoefficients {
                    a1x: self.a1x,
                    a1y: self.a1y,
                    a2x: self.a2x,
                    a2y: self.a2y,
                    a1xy: self.a1xy,
                };
                if self.fx.is_some() || self.fy.is_some() {
                    let h = AnalyticCoefficients::harmonic(rad(self.fx.unwrap_or(0.0)), rad(self.fy.unwrap_or(0.0)), c.m_e);
                    base = base.add_scaled(&h, 1.0);
                }
                let per_volt = AnalyticCoefficients {
                    a1x: self.da1x,
                    a1y: self.da1y,
                    a2x: self.da2x,
                    a2y: self.da2y,
                    a1xy: self.da1xy,
                };
                let label = self.electrode.clone().unwrap_or_else(|| "surrogate".into());
                Ok((SweepSource::Analytic { base, per_volt, label }, None))
            }
        }
    }
}

impl RangeArgs {
    pub fn voltages(&self) -> Result<Vec<f64>> {
        if self.steps == 0 || !self.from.is_finite() || !self.to.is_finite() {
            return Err(usage("sweep needs finite bounds and at least one step"));
        }
        if self.steps == 1 {
            return Ok(vec![self.from]);
        }
        let n = self.steps - 1;
        Ok((0..=n).map(|k| self.from + (self.to - self.from) * k as f64 / n as f64).collect())
    }
}

impl GridArgs {
    fn window(&self) -> WindowSpec {
        match self.window {
            None => WindowSpec::Auto,
            Some([x0, x1, y0, y1]) => WindowSpec::Fixed(Rect {
                x_min: x0 * 1e-6,
                x_max: x1 * 1e-6,
                y_min: y0 * 1e-6,
                y_max: y1 * 1e-6,
            }),
        }
    }
}

fn sweep_shift(a: &ShiftArgs, ctx: &mut Ctx) -> Result<Report> {
    let c = *ctx.consts();
    let (source, maps) = a.source.build(&c)?;
    let volts = a.range.voltages()?;
    let res = a.resonator.resolve(&ctx.cfg.resonator)?;
    let dady = match (a.dalpha_dy, a.ell) {
        (Some(_), Some(_)) => return Err(usage("give either --dalpha-dy or --ell")),
        (Some(d), None) => Some(d),
        (None, Some(l)) => Some(1.0 / l),
        (None, None) => None,
    };
    let domain = maps
        .as_ref()
        .map(|m| m.axes.bounds())
        .unwrap_or_else(|| Rect::centered(0.0, 0.0, 1e-3, 1e-3));
    let grad = dady.map(|d| CouplingGradientMap::uniform(d, domain));
    if grad.is_none() && maps.as_ref().is_none_or(|m| m.diff_grad.is_none()) {
        return Err(usage("no coupling gradient: give --dalpha-dy or --ell, or maps with one"));
    }
    let opts = SweepOptions {
        mode: match a.mode {
            Mode::Sequential => SweepMode::Sequential,
            Mode::Parallel => SweepMode::Parallel,
        },
        jobs: a.jobs.max(1),
        minimize: MinimizeOptions {
            max_restarts: a.max_restarts,
            seed: ctx.seed,
            ..Default::default()
        },
        e_x: a.source.ex,
        e_y: a.source.ey,
    };
    let rows = shift_vs_voltage_sweep(&source, &volts, a.n, &res, grad.as_ref(), &opts, &c);
    if ctx.out.wants(Format::Csv) {
        ctx.out.csv("sweep_shift.csv", &rows_to_csv(&rows))?;
    }
    if ctx.out.wants(Format::Json) {
        ctx.out.json("sweep_shift.json", json!({ "rows": rows }))?;
    }
    if ctx.out.wants(Format::Svg) {
        let plot = Plot {
            title: format!("resonator shift, N = {}", a.n),
            x_label: format!("{} voltage (V)", source.label()),
            y_label: "Δω_r/2π (MHz)".into(),
            series: vec![Series {
                label: "shift".into(),
                x: rows.iter().map(|r| r.voltage).collect(),
                y: rows.iter().map(|r| r.shift / TAU * 1e-6).collect(),
            }],
        };
        ctx.out.svg("sweep_shift.svg", &plot)?;
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(json!({ "written": ctx.out.written(), "points": rows.len(), "failed": failed }))
}

fn sweep_freq(a: &FreqArgs, ctx: &mut Ctx) -> Result<Report> {
    let c = *ctx.consts();
    let (source, _) = a.source.build(&c)?;
    let volts = a.range.voltages()?;
    let opts = QSweepOptions {
        window: a.grid.window(),
        nx: a.grid.nx,
        ny: a.grid.ny,
        e_x: a.source.ex,
        e_y: a.source.ey,
        jobs: a.jobs.max(1),
        seed: ctx.seed,
    };
    let rows = frequency_vs_voltage(&source, &volts, &opts, &c);
    if ctx.out.wants(Format::Csv) {
        ctx.out.csv("sweep_freq.csv", &frequency_rows_to_csv(&rows))?;
    }
    if ctx.out.wants(Format::Json) {
        ctx.out.json("sweep_freq.json", json!({ "rows": rows }))?;
    }
    if ctx.out.wants(Format::Svg) {
        let x: Vec<f64> = rows.iter().map(|r| r.voltage).collect();
        let plot = Plot {
            title: "electron transition frequencies".into(),
            x_label: format!("{} voltage (V)", source.label()),
            y_label: "frequency (GHz)".into(),
            series: vec![
                Series { label: "ω01/2π".into(), x: x.clone(), y: rows.iter().map(|r| r.f01 * 1e-9).collect() },
                Series { label: "ω12/2π".into(), x, y: rows.iter().map(|r| r.f12 * 1e-9).collect() },
            ],
        };
        ctx.out.svg("sweep_freq.svg", &plot)?;
    }
    let failed = rows.iter().filter(|r| !r.f01.is_finite()).count();
    Ok(json!({ "written": ctx.out.written(), "points": rows.len(), "failed": failed }))
}

fn qsolve(a: &QsolveArgs, ctx: &mut Ctx) -> Result<Report> {
    let c = *ctx.consts();
    let (source, _) = a.source.build(&c)?;
    let field = source.field_at(a.voltage, a.source.ex, a.source.ey, &c)?;
    let window = match a.grid.window() {
        WindowSpec::Auto => auto_window(&field)?,
        WindowSpec::Fixed(r) => r,
    };
    let h = build_hamiltonian(&field, &window, a.grid.nx, a.grid.ny)?;
    let sol = eigenstates(&h, a.states, &KrylovOptions { seed: ctx.seed, ..Default::default() })?;
    let t = if sol.energies.len() >= 3 { Some(transitions(&sol, &c)?) } else { None };
    let body = json!({
        "energies_J": sol.energies,
        "levels_GHz": sol.energies.iter().map(|e| (e - sol.energies[0]) / c.h * 1e-9).collect::<Vec<_>>(),
        "residual_norms": sol.residual_norms,
        "f01_GHz": t.map(|t| t.omega_01.ghz()),
        "f12_GHz": t.map(|t| t.omega_12.ghz()),
        "alpha_e_MHz": t.map(|t| t.alpha_e * 1e-6),
        "window_m": window,
        "grid": [h.nx(), h.ny()],
        "flags": h.flags,
    });
    let report = ctx.out.with_run(body.clone());
    if ctx.out.wants(Format::Json) {
        ctx.out.json("qsolve.json", body)?;
    }
    Ok(report)
}

fn calc(cmd: &CalcCmd, ctx: &mut Ctx) -> Result<Report> {
    let c = *ctx.consts();
    let mut plot = None;
    let body = match cmd {
        CalcCmd::G(a) => {
            let res = a.resonator.resolve(&ctx.cfg.resonator)?;
            let d = res.derived(&c)?;
            let ch = coupling_g(&res, a.ell, Frequency::from_hz(a.fe), &c)?;
            json!({
                "g_hz": ch.g / TAU,
                "l_y_m": ch.l_y,
                "v_zpf_V": ch.v_zpf,
                "ell_m": ch.ell,
                "impedance_ohm": d.impedance,
                "fr_hz": d.omega_r.hz(),
            })
        }
        CalcCmd::Cardano(a) => {
            let trap = CubicTrap1D { a1: a.a1, a2: a.a2, e_y: a.ey };
            let sol = cardano_minimum(&trap, &c)?;
            let f_eff = effective_frequency(&trap, &c).ok().map(|f| f.hz());
            json!({
                "solution": sol,
                "f_eff_hz": f_eff,
                "f_min_hz": omega_min(a.a2, a.ey, &c).hz(),
            })
        }
        CalcCmd::PurcellRes(a) => {
            let d = purcell_resonator(rad(a.g), rad(a.kappa), rad(a.delta))?;
            let n = 401;
            let xs: Vec<f64> = (0..n).map(|k| -a.span + 2.0 * a.span * k as f64 / (n - 1) as f64).collect();
            let ys = xs
                .iter()
                .map(|&x| purcell_resonator(rad(a.g), rad(a.kappa), rad(x)).map(|d| d.t1 * 1e6))
                .collect::<Result<Vec<_>>>()?;
            plot = Some(Plot {
                title: "Purcell decay through the resonator".into(),
                x_label: "detuning Δ/2π (GHz)".into(),
                y_label: "T1 (μs)".into(),
                series: vec![Series { label: "T1".into(), x: xs.iter().map(|x| x * 1e-9).collect(), y: ys }],
            });
            json!({ "gamma_1_per_s": d.gamma_1, "t1_s": d.t1 })
        }
        CalcCmd::PurcellBias(a) => {
            let dady = match (a.dalpha_dy, a.ell) {
                (Some(d), None) => d,
                (None, Some(l)) => 1.0 / l,
                _ => return Err(usage("give exactly one of --dalpha-dy or --ell")),
            };
            let mut circ = BiasFilterCircuit::guard(dady, rad(a.fe), a.ratio, &c)?;
            circ.l_f = a.lf.unwrap_or(circ.l_f);
            circ.c_f = a.cf.unwrap_or(circ.c_f);
            circ.z0 = a.z0.unwrap_or(circ.z0);
            let d = purcell_bias(&circ, rad(a.fe))?;
            let n = 401;
            let xs: Vec<f64> = (0..n).map(|k| a.plot_from + (a.plot_to - a.plot_from) * k as f64 / (n - 1) as f64).collect();
            let ys = xs
                .iter()
                .map(|&f| {
                    let mut cf = BiasFilterCircuit::guard(dady, rad(f), a.ratio, &c)?;
                    cf.l_f = circ.l_f;
                    cf.c_f = circ.c_f;
                    cf.z0 = circ.z0;
                    purcell_bias(&cf, rad(f)).map(|d| d.t1 * 1e6)
                })
                .collect::<Result<Vec<_>>>()?;
            plot = Some(Plot {
                title: "Purcell decay through the bias electrode".into(),
                x_label: "ω_e/2π (GHz)".into(),
                y_label: "T1 (μs)".into(),
                series: vec![Series { label: "T1".into(), x: xs.iter().map(|x| x * 1e-9).collect(), y: ys }],
            });
            json!({
                "circuit": circ,
                "filter_resonance_hz": circ.filter_resonance().hz(),
                "gamma_1_per_s": d.gamma_1,
                "t1_s": d.t1,
            })
        }
        CalcCmd::Spin(a) => {
            let s = spin_couplings(rad(a.gc), a.dbz_dx, a.ax, rad(a.delta_cs), &c)?;
            json!({ "g_cs_hz": s.g_cs / TAU, "g_s_hz": s.g_s / TAU })
        }
        CalcCmd::Depression(a) => json!({ "depression_m": helium_depression(a.height, a.width, &c)? }),
        CalcCmd::Cooperativity(a) => json!({ "cooperativity": cooperativity(rad(a.g), rad(a.kappa), rad(a.gamma2))? }),
        CalcCmd::Dispersive(a) => {
            let res = a.resonator.resolve(&ctx.cfg.resonator)?;
            let wr = res.omega_r().value();
            let fe = dispersive_electron_freq(rad(a.shift), rad(a.g), wr)?;
            json!({ "fe_hz": fe.hz(), "fr_hz": wr / TAU })
        }
    };
    let report = ctx.out.with_run(body.clone());
    let stem = format!("calc_{}", cmd.name().replace('-', "_"));
    if ctx.out.has_dir() {
        if ctx.out.wants(Format::Json) {
            ctx.out.json(&format!("{stem}.json"), body)?;
        }
        if let (Some(p), true) = (&plot, ctx.out.wants(Format::Svg)) {
            ctx.out.svg(&format!("{stem}.svg"), p)?;
        }
    }
    Ok(report)
}
