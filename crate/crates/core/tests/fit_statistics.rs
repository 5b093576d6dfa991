use std::f64::consts::TAU;

use helidot_core::fitters::{fit_lorentzian_dip, DipInit};
use helidot_core::synth::{synth_dip, DipSpec};

fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}

fn dip() -> DipSpec {
    DipSpec {
        omega_e: mhz(8660.0),
        gamma: mhz(102.0),
        depth: 0.3,
        offset: 1.0,
        center: mhz(8660.0),
        half_span: mhz(500.0),
        points: 201,
        noise_frac: 0.01,
    }
}

const NAMES: [&str; 4] = ["omega_e", "gamma", "depth", "offset"];

fn truth(s: &DipSpec) -> [f64; 4] {
    [s.omega_e, s.gamma, s.depth, s.offset]
}

#[test]
fn lorentzian_fit_is_unbiased() {
    let spec = dip();
    let n = 100;
    let mut sum = [0.0; 4];
    let mut sig = [0.0; 4];
    for seed in 0..n {
        let (x, y) = synth_dip(&spec, seed).unwrap();
        let fit = fit_lorentzian_dip(&x, &y, &DipInit::default()).unwrap();
        assert!(fit.converged);
        for (k, name) in NAMES.iter().enumerate() {
            sum[k] += fit.value(name);
            sig[k] += fit.sigma(name);
        }
    }
    for k in 0..4 {
        let mean = sum[k] / n as f64;
        let sigma = sig[k] / n as f64;
        let bias = (mean - truth(&spec)[k]).abs();
        assert!(bias < 0.5 * sigma, "{}: bias {bias:e}, σ {sigma:e}", NAMES[k]);
    }
}

#[test]
fn one_sigma_coverage() {
    let spec = dip();
    let n = 200;
    let mut inside = [0usize; 4];
    for seed in 1000..1000 + n {
        let (x, y) = synth_dip(&spec, seed).unwrap();
        let fit = fit_lorentzian_dip(&x, &y, &DipInit::default()).unwrap();
        for (k, name) in NAMES.iter().enumerate() {
            if (fit.value(name) - truth(&spec)[k]).abs() <= fit.sigma(name) {
                inside[k] += 1;
            }
        }
    }
    for k in 0..4 {
        let frac = inside[k] as f64 / n as f64;
        assert!((0.55..=0.80).contains(&frac), "{}: {frac}", NAMES[k]);
    }
}

#[test]
fn fits_are_bit_identical() {
    let (x, y) = synth_dip(&dip(), 7).unwrap();
    let a = fit_lorentzian_dip(&x, &y, &DipInit::default()).unwrap();
    let b = fit_lorentzian_dip(&x, &y, &DipInit::default()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn zero_depth_is_consistent_with_zero() {
    let mut spec = dip();
    spec.depth = 0.0;
    let (x, mut y) = synth_dip(&spec, 1).unwrap();
    // noise scaled to 1% of a 0.3 dip
    let mut rng = helidot_core::synth::rng_from_seed(1);
    use rand_distr::{Distribution, Normal};
    let nd = Normal::new(0.0, 0.003).unwrap();
    y.iter_mut().for_each(|v| *v += nd.sample(&mut rng));
    let init = DipInit { omega_e: Some(spec.omega_e), gamma: Some(spec.gamma), depth: Some(0.01), offset: None };
    let fit = fit_lorentzian_dip(&x, &y, &init).unwrap();
    assert!(fit.value("depth").abs() < 3.0 * fit.sigma("depth"), "{fit:?}");
}
