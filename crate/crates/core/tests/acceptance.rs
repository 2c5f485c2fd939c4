//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use genfreq::curve::{curvature, CurveState};
use genfreq::estimators::{compare, estimate_geometric, srf_pll, EstimatorConfig, PllConfig};
use genfreq::freq::{current_frequency, frequency_from_power, generalized_frequency};
use genfreq::ga::{apply_orthogonal, geometric_product, inner, wedge, Matrix, VecN};
use genfreq::signals::{
    dc_exponential, dc_signal, dq_transient_example, fault_scenario, sample, single_phase, three_phase_balanced,
    AnalyticSignal, FaultParams, FAULT_RAMP,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const W0: f64 = 120.0 * PI;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn v(c: &[f64]) -> VecN {
    VecN::from_slice(c).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> VecN {
    VecN::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// Haar-ish random orthogonal matrix from the QR factorization of a Gaussian-like matrix.
fn random_orthogonal(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let q = a.qr().q();
    Matrix::from_rows(&(0..dim).map(|i| (0..dim).map(|j| q[(i, j)]).collect()).collect::<Vec<_>>()).unwrap()
}

/// Random smooth signal: a sum of sinusoids per channel plus an offset, with exact derivatives.
fn random_smooth(rng: &mut ChaCha8Rng, dim: usize) -> AnalyticSignal {
    let terms: Vec<Vec<(f64, f64, f64)>> = (0..dim)
        .map(|_| {
            (0..3)
                .map(|_| (rng.random_range(0.1..2.0), rng.random_range(1.0..400.0), rng.random_range(0.0..TAU)))
                .collect()
        })
        .collect();
    let offsets: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let channels = (0..dim).map(|c| format!("x{c}")).collect();
    AnalyticSignal::new(channels, "random smooth", move |t| {
        let mut val = offsets.clone();
        let mut der = vec![0.0; offsets.len()];
        for (c, ch) in terms.iter().enumerate() {
            for &(a, w, p) in ch {
                val[c] += a * (w * t + p).sin();
                der[c] += a * w * (w * t + p).cos();
            }
        }
        (val, der)
    })
    .unwrap()
}

fn ac1_example1() -> Outcome {
    let start = Instant::now();
    let s = single_phase(12e3, W0, 0.0).map_err(|e| e.to_string())?;
    let (mut worst_rho, mut worst_w) = (0.0_f64, 0.0_f64);
    for k in 0..1000 {
        let t = k as f64 * 1e-4;
        let (x, xd) = s.eval(t).unwrap();
        let g = generalized_frequency(&x, &xd).unwrap();
        worst_rho = worst_rho.max(g.rho.abs() / W0);
        worst_w = worst_w.max((g.omega_mag - W0).abs() / W0);
    }
    let elapsed = start.elapsed();
    ensure(worst_rho <= 1e-10, || format!("|rho|/w0 = {worst_rho:e}"))?;
    ensure(worst_w <= 1e-10, || format!("omega rel err {worst_w:e}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("max |rho|/w0 {worst_rho:.1e}, max omega rel err {worst_w:.1e}, {elapsed:?}"))
}

fn ac2_example2() -> Outcome {
    let big_v = 12e3;
    let s = three_phase_balanced(big_v, W0).unwrap();
    let (mut e_mag, mut e_w, mut e_rho) = (0.0_f64, 0.0_f64, 0.0_f64);
    for k in 0..1000 {
        let (x, xd) = s.eval(k as f64 * 3.3e-5).unwrap();
        e_mag = e_mag.max((x.norm_squared() - 1.5 * big_v * big_v).abs() / (1.5 * big_v * big_v));
        let g = generalized_frequency(&x, &xd).unwrap();
        e_w = e_w.max((g.omega_mag - W0).abs() / W0);
        e_rho = e_rho.max(g.rho.abs() / W0);
    }
    ensure(e_mag <= 1e-12, || format!("|v|^2 rel err {e_mag:e}"))?;
    ensure(e_w <= 1e-10, || format!("omega rel err {e_w:e}"))?;
    ensure(e_rho <= 1e-10, || format!("|rho|/w0 {e_rho:e}"))?;
    Ok(format!("|v|^2 {e_mag:.1e}, omega {e_w:.1e}, rho {e_rho:.1e}"))
}

fn ac3_example3() -> Outcome {
    let s = dq_transient_example(W0).unwrap();
    // independent closed forms
    let oracle = |t: f64| {
        let (e, c, sn) = ((-t).exp(), (TAU * t).cos(), (TAU * t).sin());
        let vd = 1e3 * (10.0 + e * c);
        let vq = 1e3 * e * sn;
        let vdd = 1e3 * (-e * c - TAU * e * sn);
        let vqd = 1e3 * (-e * sn + TAU * e * c);
        let n2 = vd * vd + vq * vq;
        ((vd * vdd + vq * vqd) / n2, W0 + (vqd * vd - vdd * vq) / n2)
    };
    let (mut e_rho, mut e_w) = (0.0_f64, 0.0_f64);
    for k in 0..=5000 {
        let t = k as f64 * 1e-3;
        let (x, xd) = s.eval(t).unwrap();
        let g = generalized_frequency(&x, &xd).unwrap();
        let (rho_ref, w_ref) = oracle(t);
        e_rho = e_rho.max((g.rho - rho_ref).abs() / rho_ref.abs().max(1.0));
        e_w = e_w.max((g.omega_mag - w_ref).abs() / w_ref);
    }
    let (x, xd) = s.eval(0.0).unwrap();
    let w0 = generalized_frequency(&x, &xd).unwrap().omega_mag;
    let spot = W0 + TAU / 11.0;
    ensure(e_rho <= 1e-10, || format!("rho rel err {e_rho:e}"))?;
    ensure(e_w <= 1e-10, || format!("omega rel err {e_w:e}"))?;
    ensure((w0 - spot).abs() <= 1e-10 * spot, || format!("omega(0) = {w0}, expected {spot}"))?;
    Ok(format!("rho {e_rho:.1e}, omega {e_w:.1e}, omega(0) = {w0:.9} rad/s"))
}

fn ac4_dc() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut signals = vec![dc_exponential(100.0, -2.0).unwrap(), dc_exponential(3.0, 0.7).unwrap()];
    for _ in 0..5 {
        let (a, b, w) = (rng.random_range(2.0..5.0), rng.random_range(0.1..1.0), rng.random_range(1.0..50.0));
        signals.push(dc_signal(move |t| a + b * (w * t).sin(), move |t| b * w * (w * t).cos()).unwrap());
    }
    let mut worst = 0.0_f64;
    for s in &signals {
        for k in 0..200 {
            let (x, xd) = s.eval(k as f64 * 7e-3).unwrap();
            let g = generalized_frequency(&x, &xd).unwrap();
            ensure(g.omega_mag == 0.0, || format!("omega_mag = {}", g.omega_mag))?;
            let r = xd[0] / x[0];
            worst = worst.max((g.rho - r).abs() / r.abs().max(1.0));
        }
    }
    ensure(worst <= 1e-12, || format!("rho err {worst:e}"))?;
    Ok(format!("omega exactly 0, rho err {worst:.1e}"))
}

fn ac5_resistive_duality() -> Outcome {
    let r = 7.3;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for dim in 1..=6 {
        let s = random_smooth(&mut rng, dim);
        for k in 0..100 {
            let (i, id) = s.eval(k as f64 * 1.7e-3).unwrap();
            let gv = generalized_frequency(&i.scale(r), &id.scale(r)).unwrap();
            let gi = current_frequency(&i, &id).unwrap();
            let scale = (gi.rho.powi(2) + gi.omega_mag.powi(2)).sqrt().max(1.0);
            worst = worst.max((gv.rho - gi.rho).abs() / scale);
            for (a, b) in gv.omega.coeffs().iter().zip(gi.omega.coeffs()) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    ensure(worst <= 1e-12, || format!("componentwise err {worst:e}"))?;
    Ok(format!("max componentwise err {worst:.1e}"))
}

fn ac6_capacitor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut signals: Vec<AnalyticSignal> = (2..=5).map(|d| random_smooth(&mut rng, d)).collect();
    signals.push(single_phase(12e3, W0, 0.0).unwrap());
    signals.push(three_phase_balanced(12e3, W0).unwrap());
    let mut worst = 0.0_f64;
    for c in [1e-6, 1.0] {
        for s in &signals {
            for k in 0..200 {
                let (x, xd) = s.eval(k as f64 * 1.3e-4).unwrap();
                let g1 = frequency_from_power(&x, &xd.scale(c), c).unwrap();
                let g2 = generalized_frequency(&x, &xd).unwrap();
                // natural scale |v'| / |v| = sqrt(rho^2 + omega^2)
                let scale = xd.magnitude() / x.magnitude();
                worst = worst.max((g1.rho - g2.rho).abs() / scale);
                worst = worst.max((g1.omega_mag - g2.omega_mag).abs() / scale);
                for (a, b) in g1.omega.coeffs().iter().zip(g2.omega.coeffs()) {
                    worst = worst.max((a - b).abs() / scale);
                }
            }
        }
    }
    ensure(worst <= 1e-14, || format!("err relative to |v'|/|v|: {worst:e}"))?;
    Ok(format!("max err {worst:.1e} (relative to |v'|/|v|)"))
}

fn ac7_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut e_rho, mut e_w, mut e_k) = (0.0_f64, 0.0_f64, 0.0_f64);
    for n in 0..100 {
        let dim = 2 + n % 5;
        let (x, xd) = (random_vec(&mut rng, dim), random_vec(&mut rng, dim));
        let q = random_orthogonal(&mut rng, dim);
        let (qx, qxd) = (apply_orthogonal(&x, &q).unwrap(), apply_orthogonal(&xd, &q).unwrap());
        let (g, gq) = (generalized_frequency(&x, &xd).unwrap(), generalized_frequency(&qx, &qxd).unwrap());
        e_rho = e_rho.max((g.rho - gq.rho).abs());
        e_w = e_w.max((g.omega_mag - gq.omega_mag).abs());
        let k = curvature(&CurveState::new(x.clone(), xd.clone()).unwrap()).unwrap();
        let kq = curvature(&CurveState::new(qx, qxd).unwrap()).unwrap();
        e_k = e_k.max((k - kq).abs() / k.max(1.0));
    }
    ensure(e_rho <= 1e-10 && e_w <= 1e-10 && e_k <= 1e-10, || {
        format!("rho {e_rho:e}, omega {e_w:e}, curvature {e_k:e}")
    })?;
    Ok(format!("rho {e_rho:.1e}, omega {e_w:.1e}, curvature {e_k:.1e}"))
}

fn ac8_sampled_pipeline() -> Outcome {
    let start = Instant::now();
    let fs = 10_000.0;
    let mut notes = Vec::new();
    for (name, s) in
        [("example1", single_phase(12e3, W0, 0.0).unwrap()), ("example2", three_phase_balanced(12e3, W0).unwrap())]
    {
        let clean = sample(&s, fs, 0.0, 0.5, 0.0, 0).unwrap();
        let tr = estimate_geometric(&clean, &EstimatorConfig::unfiltered()).unwrap();
        let hz = tr.omega_hz();
        let worst = (0..tr.len()).filter(|&k| tr.valid[k]).map(|k| (hz[k] - 60.0).abs() / 60.0).fold(0.0, f64::max);
        ensure(worst <= 1e-3, || format!("{name} noiseless rel err {worst:e}"))?;

        let noisy = sample(&s, fs, 0.0, 0.5, 0.005 * 12e3, 88).unwrap();
        let cfg = EstimatorConfig { filter_tau: 5e-3, ..EstimatorConfig::default() };
        let tr = estimate_geometric(&noisy, &cfg).unwrap();
        let hz = tr.omega_hz();
        let worst_noisy = (0..tr.len())
            .filter(|&k| tr.valid[k] && tr.t[k] >= 0.05)
            .map(|k| (hz[k] - 60.0).abs() / 60.0)
            .fold(0.0, f64::max);
        ensure(worst_noisy <= 1e-2, || format!("{name} noisy rel err {worst_noisy:e}"))?;
        notes.push(format!("{name}: {worst:.1e} clean, {worst_noisy:.1e} noisy"));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{}; {elapsed:?}", notes.join("; ")))
}

fn ac9_fault_surrogate() -> Outcome {
    let p = FaultParams::default();
    let f = fault_scenario(&p).unwrap();
    let fs = 20_000.0;
    let sig = sample(&f, fs, 0.0, 0.7, 0.0, 0).unwrap();
    let geo = estimate_geometric(&sig, &EstimatorConfig::default()).unwrap();
    let pll = srf_pll(&sig, &PllConfig::for_signal(&sig, p.omega0).unwrap()).unwrap();

    let window = (p.t_clear + 0.2, 0.7);
    let report = compare(&geo, &pll, window).map_err(|e| e.to_string())?;
    for (name, tr) in [("geometric", &geo), ("pll", &pll)] {
        let hz = tr.omega_hz();
        let worst = tr.valid_indices(window.0, window.1).iter().map(|&k| (hz[k] - 60.0).abs()).fold(0.0, f64::max);
        ensure(worst <= 0.01, || format!("{name} deviates {worst} Hz after clearance"))?;
    }
    let (_, sd_pre) = geo.omega_stats(0.05, p.t_fault).unwrap();
    let (_, sd_fault) = geo.omega_stats(p.t_fault + FAULT_RAMP, p.t_clear).unwrap();
    ensure(sd_fault > 10.0 * sd_pre, || format!("fault std {sd_fault} vs pre-fault {sd_pre}"))?;
    Ok(format!(
        "post-clear means {:.5} / {:.5} Hz, rmse {:.2e} rad/s, settle {:.4} s / {:.4} s, std fault/pre {:.2e}/{:.2e}",
        report.mean_a / TAU,
        report.mean_b / TAU,
        report.rmse_omega,
        report.settle_time_a,
        report.settle_time_b,
        sd_fault,
        sd_pre
    ))
}

fn ac10_geometry_oracles() -> Outcome {
    let mut worst_k = 0.0_f64;
    for r in [0.1, 1.0, 12000.0] {
        for k in 0..50 {
            let th = 0.13 * k as f64;
            let (s, c) = th.sin_cos();
            let state =
                CurveState::new(v(&[-r * W0 * s, r * W0 * c]), v(&[-r * W0 * W0 * c, -r * W0 * W0 * s])).unwrap();
            worst_k = worst_k.max((curvature(&state).unwrap() - 1.0 / r).abs());
        }
    }
    ensure(worst_k <= 1e-12, || format!("circle curvature err {worst_k:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_l = 0.0_f64;
    for n in 0..1000 {
        let dim = 1 + n % 6;
        let (x, y) = (random_vec(&mut rng, dim), random_vec(&mut rng, dim));
        let lhs = x.norm_squared() * y.norm_squared();
        let rhs = inner(&x, &y).unwrap().powi(2) + wedge(&x, &y).unwrap().magnitude().powi(2);
        worst_l = worst_l.max((lhs - rhs).abs());
    }
    ensure(worst_l <= 1e-10, || format!("Lagrange identity err {worst_l:e}"))?;

    let mut worst_c = 0.0_f64;
    for _ in 0..1000 {
        let (x, y) = (random_vec(&mut rng, 2), random_vec(&mut rng, 2));
        let z = Complex64::new(x[0], x[1]).conj() * Complex64::new(y[0], y[1]);
        let gp = geometric_product(&x, &y).unwrap();
        worst_c = worst_c.max((gp.scalar - z.re).abs()).max((gp.bivector.coeffs()[0] - z.im).abs());
    }
    ensure(worst_c <= 1e-12, || format!("complex oracle err {worst_c:e}"))?;
    Ok(format!("circle {worst_k:.1e}, Lagrange {worst_l:.1e}, complex {worst_c:.1e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 single-phase analytic frequency", ac1_example1),
        ("AC2 balanced three-phase analytic frequency", ac2_example2),
        ("AC3 dq transient closed forms", ac3_example3),
        ("AC4 dc signals", ac4_dc),
        ("AC5 resistive voltage/current duality", ac5_resistive_duality),
        ("AC6 frequency from instantaneous power", ac6_capacitor),
        ("AC7 coordinate invariance", ac7_invariance),
        ("AC8 sampled pipeline accuracy", ac8_sampled_pipeline),
        ("AC9 fault scenario vs SRF-PLL", ac9_fault_surrogate),
        ("AC10 geometry oracles", ac10_geometry_oracles),
    ];
    let mut failures = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failures.push(name);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures.len(), criteria.len());
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
