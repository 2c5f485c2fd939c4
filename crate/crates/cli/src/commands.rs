use std::f64::consts::TAU;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::Path;

use clap::ValueEnum;
use genfreq::estimators::{
    compare as compare_traces, estimate_geometric, srf_pll, DiffScheme, EstimatorConfig, FilterPlacement,
    FrequencyTrace, PllConfig,
};
use genfreq::io::{
    fmt_f64, read_trace, read_waveform, write_curve, write_report, write_trace, write_waveform, Metadata,
};
use genfreq::signals::{
    dc_exponential, dq_to_stationary, dq_transient_example, fault_scenario, sample, single_phase, three_phase_balanced,
    FaultParams, SampledSignal,
};

use crate::config::Config;
use crate::error::CliError;
use crate::{CompareArgs, EstimateArgs, GenerateArgs, Method, Placement, Scenario, Scheme};

pub const SEED_ENV: &str = "GENFREQ_SEED";

fn enum_setting<E: ValueEnum>(cfg: &Config, key: &str, flag: Option<E>, default: E) -> Result<E, CliError> {
    if let Some(e) = flag {
        return Ok(e);
    }
    match cfg.raw(key) {
        None => Ok(default),
        Some(s) => {
            E::from_str(s, true).map_err(|_| CliError::Usage(format!("config key `{key}`: invalid value `{s}`")))
        }
    }
}

/// `--seed`, then `$GENFREQ_SEED`, then the config file, then 0.
fn resolve_seed(cfg: &Config, flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(raw) = std::env::var(SEED_ENV) {
        return raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{raw}` is not an unsigned integer")));
    }
    cfg.resolve("seed", None, 0)
}

/// Writes `bytes` to `path`, or to stdout when `path` is `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::Data(format!("cannot write stdout: {e}"))),
    }
}

fn meta(pairs: &[(&str, String)]) -> Metadata {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub fn generate(a: &GenerateArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.config.as_deref())?;
    let default_dur = match a.scenario {
        Scenario::Fault => 0.7,
        Scenario::Example3 => 2.0,
        Scenario::Dc => 1.0,
        Scenario::Example1 | Scenario::Example2 => 0.1,
    };
    let default_v = if a.scenario == Scenario::Dc { 100.0 } else { 12e3 };
    let v = cfg.resolve("v", a.v, default_v)?;
    let f = cfg.resolve("f", a.f, 60.0)?;
    let default_fs = if a.scenario == Scenario::Fault { 20_000.0 } else { 10_000.0 };
    let fs = cfg.resolve("fs", a.fs, default_fs)?;
    let dur = cfg.resolve("dur", a.dur, default_dur)?;
    let t0 = cfg.resolve("t0", a.t0, 0.0)?;
    let noise = cfg.resolve("noise", a.noise, 0.0)?;
    let seed = resolve_seed(&cfg, a.seed)?;
    let omega0 = TAU * f;
    let name = a.scenario.to_possible_value().expect("no skipped variants").get_name().to_string();

    let mut extra = vec![("scenario", name)];
    let signal = match a.scenario {
        Scenario::Example1 => {
            let phi = cfg.resolve("phi", a.phi, 0.0)?;
            extra.extend([("v", fmt_f64(v)), ("f", fmt_f64(f)), ("phi", fmt_f64(phi))]);
            single_phase(v, omega0, phi)
        }
        Scenario::Example2 => {
            extra.extend([("v", fmt_f64(v)), ("f", fmt_f64(f))]);
            three_phase_balanced(v, omega0)
        }
        Scenario::Example3 => {
            extra.push(("f", fmt_f64(f)));
            dq_transient_example(omega0).and_then(|dq| dq_to_stationary(&dq, omega0))
        }
        Scenario::Dc => {
            let decay = cfg.resolve("decay", a.decay, 0.0)?;
            extra.extend([("v", fmt_f64(v)), ("decay", fmt_f64(decay))]);
            dc_exponential(v, decay)
        }
        Scenario::Fault => {
            let p = FaultParams {
                v,
                omega0,
                t_fault: cfg.resolve("tfault", a.tfault, 0.2)?,
                t_clear: cfg.resolve("tclear", a.tclear, 0.3)?,
                sag: cfg.resolve("sag", a.sag, 0.4)?,
                phase_jump: cfg.resolve("jump", a.jump, 0.3)?,
                harmonic3: cfg.resolve("harmonic", a.harmonic, 0.05)?,
            };
            extra.extend([
                ("v", fmt_f64(v)),
                ("f", fmt_f64(f)),
                ("tfault", fmt_f64(p.t_fault)),
                ("tclear", fmt_f64(p.t_clear)),
                ("sag", fmt_f64(p.sag)),
                ("jump", fmt_f64(p.phase_jump)),
                ("harmonic", fmt_f64(p.harmonic3)),
            ]);
            fault_scenario(&p)
        }
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    if !(dur > 0.0) {
        return Err(CliError::Usage(format!("--dur must be positive, got {dur}")));
    }
    let sig = sample(&signal, fs, t0, t0 + dur, noise, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    extra.extend([("noise", fmt_f64(noise)), ("seed", seed.to_string())]);

    let mut buf = Vec::new();
    write_waveform(&mut buf, &sig, &meta(&extra)).map_err(|e| CliError::data("serialize waveform", e))?;
    emit(a.out.as_deref(), &buf)
}

fn load_waveform(path: &Path) -> Result<SampledSignal, CliError> {
    let f = fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    read_waveform(BufReader::new(f)).map_err(|e| CliError::data(&path.display().to_string(), e))
}

fn load_trace(path: &Path) -> Result<FrequencyTrace, CliError> {
    let f = fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    read_trace(BufReader::new(f)).map_err(|e| CliError::data(&path.display().to_string(), e))
}

pub fn estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.config.as_deref())?;
    let method = enum_setting(&cfg, "method", a.method, Method::Geo)?;

    // resolve every setting before touching the input or any output
    let est_cfg = EstimatorConfig {
        diff_scheme: match enum_setting(&cfg, "scheme", a.scheme, Scheme::Central)? {
            Scheme::Central => DiffScheme::Central,
            Scheme::Backward => DiffScheme::Backward,
        },
        filter_tau: cfg.resolve("tau", a.tau, EstimatorConfig::default().filter_tau)?,
        mask_threshold: cfg.lookup("mask", a.mask)?,
        placement: match enum_setting(&cfg, "placement", a.placement, Placement::Output)? {
            Placement::Output => FilterPlacement::Output,
            Placement::Input => FilterPlacement::Input,
            Placement::Both => FilterPlacement::Both,
        },
        report_hz: true,
    };
    est_cfg.validate()?;
    let defaults = PllConfig::default();
    let kp = cfg.resolve("kp", a.kp, defaults.kp)?;
    let ki = cfg.resolve("ki", a.ki, defaults.ki)?;
    let f_init = cfg.resolve("f_init", a.f_init, defaults.omega_init / TAU)?;

    let sig = load_waveform(&a.input)?;
    let (trace, mut extra) = match method {
        Method::Geo => {
            let tr = estimate_geometric(&sig, &est_cfg)?;
            let tag = format!("{:?}", est_cfg.placement).to_lowercase();
            (tr, vec![("method", "geo".to_string()), ("tau", fmt_f64(est_cfg.filter_tau)), ("placement", tag)])
        }
        Method::Pll => {
            if sig.dim() != 3 {
                return Err(CliError::Data(format!(
                    "pll needs a three-phase (3-channel) waveform, {} has {}",
                    a.input.display(),
                    sig.dim()
                )));
            }
            let pll = PllConfig { kp, ki, ..PllConfig::for_signal(&sig, TAU * f_init)? };
            pll.validate()?;
            let tr = srf_pll(&sig, &pll)?;
            (tr, vec![("method", "pll".to_string()), ("kp", fmt_f64(kp)), ("ki", fmt_f64(ki))])
        }
    };
    extra.push(("source", a.input.display().to_string()));

    let mut out = Vec::new();
    write_trace(&mut out, &trace, &meta(&extra)).map_err(|e| CliError::data("serialize trace", e))?;
    let curve = match &a.emit_curve {
        Some(_) => {
            let mut c = Vec::new();
            write_curve(&mut c, &sig, &trace).map_err(|e| CliError::data("serialize curve", e))?;
            Some(c)
        }
        None => None,
    };
    emit(a.out.as_deref(), &out)?;
    if let (Some(path), Some(bytes)) = (&a.emit_curve, curve) {
        emit(Some(path), &bytes)?;
    }
    Ok(())
}

fn parse_window(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("window must be `start,end` with start < end, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let (t0, t1): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(t0 < t1) {
        return Err(bad());
    }
    Ok((t0, t1))
}

pub fn compare(a: &CompareArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.config.as_deref())?;
    let window = cfg.lookup("window", a.window.clone())?.map(|s| parse_window(&s)).transpose()?;
    let (ta, tb) = (load_trace(&a.trace_a)?, load_trace(&a.trace_b)?);
    let window = window.unwrap_or_else(|| (ta.t[0], *ta.t.last().expect("traces are non-empty")));
    let report = compare_traces(&ta, &tb, window).map_err(|e| CliError::Data(e.to_string()))?;

    let mut csv = Vec::new();
    write_report(&mut csv, &report).map_err(|e| CliError::data("serialize report", e))?;
    if let Some(p) = &a.out {
        emit(Some(p), &csv)?;
    }
    let text = format!(
        "window        [{}, {}] s\nsamples       {}\nrmse omega    {:.6e} rad/s\nmax deviation {:.6e} rad/s\n\
         mean A        {:.6} Hz\nmean B        {:.6} Hz\nsettle A      {:.6} s\nsettle B      {:.6} s\n",
        report.window.0,
        report.window.1,
        report.n_samples,
        report.rmse_omega,
        report.max_abs_dev,
        report.mean_a / TAU,
        report.mean_b / TAU,
        report.settle_time_a,
        report.settle_time_b
    );
    emit(None, text.as_bytes())
}
