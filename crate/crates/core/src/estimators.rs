//! Frequency estimation from sampled waveforms.
//!
//! The geometric estimator differentiates the samples numerically, evaluates
//! the generalized frequency sample by sample and smooths the result with a
//! first-order low-pass filter. [`srf_pll`] is the conventional synchronous
//! reference frame PLL used as a baseline, and [`compare`] summarizes how two
//! traces agree over a time window.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::freq::generalized_frequency;
use crate::ga::{Bivector, VecN};
use crate::signals::SampledSignal;

/// Finite-difference stencil used by [`differentiate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiffScheme {
    /// Second-order central differences, three-point one-sided stencils at both ends.
    #[default]
    Central,
    /// Causal second-order backward differences `(3x_k - 4x_{k-1} + x_{k-2}) / 2h`.
    Backward,
}

impl DiffScheme {
    /// Samples whose derivative comes from a boundary stencil.
    pub fn is_boundary(self, k: usize, n: usize) -> bool {
        match self {
            DiffScheme::Central => k == 0 || k + 1 == n,
            DiffScheme::Backward => k < 2,
        }
    }
}

/// Where the first-order filter is applied in [`estimate_geometric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterPlacement {
    /// Smooth the rho and Omega traces.
    #[default]
    Output,
    /// Smooth the samples and their derivatives before evaluating the frequency.
    Input,
    Both,
}

impl FilterPlacement {
    fn input(self) -> bool {
        matches!(self, FilterPlacement::Input | FilterPlacement::Both)
    }

    fn output(self) -> bool {
        matches!(self, FilterPlacement::Output | FilterPlacement::Both)
    }
}

/// Relative mask threshold used when [`EstimatorConfig::mask_threshold`] is `None`.
pub const DEFAULT_MASK_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub diff_scheme: DiffScheme,
    /// Time constant of the first-order filter, s. Zero disables filtering.
    pub filter_tau: f64,
    /// Samples with `|v|` at or below this are masked, V. `None` selects
    /// `DEFAULT_MASK_REL * max |v|` over the record.
    pub mask_threshold: Option<f64>,
    pub placement: FilterPlacement,
    /// Present frequencies in Hz rather than rad/s in summaries.
    pub report_hz: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            diff_scheme: DiffScheme::Central,
            filter_tau: 1e-3,
            mask_threshold: None,
            placement: FilterPlacement::Output,
            report_hz: true,
        }
    }
}

impl EstimatorConfig {
    pub fn unfiltered() -> Self {
        EstimatorConfig { filter_tau: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.filter_tau >= 0.0 && self.filter_tau.is_finite()) {
            return Err(Error::param(format!("filter_tau must be >= 0, got {}", self.filter_tau)));
        }
        if let Some(m) = self.mask_threshold {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::param(format!("mask_threshold must be >= 0, got {m}")));
            }
        }
        Ok(())
    }
}

/// Per-sample frequency estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTrace {
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
    pub omega_mag: Vec<f64>,
    pub omega_biv: Vec<Bivector>,
    pub valid: Vec<bool>,
}

impl FrequencyTrace {
    pub fn new(
        t: Vec<f64>,
        rho: Vec<f64>,
        omega_mag: Vec<f64>,
        omega_biv: Vec<Bivector>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let n = t.len();
        for len in [rho.len(), omega_mag.len(), omega_biv.len(), valid.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { left: n, right: len });
            }
        }
        Ok(FrequencyTrace { t, rho, omega_mag, omega_biv, valid })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn omega_hz(&self) -> Vec<f64> {
        self.omega_mag.iter().map(|w| w / TAU).collect()
    }

    /// Indices of valid samples with `t0 <= t <= t1`.
    pub fn valid_indices(&self, t0: f64, t1: f64) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.valid[k] && self.t[k] >= t0 && self.t[k] <= t1).collect()
    }

    /// Mean and sample standard deviation of `omega_mag` over valid samples in `[t0, t1]`.
    pub fn omega_stats(&self, t0: f64, t1: f64) -> Option<(f64, f64)> {
        let idx = self.valid_indices(t0, t1);
        if idx.is_empty() {
            return None;
        }
        let n = idx.len() as f64;
        let mean = idx.iter().map(|&k| self.omega_mag[k]).sum::<f64>() / n;
        let var = if idx.len() > 1 {
            idx.iter().map(|&k| (self.omega_mag[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Some((mean, var.sqrt()))
    }
}

/// Derivative of every channel; output has the input's length and time base.
pub fn differentiate(sig: &SampledSignal, scheme: DiffScheme) -> Result<SampledSignal> {
    let n = sig.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let half_fs = 0.5 * sig.sample_rate();
    let x = sig.rows();
    let dim = sig.dim();
    let stencil = |k: usize| -> Vec<f64> {
        let combine = |a: &[f64], ca: f64, b: &[f64], cb: f64, c: &[f64], cc: f64| -> Vec<f64> {
            (0..dim).map(|i| (ca * a[i] + cb * b[i] + cc * c[i]) * half_fs).collect()
        };
        let forward = || combine(&x[0], -3.0, &x[1], 4.0, &x[2], -1.0);
        match scheme {
            DiffScheme::Central if k == 0 => forward(),
            DiffScheme::Central if k == n - 1 => combine(&x[n - 1], 3.0, &x[n - 2], -4.0, &x[n - 3], 1.0),
            DiffScheme::Central => (0..dim).map(|i| (x[k + 1][i] - x[k - 1][i]) * half_fs).collect(),
            DiffScheme::Backward if k == 0 => forward(),
            DiffScheme::Backward if k == 1 => (0..dim).map(|i| (x[2][i] - x[0][i]) * half_fs).collect(),
            DiffScheme::Backward => combine(&x[k], 3.0, &x[k - 1], -4.0, &x[k - 2], 1.0),
        }
    };
    sig.with_samples((0..n).map(stencil).collect())
}

/// First-order low-pass `y[k] = y[k-1] + a (u[k] - y[k-1])`, `a = dt / (tau + dt)`,
/// started at `y[0] = u[0]`.
pub fn lowpass(series: &[f64], fs: f64, tau: f64) -> Vec<f64> {
    let mut f = Lowpass::new(fs, tau);
    series.iter().map(|&u| f.step(u)).collect()
}

/// Streaming form of [`lowpass`].
#[derive(Debug, Clone)]
struct Lowpass {
    alpha: f64,
    state: Option<f64>,
}

impl Lowpass {
    fn new(fs: f64, tau: f64) -> Self {
        let dt = 1.0 / fs;
        Lowpass { alpha: dt / (tau + dt), state: None }
    }

    fn step(&mut self, u: f64) -> f64 {
        let y = match self.state {
            None => u,
            Some(prev) => prev + self.alpha * (u - prev),
        };
        self.state = Some(y);
        y
    }
}

fn filter_channels(rows: &[Vec<f64>], fs: f64, tau: f64) -> Vec<Vec<f64>> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut filters = vec![Lowpass::new(fs, tau); dim];
    rows.iter().map(|r| r.iter().zip(&mut filters).map(|(&u, f)| f.step(u)).collect()).collect()
}

/// Generalized frequency of every sample of `sig`.
///
/// Samples whose derivative uses a boundary stencil, and samples with `|v|` at
/// or below the mask threshold, are flagged invalid. The output filter runs
/// over valid samples only and holds its state across invalid ones. For
/// `Output` placement the filter acts on rho and on the bivector coefficients;
/// `omega_mag` is the magnitude of the filtered bivector.
pub fn estimate_geometric(sig: &SampledSignal, cfg: &EstimatorConfig) -> Result<FrequencyTrace> {
    cfg.validate()?;
    let n = sig.len();
    let fs = sig.sample_rate();
    let deriv = differentiate(sig, cfg.diff_scheme)?;

    let magnitudes: Vec<f64> = sig.rows().iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let threshold =
        cfg.mask_threshold.unwrap_or_else(|| DEFAULT_MASK_REL * magnitudes.iter().cloned().fold(0.0, f64::max));
    if magnitudes.iter().all(|&m| m <= threshold) {
        return Err(Error::AllDegenerate);
    }

    let smooth = cfg.filter_tau > 0.0;
    let (values, derivs) = if smooth && cfg.placement.input() {
        (filter_channels(sig.rows(), fs, cfg.filter_tau), filter_channels(deriv.rows(), fs, cfg.filter_tau))
    } else {
        (sig.rows().to_vec(), deriv.rows().to_vec())
    };

    let dim = sig.dim();
    let mut rho = Vec::with_capacity(n);
    let mut omega_biv = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for k in 0..n {
        let masked = magnitudes[k] <= threshold;
        let g = if masked {
            None
        } else {
            generalized_frequency(&VecN::from_slice(&values[k])?, &VecN::from_slice(&derivs[k])?).ok()
        };
        valid.push(g.is_some() && !cfg.diff_scheme.is_boundary(k, n));
        match g {
            Some(g) => {
                rho.push(g.rho);
                omega_biv.push(g.omega);
            }
            None => {
                rho.push(0.0);
                omega_biv.push(Bivector::zero(dim));
            }
        }
    }

    if smooth && cfg.placement.output() {
        let mut rho_f = Lowpass::new(fs, cfg.filter_tau);
        let ncoef = omega_biv[0].coeffs().len();
        let mut biv_f = vec![Lowpass::new(fs, cfg.filter_tau); ncoef];
        for k in (0..n).filter(|&k| valid[k]) {
            rho[k] = rho_f.step(rho[k]);
            let coeffs = omega_biv[k].coeffs().iter().zip(&mut biv_f).map(|(&b, f)| f.step(b)).collect();
            omega_biv[k] = Bivector::from_coeffs(dim, coeffs)?;
        }
    }

    let omega_mag = omega_biv.iter().map(Bivector::magnitude).collect();
    FrequencyTrace::new(sig.times(), rho, omega_mag, omega_biv, valid)
}

/// Amplitude-invariant Clarke transform `abc -> (alpha, beta)`.
pub fn clarke(a: f64, b: f64, c: f64) -> (f64, f64) {
    let alpha = (2.0 / 3.0) * (a - 0.5 * b - 0.5 * c);
    let beta = (b - c) / 3f64.sqrt();
    (alpha, beta)
}

/// Park rotation of `(alpha, beta)` by `theta`, returning `(d, q)`.
pub fn park(alpha: f64, beta: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (alpha * c + beta * s, -alpha * s + beta * c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PllConfig {
    /// Proportional gain on the normalized q-axis voltage.
    pub kp: f64,
    /// Integral gain on the normalized q-axis voltage.
    pub ki: f64,
    /// Free-running frequency, rad/s.
    pub omega_init: f64,
    /// Voltage used to normalize `v_q`, V.
    pub v_base: f64,
    /// Initial angle estimate. `None` aligns it with the first sample's
    /// `(alpha, beta)` angle.
    pub theta_init: Option<f64>,
}

impl Default for PllConfig {
    /// `kp = 92`, `ki = 4230`: natural frequency ~65 rad/s, damping ~0.707.
    fn default() -> Self {
        PllConfig { kp: 92.0, ki: 4230.0, omega_init: 120.0 * PI, v_base: 1.0, theta_init: None }
    }
}

impl PllConfig {
    /// Default gains with `v_base` set to the mean `|(alpha, beta)|` of `sig`.
    pub fn for_signal(sig: &SampledSignal, omega_init: f64) -> Result<Self> {
        check_abc(sig)?;
        let mean = sig
            .rows()
            .iter()
            .map(|r| {
                let (a, b) = clarke(r[0], r[1], r[2]);
                a.hypot(b)
            })
            .sum::<f64>()
            / sig.len() as f64;
        if !(mean > 0.0) {
            return Err(Error::AllDegenerate);
        }
        Ok(PllConfig { omega_init, v_base: mean, ..Self::default() })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("kp", self.kp), ("ki", self.ki), ("v_base", self.v_base)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::param(format!("{name} must be positive, got {x}")));
            }
        }
        if !self.omega_init.is_finite() || self.theta_init.is_some_and(|t| !t.is_finite()) {
            return Err(Error::param("omega_init and theta_init must be finite"));
        }
        Ok(())
    }
}

fn check_abc(sig: &SampledSignal) -> Result<()> {
    if sig.dim() != 3 {
        return Err(Error::DimensionMismatch { left: 3, right: sig.dim() });
    }
    Ok(())
}

/// Synchronous reference frame PLL with a PI loop filter.
///
/// Each step rotates the Clarke components by the angle estimate, feeds the
/// normalized q-axis voltage through the PI controller and integrates the
/// resulting frequency with forward Euler. The trace reports the frequency
/// as a rotation in the `(alpha, beta)` plane; rho is zero.
pub fn srf_pll(sig: &SampledSignal, cfg: &PllConfig) -> Result<FrequencyTrace> {
    check_abc(sig)?;
    cfg.validate()?;
    let dt = sig.dt();
    let rows = sig.rows();
    let mut theta = cfg.theta_init.unwrap_or_else(|| {
        let (a, b) = clarke(rows[0][0], rows[0][1], rows[0][2]);
        b.atan2(a)
    });
    let mut integral = 0.0;
    let n = sig.len();
    let mut omega = Vec::with_capacity(n);
    let mut omega_biv = Vec::with_capacity(n);
    for r in rows {
        let (alpha, beta) = clarke(r[0], r[1], r[2]);
        let (_, q) = park(alpha, beta, theta);
        let err = q / cfg.v_base;
        integral += cfg.ki * err * dt;
        let w = cfg.omega_init + integral + cfg.kp * err;
        theta = (theta + w * dt).rem_euclid(TAU);
        omega.push(w.abs());
        omega_biv.push(Bivector::from_coeffs(2, vec![w])?);
    }
    FrequencyTrace::new(sig.times(), vec![0.0; n], omega, omega_biv, vec![true; n])
}

/// Agreement of two traces over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub window: (f64, f64),
    /// Samples valid in both traces inside the window.
    pub n_samples: usize,
    pub rmse_omega: f64,
    pub max_abs_dev: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// First instant after which `|omega - omega_final| < 1% omega_final`.
    pub settle_time_a: f64,
    pub settle_time_b: f64,
}

/// Tolerance on matching sample instants.
pub const TIME_MATCH_TOL: f64 = 1e-12;

fn settle_time(t: &[f64], w: &[f64]) -> f64 {
    let last = *w.last().expect("non-empty");
    let band = 0.01 * last.abs();
    let mut settle = *t.last().expect("non-empty");
    for k in (0..w.len()).rev() {
        if (w[k] - last).abs() >= band {
            break;
        }
        settle = t[k];
    }
    settle
}

pub fn compare(a: &FrequencyTrace, b: &FrequencyTrace, t_window: (f64, f64)) -> Result<ComparisonReport> {
    let (t0, t1) = t_window;
    if !(t1 >= t0) {
        return Err(Error::param(format!("window [{t0}, {t1}] is empty")));
    }
    let in_window = |tr: &FrequencyTrace| -> Vec<usize> {
        (0..tr.len()).filter(|&k| tr.t[k] >= t0 - TIME_MATCH_TOL && tr.t[k] <= t1 + TIME_MATCH_TOL).collect()
    };
    let (ia, ib) = (in_window(a), in_window(b));
    if ia.is_empty() || ib.is_empty() {
        return Err(Error::TimeBaseMismatch(format!(
            "no samples of {} inside [{t0}, {t1}]",
            if ia.is_empty() { "the first trace" } else { "the second trace" }
        )));
    }
    if ia.len() != ib.len() {
        return Err(Error::TimeBaseMismatch(format!("{} vs {} samples inside [{t0}, {t1}]", ia.len(), ib.len())));
    }
    let mut ts = Vec::new();
    let (mut wa, mut wb) = (Vec::new(), Vec::new());
    for (&ka, &kb) in ia.iter().zip(&ib) {
        let (ta, tb) = (a.t[ka], b.t[kb]);
        if (ta - tb).abs() > TIME_MATCH_TOL * ta.abs().max(1.0) {
            return Err(Error::TimeBaseMismatch(format!("sample instants differ: {ta} vs {tb}")));
        }
        if a.valid[ka] && b.valid[kb] {
            ts.push(ta);
            wa.push(a.omega_mag[ka]);
            wb.push(b.omega_mag[kb]);
        }
    }
    if ts.is_empty() {
        return Err(Error::AllDegenerate);
    }
    let n = ts.len() as f64;
    let sq: f64 = wa.iter().zip(&wb).map(|(x, y)| (x - y).powi(2)).sum();
    let max_abs_dev = wa.iter().zip(&wb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(ComparisonReport {
        window: t_window,
        n_samples: ts.len(),
        rmse_omega: (sq / n).sqrt(),
        max_abs_dev,
        mean_a: wa.iter().sum::<f64>() / n,
        mean_b: wb.iter().sum::<f64>() / n,
        settle_time_a: settle_time(&ts, &wa),
        settle_time_b: settle_time(&ts, &wb),
    })
}
