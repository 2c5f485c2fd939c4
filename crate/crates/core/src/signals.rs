//! Analytic test waveforms with exact derivatives, and a uniform sampler.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ga::{Matrix, VecN};

const PHASE_SHIFT: f64 = 2.0 * PI / 3.0;

/// Length of the raised-cosine transitions used by [`fault_scenario`], s.
pub const FAULT_RAMP: f64 = 1e-3;

type EvalFn = dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync;

/// A signal `t -> (v(t), v'(t))` known in closed form.
#[derive(Clone)]
pub struct AnalyticSignal {
    dim: usize,
    channels: Vec<String>,
    description: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for AnalyticSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSignal")
            .field("dim", &self.dim)
            .field("channels", &self.channels)
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

impl AnalyticSignal {
    /// Wraps a closure returning `(value, derivative)`, both of length `channels.len()`.
    pub fn new<F>(channels: Vec<String>, description: impl Into<String>, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    {
        if channels.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(AnalyticSignal { dim: channels.len(), channels, description: description.into(), eval: Arc::new(eval) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Value and time derivative at `t`.
    pub fn eval(&self, t: f64) -> Result<(VecN, VecN)> {
        let (value, deriv) = (self.eval)(t);
        for got in [value.len(), deriv.len()] {
            if got != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: got });
            }
        }
        Ok((VecN::new(value)?, VecN::new(deriv)?))
    }

    pub fn value(&self, t: f64) -> Result<VecN> {
        Ok(self.eval(t)?.0)
    }

    pub fn derivative(&self, t: f64) -> Result<VecN> {
        Ok(self.eval(t)?.1)
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn check_amplitude(v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(format!("amplitude must be positive, got {v}")));
    }
    Ok(())
}

/// `(V cos th, V sin th)` with `th = omega0 t + phi`.
pub fn single_phase(v: f64, omega0: f64, phi: f64) -> Result<AnalyticSignal> {
    check_amplitude(v)?;
    AnalyticSignal::new(labels(&["v1", "v2"]), format!("single-phase V={v} w={omega0} phi={phi}"), move |t| {
        let (s, c) = (omega0 * t + phi).sin_cos();
        (vec![v * c, v * s], vec![-omega0 * v * s, omega0 * v * c])
    })
}

/// Balanced set `V sin(th_a)`, `V sin(th_a - 2pi/3)`, `V sin(th_a + 2pi/3)`, `th_a = omega0 t`.
pub fn three_phase_balanced(v: f64, omega0: f64) -> Result<AnalyticSignal> {
    check_amplitude(v)?;
    AnalyticSignal::new(labels(&["a", "b", "c"]), format!("three-phase balanced V={v} w={omega0}"), move |t| {
        let mut value = Vec::with_capacity(3);
        let mut deriv = Vec::with_capacity(3);
        for off in [0.0, -PHASE_SHIFT, PHASE_SHIFT] {
            let (sn, cs) = (omega0 * t + off).sin_cos();
            value.push(v * sn);
            deriv.push(v * (cs * omega0));
        }
        (value, deriv)
    })
}

/// Balanced three-phase set driven by an arbitrary phase angle `theta(t)`.
pub fn three_phase_from_angle<F, G>(v: f64, theta: F, theta_dot: G) -> Result<AnalyticSignal>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    check_amplitude(v)?;
    AnalyticSignal::new(labels(&["a", "b", "c"]), format!("three-phase V={v} custom angle"), move |t| {
        let (th, w) = (theta(t), theta_dot(t));
        let mut value = Vec::with_capacity(3);
        let mut deriv = Vec::with_capacity(3);
        for off in [0.0, -PHASE_SHIFT, PHASE_SHIFT] {
            value.push(v * (th + off).sin());
            deriv.push(v * ((th + off).cos() * w));
        }
        (value, deriv)
    })
}

/// Park-frame signal `(v_d, v_q)` whose derivative includes the frame rotation:
/// `(v_d' - omega0 v_q, v_q' + omega0 v_d)`.
pub fn dq_signal<D, Q, DD, QD>(vd: D, vq: Q, vd_dot: DD, vq_dot: QD, omega0: f64) -> Result<AnalyticSignal>
where
    D: Fn(f64) -> f64 + Send + Sync + 'static,
    Q: Fn(f64) -> f64 + Send + Sync + 'static,
    DD: Fn(f64) -> f64 + Send + Sync + 'static,
    QD: Fn(f64) -> f64 + Send + Sync + 'static,
{
    AnalyticSignal::new(labels(&["d", "q"]), format!("dq frame w={omega0}"), move |t| {
        let (d, q) = (vd(t), vq(t));
        (vec![d, q], vec![vd_dot(t) - omega0 * q, vq_dot(t) + omega0 * d])
    })
}

/// Damped dq transient: `v_d = 10 + e^-t cos 2 pi t`, `v_q = e^-t sin 2 pi t` (kV),
/// returned in volts.
pub fn dq_transient_example(omega0: f64) -> Result<AnalyticSignal> {
    const K: f64 = 1e3;
    let w = 2.0 * PI;
    dq_signal(
        move |t| K * (10.0 + (-t).exp() * (w * t).cos()),
        move |t| K * (-t).exp() * (w * t).sin(),
        move |t| K * (-t).exp() * (-(w * t).cos() - w * (w * t).sin()),
        move |t| K * (-t).exp() * (-(w * t).sin() + w * (w * t).cos()),
        omega0,
    )
}

/// Stationary-frame view of a Park-frame signal: rotates `(d, q)` by `omega0 t`.
pub fn dq_to_stationary(dq: &AnalyticSignal, omega0: f64) -> Result<AnalyticSignal> {
    if dq.dim() != 2 {
        return Err(Error::DimensionMismatch { left: 2, right: dq.dim() });
    }
    let inner = dq.clone();
    AnalyticSignal::new(labels(&["alpha", "beta"]), format!("stationary view of {}", dq.description()), move |t| {
        let (val, der) = (inner.eval)(t);
        let (s, c) = (omega0 * t).sin_cos();
        // der already carries the rotation term, so R(t) * der is the stationary derivative
        (vec![c * val[0] - s * val[1], s * val[0] + c * val[1]], vec![c * der[0] - s * der[1], s * der[0] + c * der[1]])
    })
}

/// One-channel dc signal.
pub fn dc_signal<F, G>(v: F, vdot: G) -> Result<AnalyticSignal>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    AnalyticSignal::new(labels(&["dc"]), "dc", move |t| (vec![v(t)], vec![vdot(t)]))
}

/// `V e^{a t}` in one channel.
pub fn dc_exponential(v: f64, a: f64) -> Result<AnalyticSignal> {
    check_amplitude(v)?;
    dc_signal(move |t| v * (a * t).exp(), move |t| a * v * (a * t).exp())
}

/// Parameters of the synthetic unbalanced fault.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultParams {
    /// Phase amplitude, V.
    pub v: f64,
    /// Nominal angular frequency, rad/s.
    pub omega0: f64,
    pub t_fault: f64,
    pub t_clear: f64,
    /// Relative amplitude drop of phases b and c, in `[0, 1)`.
    pub sag: f64,
    /// Phase jump added to phase b during the fault, rad.
    pub phase_jump: f64,
    /// Relative amplitude of the third harmonic present during the fault.
    pub harmonic3: f64,
}

impl Default for FaultParams {
    fn default() -> Self {
        FaultParams {
            v: 12e3,
            omega0: 120.0 * PI,
            t_fault: 0.2,
            t_clear: 0.3,
            sag: 0.4,
            phase_jump: 0.3,
            harmonic3: 0.05,
        }
    }
}

impl FaultParams {
    pub fn validate(&self) -> Result<()> {
        check_amplitude(self.v)?;
        if !self.omega0.is_finite() {
            return Err(Error::param("omega0 must be finite"));
        }
        if !(0.0..1.0).contains(&self.sag) {
            return Err(Error::param(format!("sag must lie in [0, 1), got {}", self.sag)));
        }
        if !(self.t_fault < self.t_clear) || !self.t_fault.is_finite() || !self.t_clear.is_finite() {
            return Err(Error::param(format!(
                "fault must start before it clears ({} >= {})",
                self.t_fault, self.t_clear
            )));
        }
        if !self.phase_jump.is_finite() || !(self.harmonic3 >= 0.0 && self.harmonic3.is_finite()) {
            return Err(Error::param("phase_jump must be finite and harmonic3 non-negative"));
        }
        Ok(())
    }
}

/// Raised-cosine step from 0 to 1 over `[0, FAULT_RAMP]` and its derivative.
fn ramp(tau: f64) -> (f64, f64) {
    if tau <= 0.0 {
        (0.0, 0.0)
    } else if tau >= FAULT_RAMP {
        (1.0, 0.0)
    } else {
        let x = PI * tau / FAULT_RAMP;
        (0.5 * (1.0 - x.cos()), 0.5 * PI / FAULT_RAMP * x.sin())
    }
}

/// Balanced three-phase voltage with a sag on phases b and c, a phase jump on
/// phase b and a third harmonic between `t_fault` and `t_clear`.
pub fn fault_scenario(params: &FaultParams) -> Result<AnalyticSignal> {
    params.validate()?;
    let p = params.clone();
    let desc = format!(
        "fault V={} w={} [{}, {}] sag={} jump={} h3={}",
        p.v, p.omega0, p.t_fault, p.t_clear, p.sag, p.phase_jump, p.harmonic3
    );
    AnalyticSignal::new(labels(&["a", "b", "c"]), desc, move |t| {
        let (r1, r1d) = ramp(t - p.t_fault);
        let (r2, r2d) = ramp(t - p.t_clear);
        let (w, wd) = (r1 - r2, r1d - r2d);
        let h = p.harmonic3;
        let mut value = Vec::with_capacity(3);
        let mut deriv = Vec::with_capacity(3);
        for (phase, off) in [0.0, -PHASE_SHIFT, PHASE_SHIFT].into_iter().enumerate() {
            let (amp, amp_d) = if phase == 0 { (p.v, 0.0) } else { (p.v * (1.0 - p.sag * w), -p.v * p.sag * wd) };
            let (jump, jump_d) = if phase == 1 { (p.phase_jump * w, p.phase_jump * wd) } else { (0.0, 0.0) };
            let th = p.omega0 * t + off + jump;
            let th_d = p.omega0 + jump_d;
            let (s1, c1) = th.sin_cos();
            let (s3, c3) = (3.0 * th).sin_cos();
            let shape = s1 + h * w * s3;
            let shape_d = c1 * th_d + h * wd * s3 + 3.0 * h * w * c3 * th_d;
            value.push(amp * shape);
            deriv.push(amp_d * shape + amp * shape_d);
        }
        (value, deriv)
    })
}

/// Uniformly sampled multi-channel record.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    sample_rate: f64,
    t0: f64,
    channels: Vec<String>,
    samples: Vec<Vec<f64>>,
}

impl SampledSignal {
    pub fn new(sample_rate: f64, t0: f64, channels: Vec<String>, samples: Vec<Vec<f64>>) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::param(format!("sample rate must be positive, got {sample_rate}")));
        }
        if !t0.is_finite() {
            return Err(Error::param("t0 must be finite"));
        }
        if channels.is_empty() {
            return Err(Error::EmptyVector);
        }
        if samples.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: samples.len() });
        }
        for row in &samples {
            if row.len() != channels.len() {
                return Err(Error::DimensionMismatch { left: channels.len(), right: row.len() });
            }
            if let Some((index, &value)) = row.iter().enumerate().find(|(_, x)| !x.is_finite()) {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(SampledSignal { sample_rate, t0, channels, samples })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.sample_rate
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.samples[k]
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.samples.iter().map(|r| r[c]).collect()
    }

    /// Same time base, same labels, new sample values.
    pub fn with_samples(&self, samples: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.sample_rate, self.t0, self.channels.clone(), samples)
    }

    /// Applies `q` to every sample.
    pub fn transform(&self, q: &Matrix) -> Result<Self> {
        let rows = self
            .samples
            .iter()
            .map(|r| Ok(q.mul_vec(&VecN::from_slice(r)?)?.into_vec()))
            .collect::<Result<Vec<_>>>()?;
        self.with_samples(rows)
    }
}

/// Samples `sig` at `t_k = t_start + k / sample_rate` for `t_k < t_end`, adding
/// i.i.d. Gaussian noise of standard deviation `noise_std` seeded by `seed`.
pub fn sample(
    sig: &AnalyticSignal,
    sample_rate: f64,
    t_start: f64,
    t_end: f64,
    noise_std: f64,
    seed: u64,
) -> Result<SampledSignal> {
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::param(format!("sample rate must be positive, got {sample_rate}")));
    }
    if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(Error::param(format!("empty time range [{t_start}, {t_end})")));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::param(format!("noise std must be non-negative, got {noise_std}")));
    }
    let n = ((t_end - t_start) * sample_rate).round() as usize;
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let noise = (noise_std > 0.0).then(|| Normal::new(0.0, noise_std).expect("std validated"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let t = t_start + k as f64 / sample_rate;
        let mut row = sig.value(t)?.into_vec();
        if let Some(dist) = &noise {
            for x in &mut row {
                *x += dist.sample(&mut rng);
            }
        }
        rows.push(row);
    }
    SampledSignal::new(sample_rate, t_start, sig.channels().to_vec(), rows)
}
