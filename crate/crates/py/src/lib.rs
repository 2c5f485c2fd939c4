//! Python module `genfreq`.

use std::f64::consts::TAU;

use genfreq::estimators::{self, DiffScheme, EstimatorConfig, FilterPlacement, FrequencyTrace, PllConfig};
use genfreq::ga::{self, VecN};
use genfreq::signals::{self, FaultParams, SampledSignal};
use genfreq::{curve, freq, io};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(genfreq, GenfreqError, PyValueError, "Raised for invalid input to genfreq operations.");

fn err(e: genfreq::Error) -> PyErr {
    GenfreqError::new_err(e.to_string())
}

fn vec_n(x: Vec<f64>) -> PyResult<VecN> {
    VecN::new(x).map_err(err)
}

#[pyfunction]
fn inner(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    ga::inner(&vec_n(x)?, &vec_n(y)?).map_err(err)
}

/// Strictly upper-triangular coefficients `b_ij`, `i < j`, in row order.
#[pyfunction]
fn wedge(x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(ga::wedge(&vec_n(x)?, &vec_n(y)?).map_err(err)?.coeffs().to_vec())
}

/// `(x . y, x ^ y coefficients)`.
#[pyfunction]
fn geometric_product(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
    let m = ga::geometric_product(&vec_n(x)?, &vec_n(y)?).map_err(err)?;
    Ok((m.scalar, m.bivector.coeffs().to_vec()))
}

#[pyfunction]
fn curvature(xdot: Vec<f64>, xddot: Vec<f64>) -> PyResult<f64> {
    let state = curve::CurveState::new(vec_n(xdot)?, vec_n(xddot)?).map_err(err)?;
    curve::curvature(&state).map_err(err)
}

#[pyclass(name = "GeneralizedFrequency", module = "genfreq", frozen, skip_from_py_object)]
struct PyFrequency {
    #[pyo3(get)]
    rho: f64,
    /// Bivector coefficients, same order as `wedge`.
    #[pyo3(get)]
    omega: Vec<f64>,
    #[pyo3(get)]
    omega_mag: f64,
}

#[pymethods]
impl PyFrequency {
    #[getter]
    fn omega_hz(&self) -> f64 {
        self.omega_mag / TAU
    }

    fn __repr__(&self) -> String {
        format!("GeneralizedFrequency(rho={}, omega_mag={})", self.rho, self.omega_mag)
    }
}

impl From<freq::GeneralizedFrequency> for PyFrequency {
    fn from(g: freq::GeneralizedFrequency) -> Self {
        PyFrequency { rho: g.rho, omega: g.omega.coeffs().to_vec(), omega_mag: g.omega_mag }
    }
}

#[pyfunction]
fn generalized_frequency(v: Vec<f64>, vdot: Vec<f64>) -> PyResult<PyFrequency> {
    Ok(freq::generalized_frequency(&vec_n(v)?, &vec_n(vdot)?).map_err(err)?.into())
}

#[pyfunction]
fn frequency_from_power(v: Vec<f64>, i: Vec<f64>, c: f64) -> PyResult<PyFrequency> {
    Ok(freq::frequency_from_power(&vec_n(v)?, &vec_n(i)?, c).map_err(err)?.into())
}

#[pyfunction]
fn clarke(a: f64, b: f64, c: f64) -> (f64, f64) {
    estimators::clarke(a, b, c)
}

#[pyfunction]
fn park(alpha: f64, beta: f64, theta: f64) -> (f64, f64) {
    estimators::park(alpha, beta, theta)
}

/// Uniformly sampled waveform.
#[pyclass(name = "Waveform", module = "genfreq", frozen, skip_from_py_object)]
struct PyWaveform {
    inner: SampledSignal,
}

#[pymethods]
impl PyWaveform {
    #[new]
    #[pyo3(signature = (sample_rate, samples, channels=None, t0=0.0))]
    fn new(sample_rate: f64, samples: Vec<Vec<f64>>, channels: Option<Vec<String>>, t0: f64) -> PyResult<Self> {
        let dim = samples.first().map_or(0, Vec::len);
        let channels = channels.unwrap_or_else(|| (1..=dim).map(|k| format!("x{k}")).collect());
        Ok(PyWaveform { inner: SampledSignal::new(sample_rate, t0, channels, samples).map_err(err)? })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyWaveform { inner: io::parse_waveform(text).map_err(err)? })
    }

    fn to_csv(&self) -> String {
        io::waveform_to_string(&self.inner, &[])
    }

    #[getter]
    fn sample_rate(&self) -> f64 {
        self.inner.sample_rate()
    }

    #[getter]
    fn channels(&self) -> Vec<String> {
        self.inner.channels().to_vec()
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.times()
    }

    #[getter]
    fn samples(&self) -> Vec<Vec<f64>> {
        self.inner.rows().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Waveform(sample_rate={}, channels={:?}, len={})",
            self.inner.sample_rate(),
            self.inner.channels(),
            self.inner.len()
        )
    }
}

/// A sampled test waveform. `scenario` is one of example1, example2,
/// example3, dc or fault.
#[pyfunction]
#[pyo3(signature = (
    scenario, fs=10_000.0, dur=0.1, t0=0.0, noise=0.0, seed=0, v=None, f=60.0,
    sag=0.4, t_fault=0.2, t_clear=0.3, phase_jump=0.3, harmonic3=0.05, decay=0.0,
))]
#[allow(clippy::too_many_arguments)]
fn generate(
    scenario: &str,
    fs: f64,
    dur: f64,
    t0: f64,
    noise: f64,
    seed: u64,
    v: Option<f64>,
    f: f64,
    sag: f64,
    t_fault: f64,
    t_clear: f64,
    phase_jump: f64,
    harmonic3: f64,
    decay: f64,
) -> PyResult<PyWaveform> {
    let w0 = TAU * f;
    let sig = match scenario {
        "example1" => signals::single_phase(v.unwrap_or(12e3), w0, 0.0),
        "example2" => signals::three_phase_balanced(v.unwrap_or(12e3), w0),
        "example3" => signals::dq_transient_example(w0).and_then(|dq| signals::dq_to_stationary(&dq, w0)),
        "dc" => signals::dc_exponential(v.unwrap_or(100.0), decay),
        "fault" => signals::fault_scenario(&FaultParams {
            v: v.unwrap_or(12e3),
            omega0: w0,
            t_fault,
            t_clear,
            sag,
            phase_jump,
            harmonic3,
        }),
        other => return Err(GenfreqError::new_err(format!("unknown scenario `{other}`"))),
    }
    .map_err(err)?;
    let inner = signals::sample(&sig, fs, t0, t0 + dur, noise, seed).map_err(err)?;
    Ok(PyWaveform { inner })
}

/// Frequency trace produced by an estimator.
#[pyclass(name = "Trace", module = "genfreq", frozen, skip_from_py_object)]
struct PyTrace {
    inner: FrequencyTrace,
}

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyTrace { inner: io::parse_trace(text).map_err(err)? })
    }

    fn to_csv(&self) -> PyResult<String> {
        io::trace_to_string(&self.inner, &[]).map_err(err)
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.t.clone()
    }

    #[getter]
    fn rho(&self) -> Vec<f64> {
        self.inner.rho.clone()
    }

    #[getter]
    fn omega(&self) -> Vec<f64> {
        self.inner.omega_mag.clone()
    }

    #[getter]
    fn omega_hz(&self) -> Vec<f64> {
        self.inner.omega_hz()
    }

    #[getter]
    fn valid(&self) -> Vec<bool> {
        self.inner.valid.clone()
    }

    /// `(mean, std)` of omega over valid samples in `[t0, t1]`, or `None`.
    fn omega_stats(&self, t0: f64, t1: f64) -> Option<(f64, f64)> {
        self.inner.omega_stats(t0, t1)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
#[pyo3(signature = (waveform, tau=1e-3, scheme="central", placement="output", mask=None))]
fn estimate_geometric(
    waveform: &PyWaveform,
    tau: f64,
    scheme: &str,
    placement: &str,
    mask: Option<f64>,
) -> PyResult<PyTrace> {
    let diff_scheme = match scheme {
        "central" => DiffScheme::Central,
        "backward" => DiffScheme::Backward,
        s => return Err(GenfreqError::new_err(format!("unknown scheme `{s}`"))),
    };
    let placement = match placement {
        "output" => FilterPlacement::Output,
        "input" => FilterPlacement::Input,
        "both" => FilterPlacement::Both,
        p => return Err(GenfreqError::new_err(format!("unknown placement `{p}`"))),
    };
    let cfg = EstimatorConfig { diff_scheme, filter_tau: tau, mask_threshold: mask, placement, report_hz: true };
    Ok(PyTrace { inner: estimators::estimate_geometric(&waveform.inner, &cfg).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (waveform, f_init=60.0, kp=92.0, ki=4230.0))]
fn srf_pll(waveform: &PyWaveform, f_init: f64, kp: f64, ki: f64) -> PyResult<PyTrace> {
    let cfg = PllConfig { kp, ki, ..PllConfig::for_signal(&waveform.inner, TAU * f_init).map_err(err)? };
    Ok(PyTrace { inner: estimators::srf_pll(&waveform.inner, &cfg).map_err(err)? })
}

#[pyfunction]
fn compare<'py>(py: Python<'py>, a: &PyTrace, b: &PyTrace, t0: f64, t1: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = estimators::compare(&a.inner, &b.inner, (t0, t1)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n_samples", r.n_samples)?;
    d.set_item("rmse_omega", r.rmse_omega)?;
    d.set_item("max_abs_dev", r.max_abs_dev)?;
    d.set_item("mean_a", r.mean_a)?;
    d.set_item("mean_b", r.mean_b)?;
    d.set_item("settle_time_a", r.settle_time_a)?;
    d.set_item("settle_time_b", r.settle_time_b)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "genfreq")]
fn genfreq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GenfreqError", m.py().get_type::<GenfreqError>())?;
    m.add_class::<PyFrequency>()?;
    m.add_class::<PyWaveform>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(inner, m)?)?;
    m.add_function(wrap_pyfunction!(wedge, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_product, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(generalized_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(frequency_from_power, m)?)?;
    m.add_function(wrap_pyfunction!(clarke, m)?)?;
    m.add_function(wrap_pyfunction!(park, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_geometric, m)?)?;
    m.add_function(wrap_pyfunction!(srf_pll, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
