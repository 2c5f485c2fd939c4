//! Frequency as a geometric object.
//!
//! A multi-channel signal `v(t)` is read as the tangent of an abstract curve
//! (the flux curve). Its frequency is the multivector `rho + Omega` where
//! `rho = (v . v') / |v|^2` measures how fast the magnitude changes and the
//! bivector `Omega = (v ^ v') / |v|^2` measures how fast, and in which plane,
//! the vector rotates. The magnitude `|Omega|` equals `|v|` times the
//! curvature of the flux curve and reduces to the usual `d theta / dt` for
//! stationary sinusoids.
//!
//! Modules:
//!
//! - [`ga`]: vectors, bivectors, inner/outer/wedge/geometric products.
//! - [`curve`]: arc speed, unit tangent and curvature of time-parameterized curves.
//! - [`freq`]: generalized frequency of voltages and currents, power-based form.
//! - [`signals`]: analytic test waveforms with exact derivatives and a sampler.
//! - [`estimators`]: differentiation, first-order smoothing, the sampled
//!   estimator, an SRF-PLL and trace comparison.
//! - [`io`]: CSV waveform and trace files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod estimators;
pub mod freq;
pub mod ga;
pub mod io;
pub mod signals;

pub use error::{Error, Result};
pub use ga::{Bivector, Matrix, Multivector, VecN};
