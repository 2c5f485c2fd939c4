//! Generalized frequency of a signal vector.
//!
//! For a signal `v` with time derivative `v'`:
//!
//! ```text
//! rho   = (v . v') / |v|^2          symmetric part, d|v|/dt / |v|
//! Omega = (v ^ v') / |v|^2          antisymmetric part, rotation plane and rate
//! omega = |Omega| = |v| * kappa     kappa: curvature of the curve with tangent v
//! ```
//!
//! `rho + Omega` is the geometric product `v v'` divided by `|v|^2`, so it only
//! depends on invariants of the curve and not on the coordinates `v` is
//! written in. Currents are handled the same way. Across a capacitance with
//! `i = C v'` the frequency follows from the instantaneous powers
//! `p = v . i` and `Q = i ^ v` as `(p - Q) / (C |v|^2)`.

use crate::error::{Error, Result};
use crate::ga::{inner, wedge, Bivector, Multivector, VecN};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedFrequency {
    /// Relative magnitude rate, 1/s.
    pub rho: f64,
    /// Rotation bivector, rad/s.
    pub omega: Bivector,
    /// `|omega|`, rad/s.
    pub omega_mag: f64,
}

impl GeneralizedFrequency {
    fn from_parts(rho: f64, omega: Bivector) -> Self {
        let omega_mag = omega.magnitude();
        GeneralizedFrequency { rho, omega, omega_mag }
    }

    /// Signed rotation rate `b_12` for planar signals; positive for
    /// counter-clockwise (positive-sequence) rotation.
    pub fn signed_omega(&self) -> Option<f64> {
        (self.omega.dim() == 2).then(|| self.omega.coeffs()[0])
    }

    pub fn omega_hz(&self) -> f64 {
        self.omega_mag / std::f64::consts::TAU
    }

    pub fn as_multivector(&self) -> Multivector {
        Multivector::new(self.rho, self.omega.clone())
    }
}

/// Instantaneous active power and generalized reactive power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPair {
    /// `v . i`, W.
    pub p: f64,
    /// `i ^ v`, var.
    pub q: Bivector,
}

fn checked_norm_squared(v: &VecN) -> Result<f64> {
    let n2 = v.norm_squared();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::DegenerateMagnitude);
    }
    Ok(n2)
}

fn check_dims(v: &VecN, w: &VecN) -> Result<()> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch { left: v.dim(), right: w.dim() });
    }
    Ok(())
}

pub fn rho(v: &VecN, vdot: &VecN) -> Result<f64> {
    check_dims(v, vdot)?;
    let n2 = checked_norm_squared(v)?;
    Ok(inner(v, vdot)? / n2)
}

pub fn omega_bivector(v: &VecN, vdot: &VecN) -> Result<Bivector> {
    check_dims(v, vdot)?;
    let n2 = checked_norm_squared(v)?;
    Ok(wedge(v, vdot)?.scale(1.0 / n2))
}

pub fn omega_mag(v: &VecN, vdot: &VecN) -> Result<f64> {
    Ok(omega_bivector(v, vdot)?.magnitude())
}

pub fn generalized_frequency(v: &VecN, vdot: &VecN) -> Result<GeneralizedFrequency> {
    check_dims(v, vdot)?;
    let n2 = checked_norm_squared(v)?;
    let rho = inner(v, vdot)? / n2;
    let omega = wedge(v, vdot)?.scale(1.0 / n2);
    Ok(GeneralizedFrequency::from_parts(rho, omega))
}

/// Same construction applied to a current and its derivative.
pub fn current_frequency(i: &VecN, idot: &VecN) -> Result<GeneralizedFrequency> {
    generalized_frequency(i, idot)
}

pub fn power_pair(v: &VecN, i: &VecN) -> Result<PowerPair> {
    Ok(PowerPair { p: inner(v, i)?, q: wedge(i, v)? })
}

/// Frequency of the voltage across a capacitance `c` carrying current `i`.
pub fn frequency_from_power(v: &VecN, i: &VecN, c: f64) -> Result<GeneralizedFrequency> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("capacitance must be positive, got {c}")));
    }
    check_dims(v, i)?;
    let n2 = checked_norm_squared(v)?;
    let PowerPair { p, q } = power_pair(v, i)?;
    let denom = c * n2;
    Ok(GeneralizedFrequency::from_parts(p / denom, q.scale(-1.0 / denom)))
}
