//! Differential geometry of time-parameterized curves.
//!
//! Everything is computed from the first two time derivatives of the curve,
//! `x'` and `x''`. The arc-length rate `s'' = (x' . x'') / s'` is obtained by
//! the chain rule so analytic derivatives stay exact.

use crate::error::{Error, Result};
use crate::ga::{inner, wedge, VecN};

/// Speeds below `DEGENERATE_SPEED_REL * (1 + |x''|)` are treated as zero.
pub const DEGENERATE_SPEED_REL: f64 = 1e-12;

/// First and second time derivative of a curve at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveState {
    xdot: VecN,
    xddot: VecN,
}

impl CurveState {
    pub fn new(xdot: VecN, xddot: VecN) -> Result<Self> {
        if xdot.dim() != xddot.dim() {
            return Err(Error::DimensionMismatch { left: xdot.dim(), right: xddot.dim() });
        }
        Ok(CurveState { xdot, xddot })
    }

    pub fn xdot(&self) -> &VecN {
        &self.xdot
    }

    pub fn xddot(&self) -> &VecN {
        &self.xddot
    }

    fn checked_speed(&self) -> Result<f64> {
        let speed = self.xdot.magnitude();
        if speed < DEGENERATE_SPEED_REL * (1.0 + self.xddot.magnitude()) {
            return Err(Error::DegenerateCurve { speed });
        }
        Ok(speed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    /// `s' = |x'|`.
    pub speed: f64,
    /// `dx/ds`, unit length.
    pub unit_tangent: VecN,
    /// `d^2x/ds^2`, orthogonal to the tangent, length equal to the curvature.
    pub d2x_ds2: VecN,
    pub curvature: f64,
}

/// `s' = |x'|`.
pub fn arc_speed(xdot: &VecN) -> f64 {
    xdot.magnitude()
}

pub fn unit_tangent(xdot: &VecN) -> Result<VecN> {
    let speed = xdot.magnitude();
    if speed < DEGENERATE_SPEED_REL {
        return Err(Error::DegenerateCurve { speed });
    }
    Ok(VecN::new(xdot.iter().map(|x| x / speed).collect()).expect("finite by construction"))
}

/// `x''/s'^2 - s'' x'/s'^3`.
pub fn d2x_ds2(state: &CurveState) -> Result<VecN> {
    let speed = state.checked_speed()?;
    Ok(second_derivative_unchecked(state, speed))
}

fn second_derivative_unchecked(state: &CurveState, speed: f64) -> VecN {
    let s2 = inner(&state.xdot, &state.xddot).expect("dims checked at construction") / speed;
    let a = 1.0 / (speed * speed);
    let b = s2 / (speed * speed * speed);
    let comps = state.xddot.iter().zip(state.xdot.iter()).map(|(xdd, xd)| a * xdd - b * xd).collect();
    VecN::new(comps).expect("finite by construction")
}

/// `|x' ^ x''| / s'^3`.
pub fn curvature(state: &CurveState) -> Result<f64> {
    let speed = state.checked_speed()?;
    let w = wedge(&state.xdot, &state.xddot)?;
    Ok(w.magnitude() / (speed * speed * speed))
}

pub fn frenet(state: &CurveState) -> Result<FrenetData> {
    let speed = state.checked_speed()?;
    Ok(FrenetData {
        speed,
        unit_tangent: unit_tangent(&state.xdot)?,
        d2x_ds2: second_derivative_unchecked(state, speed),
        curvature: curvature(state)?,
    })
}
