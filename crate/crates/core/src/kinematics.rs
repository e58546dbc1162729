//! Rigid-body kinematics `q̇ = ½ q ω` and fixed-step integration on the unit
//! dual quaternion manifold.
//!
//! Steps are taken in the ambient ℝ⁸ with the twist held constant over the
//! step, then projected back onto the manifold.

use serde::{Deserialize, Serialize};

use crate::algebra::{cross3, dot3, mat8_mul_vec8, DualQuaternion, Twist, UnitDualQuaternion, Vec8};
use crate::error::{Error, Result};

pub const DEFAULT_DT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4Project,
    EulerProject,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub dt: f64,
    pub method: Method,
    pub t_final: f64,
}

impl IntegrationSettings {
    pub fn new(dt: f64, method: Method, t_final: f64) -> Result<Self> {
        let s = Self { dt, method, t_final };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return Err(Error::config(format!("t_final must be >= dt, got {}", self.t_final)));
        }
        Ok(())
    }

    /// Number of steps covering `[0, t_final]`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// `vec8(½ q ω)`.
pub fn kinematic_rhs(q: &UnitDualQuaternion, tw: &Twist) -> Vec8 {
    ambient_rhs(q.as_dual(), tw)
}

/// Same as [`kinematic_rhs`] evaluated through the Hamilton operator.
pub fn kinematic_rhs_hamilton(q: &UnitDualQuaternion, tw: &Twist) -> Vec8 {
    let y = mat8_mul_vec8(&q.as_dual().hamilton_plus(), &tw.vec8());
    y.map(|x| 0.5 * x)
}

#[inline]
fn ambient_rhs(q: &DualQuaternion, tw: &Twist) -> Vec8 {
    (*q * tw.to_dual()).scale(0.5).vec8()
}

#[inline]
fn axpy(x: &Vec8, a: f64, y: &Vec8) -> Vec8 {
    std::array::from_fn(|i| x[i] + a * y[i])
}

/// Advances the ambient state by one step without projecting.
pub fn step_ambient(q: &DualQuaternion, tw: &Twist, dt: f64, method: Method) -> DualQuaternion {
    let x = q.vec8();
    let f = |x: &Vec8| ambient_rhs(&DualQuaternion::from_vec8(*x), tw);
    let next = match method {
        Method::EulerProject => axpy(&x, dt, &f(&x)),
        Method::Rk4Project => {
            let k1 = f(&x);
            let k2 = f(&axpy(&x, 0.5 * dt, &k1));
            let k3 = f(&axpy(&x, 0.5 * dt, &k2));
            let k4 = f(&axpy(&x, dt, &k3));
            std::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        }
    };
    DualQuaternion::from_vec8(next)
}

/// One integration step followed by projection onto the manifold.
pub fn step(q: &UnitDualQuaternion, tw: &Twist, dt: f64, method: Method) -> Result<UnitDualQuaternion> {
    UnitDualQuaternion::project(step_ambient(q.as_dual(), tw, dt, method))
}

/// Integrates a constant twist for `n` steps.
pub fn integrate_constant(q: &UnitDualQuaternion, tw: &Twist, dt: f64, n: usize, method: Method) -> Result<UnitDualQuaternion> {
    (0..n).try_fold(*q, |q, _| step(&q, tw, dt, method))
}

/// Component form of the closed loop under the hybrid law with memory `h`.
///
/// Kept independent of the controller and of the dual quaternion product so
/// it can serve as a cross-check of both.
pub fn closed_loop_rhs_oracle(q: &UnitDualQuaternion, h: f64, k1: f64, k2: f64) -> Vec8 {
    let eta = q.eta();
    let mu = q.mu();
    let eta_d = q.eta_dual();
    let mu_d = q.mu_dual();
    let mu_sq = dot3(&mu, &mu);
    let c = cross3(&mu, &mu_d);

    let eta_dot = 0.5 * k1 * h * mu_sq;
    let mu_dot = mu.map(|m| -0.5 * eta * k1 * h * m);
    let eta_d_dot = 0.5 * (k1 * h + k2 * eta) * dot3(&mu_d, &mu);
    let a = k1 * h - k2 * eta;
    let mu_d_dot: [f64; 3] =
        std::array::from_fn(|i| 0.5 * (a * c[i] - k1 * h * eta_d * mu[i] - k2 * eta * eta * mu_d[i]));

    [
        eta_dot, mu_dot[0], mu_dot[1], mu_dot[2], eta_d_dot, mu_d_dot[0], mu_d_dot[1], mu_d_dot[2],
    ]
}
