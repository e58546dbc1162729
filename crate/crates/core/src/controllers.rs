//! Feedback laws mapping a pose error (and, for the hybrid law, a logic
//! memory) to a body twist.
//!
//! Every law has a `*_measured` variant taking the scalar part `η` as seen by
//! a noisy sensor. The remaining components of the error are exact.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{norm3, scale3, Twist, UnitDualQuaternion, Vec3};
use crate::error::{Error, Result};

/// Below this `‖μ‖` the rotational term of the discontinuous law is zero.
pub const MU_SINGULARITY: f64 = 1e-12;

/// Logic state `h ∈ {−1, +1}` of the hybrid controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    Plus,
    Minus,
}

impl Logic {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Logic::Plus => 1.0,
            Logic::Minus => -1.0,
        }
    }

    /// `+1` for `x ≥ 0`, `−1` otherwise.
    #[inline]
    pub fn of(x: f64) -> Self {
        if x >= 0.0 {
            Logic::Plus
        } else {
            Logic::Minus
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Logic::Plus => Logic::Minus,
            Logic::Minus => Logic::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Logic::Plus => 1,
            Logic::Minus => -1,
        }
    }
}

impl TryFrom<i64> for Logic {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Logic::Plus),
            -1 => Ok(Logic::Minus),
            _ => Err(Error::config(format!("h must be -1 or 1, got {v}"))),
        }
    }
}

/// Hysteresis memory: logic state plus band half-width `δ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridMemory {
    pub h: Logic,
    pub delta: f64,
}

impl HybridMemory {
    pub fn new(h: Logic, delta: f64) -> Result<Self> {
        validate_delta(delta)?;
        Ok(Self { h, delta })
    }

    /// True when `(q, h)` lies in the jump set, `h η ≤ −δ`.
    #[inline]
    pub fn in_jump_set(&self, eta_measured: f64) -> bool {
        self.h.value() * eta_measured <= -self.delta
    }
}

pub fn validate_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("delta must lie in (0,1), got {delta}")))
    }
}

/// Strictly positive control gains. `k` is the single proportional gain of
/// the discontinuous law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
    pub k: f64,
}

impl Gains {
    pub fn new(k1: f64, k2: f64, k: f64) -> Result<Self> {
        for (name, v) in [("k1", k1), ("k2", k2), ("k", k)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("gain {name} must be > 0, got {v}")));
            }
        }
        Ok(Self { k1, k2, k })
    }

    /// `k1 = k2 = k`.
    pub fn uniform(k: f64) -> Result<Self> {
        Self::new(k, k, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Hybrid,
    Discontinuous,
    Continuous,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [ControllerKind::Hybrid, ControllerKind::Discontinuous, ControllerKind::Continuous];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Hybrid => "hybrid",
            ControllerKind::Discontinuous => "discontinuous",
            ControllerKind::Continuous => "continuous",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown controller `{s}`")))
    }
}

/// `q_e = conj(q_m) q_d`.
pub fn error_pose(q_measured: &UnitDualQuaternion, q_desired: &UnitDualQuaternion) -> UnitDualQuaternion {
    q_measured.conj().compose(q_desired)
}

/// `ω = −k₁ h μ − ε k₂ η μ′`.
pub fn hybrid_law(q_e: &UnitDualQuaternion, mem: &HybridMemory, g: &Gains) -> Twist {
    hybrid_law_measured(q_e, q_e.eta(), mem.h, g)
}

pub fn hybrid_law_measured(q_e: &UnitDualQuaternion, eta_measured: f64, h: Logic, g: &Gains) -> Twist {
    let w = scale3(&q_e.mu(), -g.k1 * h.value());
    let v = scale3(&q_e.mu_dual(), -g.k2 * eta_measured);
    Twist { w, v }
}

/// Hysteresis update: `h⁺ = sgn(η)` when `h η ≤ −δ`, otherwise unchanged.
pub fn hybrid_jump(eta_measured: f64, mem: &HybridMemory) -> HybridMemory {
    if mem.in_jump_set(eta_measured) {
        // h η ≤ −δ < 0 forces η ≠ 0
        HybridMemory { h: Logic::of(eta_measured), delta: mem.delta }
    } else {
        *mem
    }
}

/// Hybrid law with `h` frozen at `+1`; stabilizes only `+1`.
pub fn continuous_law(q_e: &UnitDualQuaternion, g: &Gains) -> Twist {
    continuous_law_measured(q_e, q_e.eta(), g)
}

pub fn continuous_law_measured(q_e: &UnitDualQuaternion, eta_measured: f64, g: &Gains) -> Twist {
    hybrid_law_measured(q_e, eta_measured, Logic::Plus, g)
}

/// Sign-switching law with the discontinuity at `η = 0`.
pub fn discontinuous_law(q_e: &UnitDualQuaternion, g: &Gains) -> Twist {
    discontinuous_law_measured(q_e, q_e.eta(), g)
}

pub fn discontinuous_law_measured(q_e: &UnitDualQuaternion, eta_measured: f64, g: &Gains) -> Twist {
    let mu = q_e.mu();
    let mu_d = q_e.mu_dual();
    let eta_d = q_e.eta_dual();

    // noisy readings may leave [-1, 1]
    let angle = eta_measured.clamp(-1.0, 1.0).acos();
    let prefactor = if eta_measured >= 0.0 { angle } else { angle - PI };
    let mu_norm = norm3(&mu);
    let w: Vec3 = if mu_norm < MU_SINGULARITY {
        [0.0; 3]
    } else {
        scale3(&mu, -2.0 * g.k * prefactor / mu_norm)
    };

    let c = crate::algebra::cross3(&mu, &mu_d);
    let v: Vec3 = std::array::from_fn(|i| eta_measured * mu_d[i] - eta_d * mu[i] - c[i]);
    Twist { w, v: scale3(&v, -2.0 * g.k) }
}

/// Branch of the discontinuous law selected by the measurement.
pub fn discontinuous_branch(eta_measured: f64) -> Logic {
    Logic::of(eta_measured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{DualQuaternion, Quaternion};
    use approx::assert_abs_diff_eq;

    fn raw(eta: f64, mu: Vec3, eta_d: f64, mu_d: Vec3) -> DualQuaternion {
        DualQuaternion::new(Quaternion { eta, mu }, Quaternion { eta: eta_d, mu: mu_d })
    }

    fn gains(k1: f64, k2: f64, k: f64) -> Gains {
        Gains::new(k1, k2, k).unwrap()
    }

    #[test]
    fn memory_and_gain_validation() {
        assert!(HybridMemory::new(Logic::Plus, 0.3).is_ok());
        for d in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
            assert!(HybridMemory::new(Logic::Plus, d).is_err());
        }
        assert!(Gains::new(1.0, 0.0, 1.0).is_err());
        assert!(Gains::new(1.0, 1.0, -2.0).is_err());
        assert!(Logic::try_from(0).is_err());
        assert_eq!(Logic::try_from(-1).unwrap(), Logic::Minus);
    }

    #[test]
    fn error_pose_cases() {
        let qd = UnitDualQuaternion::from_rotation_translation(Quaternion::new(0.5, -0.5, 0.5, 0.5), [0.3, 1.0, -2.0]).unwrap();
        let e = error_pose(&qd, &qd);
        assert!((e.into_dual() - DualQuaternion::ONE).euclidean_norm() < 1e-15);
        let e = error_pose(&qd.neg(), &qd);
        assert!((e.into_dual() + DualQuaternion::ONE).euclidean_norm() < 1e-15);
    }

    #[test]
    fn hybrid_law_equilibria_and_substitution() {
        let g = gains(2.0, 4.0, 1.0);
        let mem = HybridMemory::new(Logic::Plus, 0.3).unwrap();
        assert_eq!(hybrid_law(&UnitDualQuaternion::IDENTITY, &mem, &g).norm(), 0.0);
        assert_eq!(hybrid_law(&UnitDualQuaternion::IDENTITY.neg(), &mem, &g).norm(), 0.0);

        // η = 0.5, μ = 0.1 i, μ′ = 0.2 j, h = 1: pointwise substitution
        let q = UnitDualQuaternion::new_unchecked(raw(0.5, [0.1, 0.0, 0.0], 0.0, [0.0, 0.2, 0.0]));
        let t = hybrid_law(&q, &mem, &g);
        assert_abs_diff_eq!(t.w[0], -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(t.v[1], -0.4, epsilon = 1e-15);
        assert_eq!([t.w[1], t.w[2], t.v[0], t.v[2]], [0.0; 4]);
    }

    #[test]
    fn jump_rule() {
        let m = HybridMemory::new(Logic::Plus, 0.3).unwrap();
        assert_eq!(hybrid_jump(-0.5, &m).h, Logic::Minus);
        assert_eq!(hybrid_jump(-0.2, &m), m);
        assert_eq!(hybrid_jump(-0.3, &m).h, Logic::Minus);
        let m = HybridMemory::new(Logic::Minus, 0.3).unwrap();
        assert_eq!(hybrid_jump(0.31, &m).h, Logic::Plus);
        assert_eq!(hybrid_jump(0.29, &m), m);
    }

    #[test]
    fn discontinuous_cases() {
        let g = gains(1.0, 1.0, 1.0);
        assert_eq!(discontinuous_law(&UnitDualQuaternion::IDENTITY, &g).norm(), 0.0);

        let q = UnitDualQuaternion::new(raw(0.0, [1.0, 0.0, 0.0], 0.0, [0.0; 3])).unwrap();
        let t = discontinuous_law(&q, &g);
        assert_abs_diff_eq!(t.w[0], -PI, epsilon = 1e-15);
        assert_eq!(t.v, [0.0; 3]);

        let t = discontinuous_law(&UnitDualQuaternion::IDENTITY.neg(), &g);
        assert_eq!(t.w, [0.0; 3]);
    }

    #[test]
    fn discontinuous_limit_near_antipode() {
        let g = gains(1.0, 1.0, 3.0);
        let eps: f64 = 1e-8;
        let q = UnitDualQuaternion::project(raw(-1.0, [eps, 0.0, 0.0], 0.0, [0.0; 3])).unwrap();
        let t = discontinuous_law(&q, &g);
        assert!(norm3(&t.w) < 1e-6);
    }

    #[test]
    fn discontinuous_clamps_noisy_reading() {
        let g = gains(1.0, 1.0, 1.0);
        let q = UnitDualQuaternion::new(raw(0.0, [0.0, 1.0, 0.0], 0.0, [0.0; 3])).unwrap();
        let t = discontinuous_law_measured(&q, 1.4, &g);
        assert!(t.w.iter().all(|x| x.is_finite()));
        assert_eq!(t.w, [0.0; 3]);
        let t = discontinuous_law_measured(&q, -1.4, &g);
        assert_eq!(t.w, [0.0; 3]);
    }

    #[test]
    fn continuous_is_hybrid_with_plus() {
        let g = gains(0.7, 1.9, 1.0);
        let q = UnitDualQuaternion::from_rotation_translation(Quaternion::new(0.0, 0.6, 0.0, 0.8), [1.0, 2.0, 3.0]).unwrap();
        let m = HybridMemory::new(Logic::Plus, 0.5).unwrap();
        assert_eq!(continuous_law(&q, &g), hybrid_law(&q, &m, &g));
        assert_eq!(continuous_law(&UnitDualQuaternion::IDENTITY.neg(), &g).norm(), 0.0);
    }

    #[test]
    fn controller_names_parse() {
        for c in ControllerKind::ALL {
            assert_eq!(c.name().parse::<ControllerKind>().unwrap(), c);
        }
        assert!("pid".parse::<ControllerKind>().is_err());
    }
}
