//! Quaternion and dual quaternion algebra.
//!
//! A [`Quaternion`] is stored as a scalar part `eta` and a 3-vector part `mu`.
//! A [`DualQuaternion`] is a pair `p + ε d` with `ε² = 0`. Unit dual
//! quaternions ([`UnitDualQuaternion`]) represent rigid-body poses and are the
//! state space of the kinematic simulator.
//!
//! The canonical 8-vector layout used throughout the crate (and by every file
//! format) is `[η, μ₁, μ₂, μ₃, η′, μ′₁, μ′₂, μ′₃]`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance for manifold membership checks.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Primary parts with a norm at or below this cannot be normalized.
pub const MIN_PRIMARY_NORM: f64 = 1e-12;

/// Tolerance on `‖r‖ = 1` when building a pose from rotation and translation.
pub const ROTATION_TOLERANCE: f64 = 1e-6;

pub type Vec3 = [f64; 3];
pub type Vec8 = [f64; 8];
pub type Mat4 = [[f64; 4]; 4];
pub type Mat8 = [[f64; 8]; 8];

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// A quaternion `η + μ₁î + μ₂ĵ + μ₃k̂`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub eta: f64,
    pub mu: Vec3,
}

impl Quaternion {
    pub const ZERO: Self = Self { eta: 0.0, mu: [0.0; 3] };
    pub const ONE: Self = Self { eta: 1.0, mu: [0.0; 3] };
    pub const I: Self = Self { eta: 0.0, mu: [1.0, 0.0, 0.0] };
    pub const J: Self = Self { eta: 0.0, mu: [0.0, 1.0, 0.0] };
    pub const K: Self = Self { eta: 0.0, mu: [0.0, 0.0, 1.0] };

    #[inline]
    pub const fn new(eta: f64, mu1: f64, mu2: f64, mu3: f64) -> Self {
        Self { eta, mu: [mu1, mu2, mu3] }
    }

    /// A pure quaternion (zero scalar part) from a 3-vector.
    #[inline]
    pub const fn pure(v: Vec3) -> Self {
        Self { eta: 0.0, mu: v }
    }

    #[inline]
    pub const fn from_vec4(x: [f64; 4]) -> Self {
        Self { eta: x[0], mu: [x[1], x[2], x[3]] }
    }

    #[inline]
    pub const fn to_vec4(self) -> [f64; 4] {
        [self.eta, self.mu[0], self.mu[1], self.mu[2]]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self { eta: self.eta, mu: scale3(&self.mu, -1.0) }
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.eta * self.eta + dot3(&self.mu, &self.mu)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Euclidean inner product of the two 4-vectors.
    #[inline]
    pub fn inner(self, other: Self) -> f64 {
        self.eta * other.eta + dot3(&self.mu, &other.mu)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self { eta: self.eta * s, mu: scale3(&self.mu, s) }
    }

    #[inline]
    pub fn is_pure(self) -> bool {
        self.eta.abs() <= UNIT_TOLERANCE
    }

    fn require_pure(self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::NotPure { scalar: self.eta })
        }
    }

    /// Dot product of two pure quaternions, `−(uv + vu)/2`.
    pub fn dot(self, other: Self) -> Result<f64> {
        self.require_pure()?;
        other.require_pure()?;
        Ok(-((self * other) + (other * self)).eta / 2.0)
    }

    /// Cross product of two pure quaternions, `(uv − vu)/2`.
    pub fn cross(self, other: Self) -> Result<Self> {
        self.require_pure()?;
        other.require_pure()?;
        let mut c = ((self * other) - (other * self)).scale(0.5);
        // the scalar part cancels exactly for pure inputs
        c.eta = 0.0;
        Ok(c)
    }

    /// Left Hamilton operator: `hamilton_plus(a) · vec4(b) = vec4(a b)`.
    pub fn hamilton_plus(self) -> Mat4 {
        let (e, [m1, m2, m3]) = (self.eta, self.mu);
        [
            [e, -m1, -m2, -m3],
            [m1, e, -m3, m2],
            [m2, m3, e, -m1],
            [m3, -m2, m1, e],
        ]
    }

    pub fn is_finite(self) -> bool {
        self.eta.is_finite() && self.mu.iter().all(|x| x.is_finite())
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self { eta: self.eta + rhs.eta, mu: add3(&self.mu, &rhs.mu) }
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self { eta: self.eta - rhs.eta, mu: sub3(&self.mu, &rhs.mu) }
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let eta = self.eta * rhs.eta - dot3(&self.mu, &rhs.mu);
        let c = cross3(&self.mu, &rhs.mu);
        let mu = [
            self.eta * rhs.mu[0] + rhs.eta * self.mu[0] + c[0],
            self.eta * rhs.mu[1] + rhs.eta * self.mu[1] + c[1],
            self.eta * rhs.mu[2] + rhs.eta * self.mu[2] + c[2],
        ];
        Self { eta, mu }
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// A dual quaternion `p + ε d`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualQuaternion {
    pub p: Quaternion,
    pub d: Quaternion,
}

impl DualQuaternion {
    pub const ZERO: Self = Self { p: Quaternion::ZERO, d: Quaternion::ZERO };
    pub const ONE: Self = Self { p: Quaternion::ONE, d: Quaternion::ZERO };

    #[inline]
    pub const fn new(p: Quaternion, d: Quaternion) -> Self {
        Self { p, d }
    }

    /// Inverse of [`DualQuaternion::vec8`].
    #[inline]
    pub const fn from_vec8(x: Vec8) -> Self {
        Self {
            p: Quaternion::new(x[0], x[1], x[2], x[3]),
            d: Quaternion::new(x[4], x[5], x[6], x[7]),
        }
    }

    /// `[η, μ₁, μ₂, μ₃, η′, μ′₁, μ′₂, μ′₃]`.
    #[inline]
    pub const fn vec8(self) -> Vec8 {
        let (p, d) = (self.p, self.d);
        [p.eta, p.mu[0], p.mu[1], p.mu[2], d.eta, d.mu[0], d.mu[1], d.mu[2]]
    }

    /// Conjugates both parts (`Re − Im`).
    #[inline]
    pub fn conj(self) -> Self {
        Self { p: self.p.conj(), d: self.d.conj() }
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self { p: self.p.scale(s), d: self.d.scale(s) }
    }

    /// 8×8 left Hamilton operator, block form `[[H(p), 0], [H(d), H(p)]]`.
    pub fn hamilton_plus(self) -> Mat8 {
        let hp = self.p.hamilton_plus();
        let hd = self.d.hamilton_plus();
        let mut m = [[0.0; 8]; 8];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = hp[r][c];
                m[r + 4][c + 4] = hp[r][c];
                m[r + 4][c] = hd[r][c];
            }
        }
        m
    }

    /// Euclidean norm of the 8-vector.
    pub fn euclidean_norm(self) -> f64 {
        (self.p.norm_squared() + self.d.norm_squared()).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.p.is_finite() && self.d.is_finite()
    }

    /// Deviation from the unit-norm constraint `‖p‖ = 1`.
    pub fn norm_residual(self) -> f64 {
        (self.p.norm() - 1.0).abs()
    }

    /// Deviation from `ηη′ + μ·μ′ = 0`.
    pub fn orthogonality_residual(self) -> f64 {
        self.p.inner(self.d).abs()
    }
}

impl Add for DualQuaternion {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self { p: self.p + rhs.p, d: self.d + rhs.d }
    }
}

impl Sub for DualQuaternion {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self { p: self.p - rhs.p, d: self.d - rhs.d }
    }
}

impl Neg for DualQuaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for DualQuaternion {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self { p: self.p * rhs.p, d: self.p * rhs.d + self.d * rhs.p }
    }
}

/// Matrix-vector product for the Hamilton operators.
pub fn mat8_mul_vec8(m: &Mat8, x: &Vec8) -> Vec8 {
    let mut y = [0.0; 8];
    for (yr, row) in y.iter_mut().zip(m) {
        *yr = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    y
}

/// A dual quaternion on the unit manifold: `‖p‖ = 1` and `⟨p, d⟩ = 0`.
///
/// [`UnitDualQuaternion::new`] validates against [`UNIT_TOLERANCE`] and
/// rejects; [`UnitDualQuaternion::project`] repairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitDualQuaternion(DualQuaternion);

impl UnitDualQuaternion {
    pub const IDENTITY: Self = Self(DualQuaternion::ONE);

    pub fn new(dq: DualQuaternion) -> Result<Self> {
        let norm_residual = dq.norm_residual();
        let orthogonality_residual = dq.orthogonality_residual();
        if norm_residual <= UNIT_TOLERANCE && orthogonality_residual <= UNIT_TOLERANCE {
            Ok(Self(dq))
        } else {
            Err(Error::NotOnManifold { norm_residual, orthogonality_residual })
        }
    }

    /// Wraps without validation, for pointwise formula checks.
    #[cfg(test)]
    pub(crate) fn new_unchecked(dq: DualQuaternion) -> Self {
        Self(dq)
    }

    /// Normalizes the primary part, then removes the component of the dual
    /// part along it.
    pub fn project(dq: DualQuaternion) -> Result<Self> {
        let n = dq.p.norm();
        if n.is_nan() || n <= MIN_PRIMARY_NORM {
            return Err(Error::ZeroPrimaryPart { norm: n });
        }
        let p = dq.p.scale(1.0 / n);
        let along = p.inner(dq.d);
        let d = dq.d - p.scale(along);
        Ok(Self(DualQuaternion { p, d }))
    }

    /// Pose `r + ε ½ r t` from a unit rotation and a translation.
    pub fn from_rotation_translation(r: Quaternion, t: Vec3) -> Result<Self> {
        let deviation = (r.norm() - 1.0).abs();
        if deviation > ROTATION_TOLERANCE {
            return Err(Error::NonUnitRotation { deviation });
        }
        Self::project(DualQuaternion { p: r, d: (r * Quaternion::pure(t)).scale(0.5) })
    }

    #[inline]
    pub fn as_dual(&self) -> &DualQuaternion {
        &self.0
    }

    #[inline]
    pub fn into_dual(self) -> DualQuaternion {
        self.0
    }

    #[inline]
    pub fn rotation(&self) -> Quaternion {
        self.0.p
    }

    /// Translation `2 conj(r) d`, returned as a 3-vector.
    pub fn translation(&self) -> Vec3 {
        (self.0.p.conj() * self.0.d).scale(2.0).mu
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.0.p.eta
    }

    #[inline]
    pub fn mu(&self) -> Vec3 {
        self.0.p.mu
    }

    #[inline]
    pub fn eta_dual(&self) -> f64 {
        self.0.d.eta
    }

    #[inline]
    pub fn mu_dual(&self) -> Vec3 {
        self.0.d.mu
    }

    #[inline]
    pub fn vec8(&self) -> Vec8 {
        self.0.vec8()
    }

    /// Group inverse (the conjugate).
    #[inline]
    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    #[inline]
    pub fn neg(&self) -> Self {
        Self(-self.0)
    }

    /// Group product, re-projected to absorb rounding drift.
    pub fn compose(&self, rhs: &Self) -> Self {
        // the product of unit elements has primary norm ≈ 1, never near 0
        Self::project(self.0 * rhs.0).expect("product of unit dual quaternions")
    }

    /// `min(‖q − 1‖, ‖q + 1‖)` in the Euclidean 8-norm.
    pub fn distance_to_identity_set(&self) -> f64 {
        let plus = (self.0 - DualQuaternion::ONE).euclidean_norm();
        let minus = (self.0 + DualQuaternion::ONE).euclidean_norm();
        plus.min(minus)
    }
}

impl From<UnitDualQuaternion> for DualQuaternion {
    fn from(u: UnitDualQuaternion) -> Self {
        u.0
    }
}

/// Body-frame twist `ω + ε v`, a pure dual quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub w: Vec3,
    pub v: Vec3,
}

impl Twist {
    pub const ZERO: Self = Self { w: [0.0; 3], v: [0.0; 3] };

    #[inline]
    pub const fn new(w: Vec3, v: Vec3) -> Self {
        Self { w, v }
    }

    #[inline]
    pub fn to_dual(self) -> DualQuaternion {
        DualQuaternion { p: Quaternion::pure(self.w), d: Quaternion::pure(self.v) }
    }

    #[inline]
    pub fn vec8(self) -> Vec8 {
        self.to_dual().vec8()
    }

    /// Euclidean norm of `(w, v)`.
    pub fn norm(self) -> f64 {
        (dot3(&self.w, &self.w) + dot3(&self.v, &self.v)).sqrt()
    }
}
