#![allow(dead_code)]

use dqhc::algebra::{DualQuaternion, Quaternion, UnitDualQuaternion, Vec3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit quaternion (normalized 4-D Gaussian).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Quaternion {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let q = Quaternion::from_vec4(x);
        let n = q.norm();
        if n > 1e-3 {
            return q.scale(1.0 / n);
        }
    }
}

pub fn random_vec3<R: Rng>(rng: &mut R, half_width: f64) -> Vec3 {
    std::array::from_fn(|_| rng.random_range(-half_width..half_width))
}

pub fn random_pose<R: Rng>(rng: &mut R, half_width: f64) -> UnitDualQuaternion {
    UnitDualQuaternion::from_rotation_translation(random_rotation(rng), random_vec3(rng, half_width)).unwrap()
}

pub fn random_dual<R: Rng>(rng: &mut R) -> DualQuaternion {
    DualQuaternion::from_vec8(std::array::from_fn(|_| rng.random_range(-2.0..2.0)))
}

/// `exp(x)` of a dual quaternion by its power series.
pub fn dq_exp_series(x: DualQuaternion) -> DualQuaternion {
    let mut term = DualQuaternion::ONE;
    let mut sum = DualQuaternion::ONE;
    for n in 1..60 {
        term = (term * x).scale(1.0 / n as f64);
        sum = sum + term;
    }
    sum
}
