mod common;

use common::{dq_exp_series, random_pose, random_vec3, rng};
use dqhc::algebra::{DualQuaternion, Twist, UnitDualQuaternion};
use dqhc::controllers::{hybrid_law, Gains, HybridMemory, Logic};
use dqhc::kinematics::{
    closed_loop_rhs_oracle, integrate_constant, kinematic_rhs, kinematic_rhs_hamilton, step, step_ambient, Method,
};

/// Closed-form solution of `q̇ = ½ q ω` for constant `ω`: `q₀ exp(t ω / 2)`.
fn exact(q0: &UnitDualQuaternion, tw: &Twist, t: f64) -> DualQuaternion {
    q0.into_dual() * dq_exp_series(tw.to_dual().scale(0.5 * t))
}

fn global_error(q0: &UnitDualQuaternion, tw: &Twist, n: usize) -> f64 {
    let q = integrate_constant(q0, tw, 1.0 / n as f64, n, Method::Rk4Project).unwrap();
    (q.into_dual() - exact(q0, tw, 1.0)).euclidean_norm()
}

#[test]
fn series_oracle_reproduces_elementary_motions() {
    let rot = Twist::new([0.0, 0.0, std::f64::consts::PI], [0.0; 3]);
    let e = dq_exp_series(rot.to_dual().scale(0.5));
    assert!(e.p.eta.abs() < 1e-15 && (e.p.mu[2] - 1.0).abs() < 1e-15);
    let tr = Twist::new([0.0; 3], [1.0, 0.0, 0.0]);
    let u = UnitDualQuaternion::project(dq_exp_series(tr.to_dual().scale(0.5))).unwrap();
    assert!((u.translation()[0] - 1.0).abs() < 1e-15);
}

#[test]
fn rhs_routes_agree() {
    let mut r = rng(10);
    for _ in 0..1000 {
        let q = random_pose(&mut r, 3.0);
        let tw = Twist::new(random_vec3(&mut r, 2.0), random_vec3(&mut r, 2.0));
        let a = kinematic_rhs(&q, &tw);
        let b = kinematic_rhs_hamilton(&q, &tw);
        assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-13));
    }
}

#[test]
fn closed_loop_matches_component_odes() {
    let mut r = rng(11);
    use rand::Rng;
    for _ in 0..1000 {
        let q = random_pose(&mut r, 3.0);
        let h = if r.random_bool(0.5) { Logic::Plus } else { Logic::Minus };
        let (k1, k2) = (r.random_range(0.01..5.0), r.random_range(0.01..5.0));
        let g = Gains::new(k1, k2, 1.0).unwrap();
        let mem = HybridMemory::new(h, 0.3).unwrap();
        let via_product = kinematic_rhs(&q, &hybrid_law(&q, &mem, &g));
        let oracle = closed_loop_rhs_oracle(&q, h.value(), k1, k2);
        for (x, y) in via_product.iter().zip(oracle) {
            assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
        }
    }
}

#[test]
fn rk4_is_fourth_order_on_constant_twists() {
    let mut r = rng(12);
    for _ in 0..10 {
        let q0 = random_pose(&mut r, 2.0);
        let tw = Twist::new(random_vec3(&mut r, 4.0), random_vec3(&mut r, 4.0));
        let coarse = global_error(&q0, &tw, 10);
        let fine = global_error(&q0, &tw, 20);
        assert!(coarse / fine >= 15.0, "reduction {}", coarse / fine);
    }
}

#[test]
fn constant_twist_closed_forms_at_fine_step() {
    let q0 = UnitDualQuaternion::IDENTITY;
    let tw = Twist::new([0.0, 0.0, std::f64::consts::PI], [0.0; 3]);
    assert!(global_error(&q0, &tw, 1000) < 1e-6);
    let tw = Twist::new([0.0; 3], [1.0, 0.0, 0.0]);
    assert!(global_error(&q0, &tw, 1000) < 1e-6);
}

#[test]
fn projection_displacement_shrinks_at_least_fifth_order() {
    let mut r = rng(13);
    let q = random_pose(&mut r, 2.0);
    let tw = Twist::new([1.0, -2.0, 0.5], [0.3, 0.7, -1.1]);
    let disp = |dt: f64| {
        let raw = step_ambient(q.as_dual(), &tw, dt, Method::Rk4Project);
        let proj = UnitDualQuaternion::project(raw).unwrap();
        (raw - proj.into_dual()).euclidean_norm()
    };
    let (a, b) = (disp(0.08), disp(0.04));
    assert!(a / b >= 24.0, "ratio {}", a / b);
}

#[test]
fn manifold_holds_after_many_steps() {
    let mut q = UnitDualQuaternion::from_rotation_translation(common::random_rotation(&mut rng(14)), [1.0, -1.0, 2.0]).unwrap();
    let dt = 1e-3;
    for i in 0..100_000 {
        let t = i as f64 * dt;
        let tw = Twist::new([3.0 * t.sin(), 2.0 * (0.7 * t).cos(), 1.0], [(2.0 * t).cos(), 0.5, -t.sin()]);
        q = step(&q, &tw, dt, Method::Rk4Project).unwrap();
    }
    assert!(q.as_dual().norm_residual() <= 1e-9);
    assert!(q.as_dual().orthogonality_residual() <= 1e-9);
}
