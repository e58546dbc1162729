//! Hybrid-time executor for the closed loop.
//!
//! The simulated state is the pose error `q_e` together with the controller
//! memory. At each sampling instant:
//!
//! 1. one noisy reading `η_m = η + n` is drawn,
//! 2. the jump condition `h η_m ≤ −δ` is tested and, if it holds, `h` jumps
//!    (jumps take priority over flow on the overlap of the two sets),
//! 3. the twist is computed from the same reading and held over the step,
//! 4. the pose error is advanced by one projected integration step.
//!
//! Every instant is logged as a [`TrajectoryRecord`], every executed jump as a
//! [`JumpEvent`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::algebra::{dot3, DualQuaternion, Twist, UnitDualQuaternion, Vec3};
use crate::batch;
use crate::controllers::{
    continuous_law_measured, discontinuous_branch, discontinuous_law_measured, error_pose, hybrid_jump,
    hybrid_law_measured, ControllerKind, Gains, HybridMemory, Logic,
};
use crate::error::{Error, Result};
use crate::kinematics;
use crate::scenario::{NoiseKind, NoiseModel, Scenario};

/// `V` below this counts as converged.
pub const V_TOLERANCE: f64 = 1e-4;

/// Any state component beyond this magnitude aborts the run.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// `V(q, h) = 2(1 − hη) + η′² + ‖μ′‖²`.
pub fn lyapunov(q: &UnitDualQuaternion, h: f64) -> f64 {
    lyapunov_at(q, q.eta(), h)
}

/// Lyapunov function with the scalar part replaced by `eta`.
pub fn lyapunov_at(q: &UnitDualQuaternion, eta: f64, h: f64) -> f64 {
    let mu_d = q.mu_dual();
    2.0 * (1.0 - h * eta) + q.eta_dual().powi(2) + dot3(&mu_d, &mu_d)
}

/// Hybrid state `(q, h)` at hybrid time `(t, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridState {
    pub q: UnitDualQuaternion,
    pub h: Logic,
    pub t: f64,
    pub j: u32,
}

/// One logged sampling instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub j: u32,
    /// Memory state for the hybrid law, selected branch for the
    /// discontinuous law, `+1` for the continuous law.
    pub h: i8,
    pub eta: f64,
    pub mu: Vec3,
    pub eta_dual: f64,
    pub mu_dual: Vec3,
    pub v: f64,
    pub twist_norm: f64,
    pub jump: bool,
}

impl TrajectoryRecord {
    pub fn pose(&self) -> DualQuaternion {
        DualQuaternion::from_vec8([
            self.eta, self.mu[0], self.mu[1], self.mu[2], self.eta_dual, self.mu_dual[0], self.mu_dual[1], self.mu_dual[2],
        ])
    }

    /// Recomputes `V` from the logged components.
    pub fn lyapunov_from_fields(&self) -> f64 {
        2.0 * (1.0 - self.h as f64 * self.eta) + self.eta_dual.powi(2) + dot3(&self.mu_dual, &self.mu_dual)
    }

    /// Translation `p = 2 conj(r) q′` of the logged pose.
    pub fn translation(&self) -> Vec3 {
        let dq = self.pose();
        (dq.p.conj() * dq.d).scale(2.0).mu
    }
}

/// An executed jump of the logic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub t: f64,
    /// Jump counter after the jump.
    pub j: u32,
    pub h_before: Logic,
    pub h_after: Logic,
    pub eta: f64,
    pub eta_measured: f64,
    /// `V` from the true state, before and after.
    pub v_before: f64,
    pub v_after: f64,
    /// `V` evaluated at the measured scalar part, before and after.
    pub v_measured_before: f64,
    pub v_measured_after: f64,
}

impl JumpEvent {
    /// `4 h η_m` with pre-jump values.
    pub fn expected_decrease(&self) -> f64 {
        4.0 * self.h_before.value() * self.eta_measured
    }

    pub fn measured_delta_v(&self) -> f64 {
        self.v_measured_after - self.v_measured_before
    }

    pub fn true_delta_v(&self) -> f64 {
        self.v_after - self.v_before
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub label: String,
    pub controller: ControllerKind,
    pub seed: u64,
    pub stream: u64,
    pub final_state: HybridState,
    pub jumps: u32,
    pub sign_flips: u32,
    /// First time from which `V < V_TOLERANCE` holds for the rest of the run.
    pub convergence_time: Option<f64>,
    pub terminal_v: f64,
    /// 8-norm moved by projecting the configured initial pose.
    pub projection_displacement: f64,
    pub projection_displacement_desired: f64,
    pub steps: usize,
}

impl RunSummary {
    /// Sign of the terminal scalar part, i.e. which of `±1` was approached.
    pub fn terminal_sign(&self) -> Logic {
        Logic::of(self.final_state.q.eta())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub jumps: Vec<JumpEvent>,
    pub summary: RunSummary,
}

struct NoiseSource {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl NoiseSource {
    fn new(model: &NoiseModel, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        rng.set_stream(stream);
        let normal = (model.kind == NoiseKind::GaussianEta && model.sigma > 0.0)
            .then(|| Normal::new(0.0, model.sigma).expect("sigma validated"));
        Self { rng, normal }
    }

    #[inline]
    fn sample(&mut self) -> f64 {
        match &self.normal {
            Some(n) => n.sample(&mut self.rng),
            None => 0.0,
        }
    }
}

fn bounded(q: &UnitDualQuaternion) -> bool {
    q.vec8().iter().all(|x| x.is_finite() && x.abs() <= DIVERGENCE_BOUND)
}

/// Runs a scenario on RNG stream 0, keeping the full trajectory.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    simulate(scenario, 0, true)
}

/// Runs a scenario on the given RNG stream, keeping only the summary.
pub fn run_summary(scenario: &Scenario, stream: u64) -> Result<RunSummary> {
    simulate(scenario, stream, false).map(|o| o.summary)
}

/// Runs on a given RNG stream.
pub fn run_stream(scenario: &Scenario, stream: u64) -> Result<RunOutput> {
    simulate(scenario, stream, true)
}

fn simulate(scenario: &Scenario, stream: u64, keep_records: bool) -> Result<RunOutput> {
    scenario.validate()?;
    let q_initial = UnitDualQuaternion::project(scenario.q_initial)?;
    let q_desired = UnitDualQuaternion::project(scenario.q_desired)?;
    let projection_displacement = (q_initial.into_dual() - scenario.q_initial).euclidean_norm();
    let projection_displacement_desired = (q_desired.into_dual() - scenario.q_desired).euclidean_norm();

    let settings = scenario.integration;
    let steps = settings.steps();
    let gains: Gains = scenario.gains;
    let mut noise = NoiseSource::new(&scenario.noise, stream);
    let mut mem = scenario.delta.map(|delta| HybridMemory { h: scenario.h_initial, delta });

    let mut state = HybridState { q: error_pose(&q_initial, &q_desired), h: scenario.h_initial, t: 0.0, j: 0 };
    let mut records = Vec::with_capacity(if keep_records { steps + 1 } else { 0 });
    let mut jumps = Vec::new();
    let mut prev_w: Option<Vec3> = None;
    let mut sign_flips = 0u32;
    let mut converged_since: Option<f64> = None;
    let mut last_v = f64::NAN;

    for i in 0..=steps {
        state.t = i as f64 * settings.dt;
        let eta = state.q.eta();
        let eta_m = eta + noise.sample();

        let mut jumped = false;
        if let Some(m) = mem.as_mut() {
            if m.in_jump_set(eta_m) {
                let before = *m;
                *m = hybrid_jump(eta_m, &before);
                let (hb, ha) = (before.h.value(), m.h.value());
                state.j += 1;
                jumped = true;
                jumps.push(JumpEvent {
                    t: state.t,
                    j: state.j,
                    h_before: before.h,
                    h_after: m.h,
                    eta,
                    eta_measured: eta_m,
                    v_before: lyapunov(&state.q, hb),
                    v_after: lyapunov(&state.q, ha),
                    v_measured_before: lyapunov_at(&state.q, eta_m, hb),
                    v_measured_after: lyapunov_at(&state.q, eta_m, ha),
                });
                // h⁺ η_m > 0 ≥ −δ: a second jump at this instant is impossible
                assert!(!m.in_jump_set(eta_m), "consecutive jumps at t = {}", state.t);
            }
            state.h = m.h;
        }

        let (twist, logged_h): (Twist, Logic) = match scenario.controller {
            ControllerKind::Hybrid => (hybrid_law_measured(&state.q, eta_m, state.h, &gains), state.h),
            ControllerKind::Continuous => (continuous_law_measured(&state.q, eta_m, &gains), Logic::Plus),
            ControllerKind::Discontinuous => {
                (discontinuous_law_measured(&state.q, eta_m, &gains), discontinuous_branch(eta_m))
            }
        };
        if scenario.controller != ControllerKind::Hybrid {
            state.h = logged_h;
        }

        if let Some(w) = prev_w {
            if dot3(&w, &twist.w) < 0.0 {
                sign_flips += 1;
            }
        }
        prev_w = Some(twist.w);

        let v = lyapunov(&state.q, logged_h.value());
        last_v = v;
        if v < V_TOLERANCE {
            converged_since.get_or_insert(state.t);
        } else {
            converged_since = None;
        }

        if keep_records {
            records.push(TrajectoryRecord {
                t: state.t,
                j: state.j,
                h: logged_h.as_i8(),
                eta,
                mu: state.q.mu(),
                eta_dual: state.q.eta_dual(),
                mu_dual: state.q.mu_dual(),
                v,
                twist_norm: twist.norm(),
                jump: jumped,
            });
        }

        if i == steps {
            break;
        }
        state.q = kinematics::step(&state.q, &twist, settings.dt, settings.method)
            .map_err(|_| Error::NonFiniteState { t: state.t, j: state.j })?;
        if !bounded(&state.q) {
            return Err(Error::NonFiniteState { t: state.t + settings.dt, j: state.j });
        }
    }

    let summary = RunSummary {
        label: scenario.label.clone(),
        controller: scenario.controller,
        seed: scenario.noise.seed,
        stream,
        final_state: state,
        jumps: state.j,
        sign_flips,
        convergence_time: converged_since,
        terminal_v: last_v,
        projection_displacement,
        projection_displacement_desired,
        steps,
    };
    Ok(RunOutput { records, jumps, summary })
}

/// Independent runs of one scenario on RNG streams `0..runs`.
pub fn monte_carlo(scenario: &Scenario, runs: usize) -> Result<Vec<RunSummary>> {
    batch::map_indices(runs, |i| run_summary(scenario, i as u64)).into_iter().collect()
}

/// One row of a δ sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub jumps: u32,
    pub sign_flips: u32,
    pub convergence_time: Option<f64>,
}

/// One run per δ, all with the base scenario's seed; rows sorted by δ.
pub fn sweep_delta(base: &Scenario, deltas: &[f64]) -> Result<Vec<SweepRow>> {
    require_hybrid(base)?;
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows = batch::map_indices(sorted.len(), |i| {
        let s = base.clone().with_delta(sorted[i]);
        run_summary(&s, 0).map(|r| SweepRow {
            delta: sorted[i],
            jumps: r.jumps,
            sign_flips: r.sign_flips,
            convergence_time: r.convergence_time,
        })
    });
    rows.into_iter().collect()
}

/// Aggregate of many seeded runs at one δ.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepStats {
    pub delta: f64,
    pub runs: usize,
    pub median_jumps: f64,
    pub mean_jumps: f64,
    pub max_jumps: u32,
    pub median_sign_flips: f64,
    /// Median over the runs that converged.
    pub median_convergence_time: Option<f64>,
    pub converged: usize,
}

/// `runs` runs per δ on streams `0..runs`; the same streams are reused for
/// every δ.
pub fn sweep_delta_stats(base: &Scenario, deltas: &[f64], runs: usize) -> Result<Vec<SweepStats>> {
    require_hybrid(base)?;
    if runs == 0 {
        return Err(Error::config("runs must be at least 1"));
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &d in &sorted {
        crate::controllers::validate_delta(d)?;
    }
    let n = sorted.len() * runs;
    let results: Vec<RunSummary> = batch::map_indices(n, |i| {
        let s = base.clone().with_delta(sorted[i / runs]);
        run_summary(&s, (i % runs) as u64)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    Ok(sorted
        .iter()
        .zip(results.chunks(runs))
        .map(|(&delta, chunk)| {
            let jumps: Vec<f64> = chunk.iter().map(|r| r.jumps as f64).collect();
            let flips: Vec<f64> = chunk.iter().map(|r| r.sign_flips as f64).collect();
            let times: Vec<f64> = chunk.iter().filter_map(|r| r.convergence_time).collect();
            SweepStats {
                delta,
                runs,
                median_jumps: median(&jumps).unwrap_or(0.0),
                mean_jumps: jumps.iter().sum::<f64>() / runs as f64,
                max_jumps: chunk.iter().map(|r| r.jumps).max().unwrap_or(0),
                median_sign_flips: median(&flips).unwrap_or(0.0),
                median_convergence_time: median(&times),
                converged: times.len(),
            }
        })
        .collect())
}

fn require_hybrid(base: &Scenario) -> Result<()> {
    if base.controller == ControllerKind::Hybrid {
        Ok(())
    } else {
        Err(Error::config(format!("a delta sweep needs the hybrid controller, got {}", base.controller)))
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len().is_multiple_of(2) { 0.5 * (v[m - 1] + v[m]) } else { v[m] })
}

/// Terminal equilibrium reached with a small and a large hysteresis band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnwindingOutcome {
    pub small: Logic,
    pub large: Logic,
}

/// Noise-free hybrid runs from `q0` with `h₀ = +1` and gain `k`.
pub fn unwinding_probe(delta_small: f64, delta_large: f64, k: f64, q0: DualQuaternion) -> Result<UnwindingOutcome> {
    let mut base = crate::scenario::preset("fig5_unwinding")?;
    base.gains = Gains::uniform(k)?;
    base.q_initial = q0;
    base.h_initial = Logic::Plus;
    base = base.without_noise();
    let small = run_summary(&base.clone().with_delta(delta_small), 0)?.terminal_sign();
    let large = run_summary(&base.with_delta(delta_large), 0)?.terminal_sign();
    Ok(UnwindingOutcome { small, large })
}
