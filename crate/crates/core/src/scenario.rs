//! Scenario definitions, JSON configuration and the compiled-in presets.

use serde::{Deserialize, Serialize};

use crate::algebra::{DualQuaternion, Quaternion};
use crate::controllers::{validate_delta, ControllerKind, Gains, Logic};
use crate::error::{Error, Result};
use crate::kinematics::{IntegrationSettings, Method, DEFAULT_DT};

/// Horizon used by every preset.
pub const DEFAULT_HORIZON: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    GaussianEta,
}

/// Additive zero-mean Gaussian noise on the measured scalar part `η`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Standard deviation (not variance).
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn none(seed: u64) -> Self {
        Self { kind: NoiseKind::None, sigma: 0.0, seed }
    }

    pub fn gaussian_sigma(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::config(format!("noise sigma must be >= 0, got {sigma}")));
        }
        Ok(Self { kind: NoiseKind::GaussianEta, sigma, seed })
    }

    pub fn gaussian_variance(variance: f64, seed: u64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::config(format!("noise variance must be >= 0, got {variance}")));
        }
        Self::gaussian_sigma(variance.sqrt(), seed)
    }

    pub fn is_active(&self) -> bool {
        self.kind == NoiseKind::GaussianEta && self.sigma > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub controller: ControllerKind,
    pub gains: Gains,
    /// Hysteresis half-width; present iff the controller is hybrid.
    pub delta: Option<f64>,
    pub noise: NoiseModel,
    /// Initial pose as given, before projection onto the manifold.
    pub q_initial: DualQuaternion,
    pub q_desired: DualQuaternion,
    pub h_initial: Logic,
    pub integration: IntegrationSettings,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match (self.controller, self.delta) {
            (ControllerKind::Hybrid, Some(d)) => validate_delta(d)?,
            (ControllerKind::Hybrid, None) => return Err(Error::config("delta is required for the hybrid controller")),
            (c, Some(_)) => return Err(Error::config(format!("delta is only valid for the hybrid controller, not {c}"))),
            (_, None) => {}
        }
        Gains::new(self.gains.k1, self.gains.k2, self.gains.k)?;
        if self.noise.kind == NoiseKind::GaussianEta {
            NoiseModel::gaussian_sigma(self.noise.sigma, self.noise.seed)?;
        }
        self.integration.validate()?;
        for (name, q) in [("q_initial", &self.q_initial), ("q_desired", &self.q_desired)] {
            if !q.is_finite() {
                return Err(Error::config(format!("{name} has non-finite components")));
            }
            if q.p.norm() <= crate::algebra::MIN_PRIMARY_NORM {
                return Err(Error::config(format!("{name} has a zero primary part")));
            }
        }
        if self.label.is_empty() {
            return Err(Error::config("label must not be empty"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.noise.seed = seed;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    /// Switches controller, keeping `δ` only for the hybrid law.
    pub fn with_controller(mut self, controller: ControllerKind, delta: f64) -> Self {
        self.controller = controller;
        self.delta = (controller == ControllerKind::Hybrid).then_some(delta);
        self
    }

    pub fn with_noise_sigma(mut self, sigma: f64) -> Self {
        self.noise = if sigma > 0.0 {
            NoiseModel { kind: NoiseKind::GaussianEta, sigma, seed: self.noise.seed }
        } else {
            NoiseModel::none(self.noise.seed)
        };
        self
    }

    pub fn without_noise(self) -> Self {
        self.with_noise_sigma(0.0)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        Scenario::try_from(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioConfig::from(self)).expect("config serializes")
    }
}

/// On-disk form of a [`Scenario`].
///
/// Gains are given either as `k` (shared) or as `k1`/`k2`; noise as exactly
/// one of `noise_sigma` or `noise_variance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub controller: ControllerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `[eta, mu1, mu2, mu3, etap, mup1, mup2, mup3]`
    pub q_initial: [f64; 8],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_desired: Option<[f64; 8]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_initial: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
}

impl TryFrom<ScenarioConfig> for Scenario {
    type Error = Error;

    fn try_from(c: ScenarioConfig) -> Result<Self> {
        let gains = match (c.k, c.k1, c.k2) {
            (Some(k), None, None) => Gains::uniform(k)?,
            (k, Some(k1), Some(k2)) => {
                if c.controller == ControllerKind::Discontinuous && k.is_none() {
                    return Err(Error::config("the discontinuous controller requires k"));
                }
                Gains::new(k1, k2, k.unwrap_or(k1))?
            }
            (None, None, None) => return Err(Error::config("gains missing: give k or k1 and k2")),
            _ => return Err(Error::config("k1 and k2 must be given together")),
        };
        let seed = c.seed.unwrap_or(0);
        let noise = match (c.noise_sigma, c.noise_variance) {
            (None, None) => NoiseModel::none(seed),
            (Some(s), None) => NoiseModel::gaussian_sigma(s, seed)?,
            (None, Some(v)) => NoiseModel::gaussian_variance(v, seed)?,
            (Some(_), Some(_)) => return Err(Error::config("give exactly one of noise_sigma and noise_variance")),
        };
        let scenario = Scenario {
            label: c.label.unwrap_or_else(|| c.controller.name().to_string()),
            controller: c.controller,
            gains,
            delta: c.delta,
            noise,
            q_initial: DualQuaternion::from_vec8(c.q_initial),
            q_desired: c.q_desired.map(DualQuaternion::from_vec8).unwrap_or(DualQuaternion::ONE),
            h_initial: Logic::try_from(c.h_initial.unwrap_or(1))?,
            integration: IntegrationSettings {
                dt: c.dt.unwrap_or(DEFAULT_DT),
                method: c.method.unwrap_or_default(),
                t_final: c.t_final.unwrap_or(DEFAULT_HORIZON),
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioConfig {
    fn from(s: &Scenario) -> Self {
        let active = s.noise.kind == NoiseKind::GaussianEta;
        ScenarioConfig {
            label: Some(s.label.clone()),
            controller: s.controller,
            k: Some(s.gains.k),
            k1: Some(s.gains.k1),
            k2: Some(s.gains.k2),
            delta: s.delta,
            noise_sigma: active.then_some(s.noise.sigma),
            noise_variance: None,
            seed: Some(s.noise.seed),
            q_initial: s.q_initial.vec8(),
            q_desired: Some(s.q_desired.vec8()),
            h_initial: Some(s.h_initial.as_i8() as i64),
            dt: Some(s.integration.dt),
            t_final: Some(s.integration.t_final),
            method: Some(s.integration.method),
        }
    }
}

pub const PRESET_NAMES: [&str; 6] = [
    "fig1_discontinuous_chatter",
    "fig2_hybrid",
    "fig3_compare",
    "fig4_delta_sweep",
    "fig5_unwinding",
    "regulation_noisy",
];

/// Hysteresis values swept by the δ study.
pub const FIG4_DELTAS: [f64; 5] = [0.05, 0.15, 0.3, 0.6, 0.9];

/// The small/large hysteresis pair of the unwinding study.
pub const FIG5_DELTAS: [f64; 2] = [0.15, 0.95];

/// Initial scalar part of the unwinding study.
pub const FIG5_ETA0: f64 = -0.9;

fn dq(x: [f64; 8]) -> DualQuaternion {
    DualQuaternion::from_vec8(x)
}

const FIG1_Q0: [f64; 8] = [0.001, 0.72, 0.06, 0.69, -55.15, -2.52, 36.71, -0.59];
const FIG3_Q0: [f64; 8] = [0.001, 0.78, 0.57, 0.28, -1.28, 1.50, -2.44, 0.77];
const REG_Q0: [f64; 8] = [-0.31, -0.67, 0.67, -0.05, -0.06, -0.31, -0.31, 0.40];
const REG_QD: [f64; 8] = [0.0, 0.707, 0.707, 0.0, 0.28, -0.38, 0.38, 0.28];

/// Initial pose with scalar part `eta0` about a fixed oblique axis, offset
/// by a fixed translation.
pub fn pose_with_eta(eta0: f64) -> DualQuaternion {
    let s = (1.0 - eta0 * eta0).max(0.0).sqrt();
    let axis = [1.0 / 3f64.sqrt(); 3];
    let r = Quaternion::new(eta0, s * axis[0], s * axis[1], s * axis[2]);
    let t = Quaternion::pure([0.5, -0.3, 0.2]);
    DualQuaternion::new(r, (r * t).scale(0.5))
}

fn settings() -> IntegrationSettings {
    IntegrationSettings { dt: DEFAULT_DT, method: Method::Rk4Project, t_final: DEFAULT_HORIZON }
}

/// Compiled-in scenarios mirroring the published simulation studies.
pub fn preset(name: &str) -> Result<Scenario> {
    let g = |k: f64| Gains::uniform(k).expect("preset gains are positive");
    let noisy_var = |v: f64| NoiseModel::gaussian_variance(v, 0).expect("preset noise");
    let noisy_sigma = |s: f64| NoiseModel::gaussian_sigma(s, 0).expect("preset noise");
    let base = |label: &str, controller, gains, delta, noise, q0: [f64; 8]| Scenario {
        label: label.to_string(),
        controller,
        gains,
        delta,
        noise,
        q_initial: dq(q0),
        q_desired: DualQuaternion::ONE,
        h_initial: Logic::Plus,
        integration: settings(),
    };
    let s = match name {
        "fig1_discontinuous_chatter" => {
            base(name, ControllerKind::Discontinuous, g(0.08), None, noisy_var(0.16), FIG1_Q0)
        }
        "fig2_hybrid" => base(name, ControllerKind::Hybrid, g(0.08), Some(0.3), noisy_var(0.16), FIG1_Q0),
        "fig3_compare" => base(name, ControllerKind::Hybrid, g(2.0), Some(0.3), noisy_sigma(0.1), FIG3_Q0),
        "fig4_delta_sweep" => base(name, ControllerKind::Hybrid, g(2.0), Some(0.3), noisy_sigma(0.1), FIG3_Q0),
        "fig5_unwinding" => {
            let mut s = base(name, ControllerKind::Hybrid, g(5.0), Some(FIG5_DELTAS[0]), NoiseModel::none(0), [0.0; 8]);
            s.q_initial = pose_with_eta(FIG5_ETA0);
            s
        }
        "regulation_noisy" => {
            let mut s = base(name, ControllerKind::Hybrid, g(0.020), Some(0.1), noisy_var(0.09), REG_Q0);
            s.q_desired = dq(REG_QD);
            s
        }
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(s)
}

/// The δ values a preset is meant to be swept over, if any.
pub fn preset_deltas(name: &str) -> Option<&'static [f64]> {
    match name {
        "fig4_delta_sweep" => Some(&FIG4_DELTAS),
        "fig5_unwinding" => Some(&FIG5_DELTAS),
        _ => None,
    }
}
