//! Dual quaternion algebra and a simulator for hysteresis-based hybrid
//! kinematic pose stabilization, with discontinuous and continuous baseline
//! laws for comparison.
//!
//! Layers, bottom-up:
//!
//! - [`algebra`]: quaternions, dual quaternions, the unit manifold, Hamilton
//!   operators and the canonical 8-vector layout.
//! - [`kinematics`]: `q̇ = ½ q ω` and projected fixed-step integration.
//! - [`controllers`]: hybrid, discontinuous and continuous feedback laws.
//! - [`sim`]: flow/jump execution over hybrid time, Lyapunov monitoring,
//!   sweeps and Monte-Carlo batches.
//! - [`scenario`] and [`output`]: configuration, presets, CSV/JSON/SVG.

pub mod algebra;
pub mod batch;
pub mod controllers;
pub mod error;
pub mod kinematics;
pub mod output;
pub mod scenario;
pub mod sim;

pub use algebra::{DualQuaternion, Quaternion, Twist, UnitDualQuaternion};
pub use controllers::{ControllerKind, Gains, HybridMemory, Logic};
pub use error::{Error, Result};
pub use scenario::{preset, NoiseModel, Scenario};
pub use sim::{run, RunOutput, RunSummary, TrajectoryRecord};
