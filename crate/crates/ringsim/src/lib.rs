//! Deterministic microscopic simulation of a ring road shared by
//! human-driven and ACC-equipped vehicles, with six pluggable
//! communication-based attack injectors, phase-sliced stability metrics
//! and a batch experiment runner.
//!
//! Start with [`scenario::SimConfig`] and [`scenario::run`]; the
//! `examples/` directory has one runnable program per capability.

pub mod attack;
pub mod config;
pub mod error;
pub mod history;
pub mod idm;
pub mod metrics;
pub mod output;
pub mod report;
pub mod scenario;
pub mod state;
pub mod sweep;

pub use attack::{AttackKind, AttackSpec, ControllerInputs};
pub use config::{parse_config, ParsedConfig, SweepSpec};
pub use idm::{AccelBounds, IdmParams};
pub use metrics::{phase_metrics, PhaseMetrics, Risk};
pub use scenario::{run, Phase, RunResult, ScenarioId, SimConfig, Simulation};
pub use state::{Powertrain, VehicleKind, VehicleState};
