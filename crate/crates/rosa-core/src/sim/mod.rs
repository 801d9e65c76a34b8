//! Deterministic tick-based managed subsystem.
//!
//! Simulated component processes with lifecycle and parameters, a scalar
//! plant model (battery, water visibility, search and inspection progress,
//! corridor traversal), scripted uncertainty injection, and the run loop
//! coupling plant steps, engine cycles and behavior-tree ticks in
//! lockstep. Identical inputs produce byte-identical traces.

mod process;
mod runner;
mod world;

pub use process::{ProcAudit, ProcessTable};
pub use runner::{run_scenario, run_scenario_with, MissionResult, RunError, RunOptions, RunOutput};
pub use world::{PlantConfig, World};
