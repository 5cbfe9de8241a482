//! Active power control for wind farms.
//!
//! Turbines follow individual power demands with a torque/pitch controller
//! that behaves close to a one-sample delay; a farm-level integrator splits a
//! farm reference over the turbines and covers those that cannot meet their
//! share. A small wake model with advection delay stands in for the flow.

pub mod control;
pub mod error;
pub mod farm;
pub mod flow;
pub mod sim;
pub mod turbine;

pub use control::{ControlMode, ControllerConfig};
pub use error::{Error, Result};
pub use farm::{select_case, CorrectionSplit, FarmDispatchState};
pub use flow::FlowConfig;
pub use sim::{run_scenario, simulate, Metrics, ScenarioConfig, Simulation, StepRecord};
pub use turbine::{Mode, TurbineModel, TurbineParams, TurbineState};
