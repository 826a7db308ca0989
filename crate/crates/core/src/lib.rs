//! Multi-UAV search-and-rescue planning and simulation.
//!
//! The grid is split among UAVs by nearest start position; each UAV mows its
//! own region until an observer reports a survivor's last known position and
//! heading, at which point it switches to a weight-based visit order over
//! its region that favours cells ahead of the survivor.

pub mod cli;
pub mod config;
pub mod coverage;
pub mod domain;
pub mod error;
pub mod export;
pub mod harness;
pub mod partition;
pub mod planner;
pub mod plot;
pub mod sim;

pub use config::ScenarioConfig;
pub use domain::{CellIndex, GridEnvironment, Heading, SensorFootprint, WorldPoint};
pub use error::{Error, Result};
pub use sim::{run_scenario, run_scenario_with, RunResult, SimOptions, SimState, Strategy};
