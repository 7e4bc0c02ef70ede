//! Nonlinear closed-loop simulation of the converter under GPC, with
//! scripted horizon, load and reference changes.

mod engine;
mod metrics;
mod scenario;

pub use engine::{simulate, AppliedEvent, SimTrace, BLOWUP_LIMIT};
pub use metrics::{
    metrics, metrics_window, SimMetrics, LARGE_ERROR_FRACTION, LARGE_ERROR_TIME, RAILED_PERIODS,
    SETTLING_BAND,
};
pub use scenario::{Change, Event, InitialCondition, PlantDynamics, Scenario};

use thiserror::Error;

use crate::gpc::GpcError;
use crate::plant::PlantError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("numerical blowup at t = {time} s (state magnitude above {BLOWUP_LIMIT})")]
    NumericalBlowup { time: f64, trace: Box<SimTrace> },
    #[error(transparent)]
    Gpc(#[from] GpcError),
    #[error(transparent)]
    Plant(#[from] PlantError),
}
