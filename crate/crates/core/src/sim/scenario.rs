use serde::{Deserialize, Serialize};

use super::SimError;
use crate::plant::SmallSignalGain;

/// A parameter change applied at a control-period boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Change {
    /// New prediction horizon; the controller is re-synthesized.
    SetHorizon(usize),
    /// New load resistance, Ω.
    SetLoad(f64),
    /// New load current, A, mapped to `R = vo_ref / I` at the current
    /// reference.
    SetLoadCurrent(f64),
    /// New output voltage reference, V.
    SetRef(f64),
    /// Instantaneous change of the output voltage, V (e.g. a charge
    /// injected into the output capacitor).
    DisturbVo(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub time: f64,
    pub change: Change,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Converter and controller at the operating point of the starting
    /// reference and load.
    #[default]
    Equilibrium,
    /// Discharged converter; controller histories zeroed.
    ZeroState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantDynamics {
    /// Duty-cycle-averaged dynamics.
    #[default]
    Averaged,
    /// Ideal switch driven by comparing the duty with a sawtooth carrier.
    Switched,
}

fn default_substeps() -> usize {
    10
}

fn default_controller_gain() -> SmallSignalGain {
    SmallSignalGain::Linearized
}

/// Scripted closed-loop experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Simulated time, s.
    pub duration: f64,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub initial: InitialCondition,
    /// Added to the initial output voltage, V. A small offset selects the
    /// direction in which an unstable loop leaves the equilibrium.
    #[serde(default)]
    pub initial_vo_offset: f64,
    /// Starting reference, V; defaults to the converter's `vo_ref`.
    #[serde(default)]
    pub initial_ref: Option<f64>,
    /// Starting load resistance, Ω.
    #[serde(default)]
    pub initial_load: Option<f64>,
    /// Starting load current, A (alternative to `initial_load`).
    #[serde(default)]
    pub initial_load_current: Option<f64>,
    #[serde(default)]
    pub model: PlantDynamics,
    /// Integrator steps per control period.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Re-synthesize the controller for the new load after a load event.
    #[serde(default)]
    pub resynthesize_on_load: bool,
    /// Re-synthesize the controller for the new operating point after a
    /// reference event.
    #[serde(default)]
    pub resynthesize_on_ref: bool,
    /// Small-signal gain of the controller's internal model. Defaults to the
    /// gain obtained by linearizing the simulated converter.
    #[serde(default = "default_controller_gain")]
    pub controller_gain: SmallSignalGain,
}

impl Scenario {
    /// Equilibrium start, averaged model, no events.
    pub fn steady(duration: f64) -> Self {
        Self {
            duration,
            events: Vec::new(),
            initial: InitialCondition::Equilibrium,
            initial_vo_offset: 0.0,
            initial_ref: None,
            initial_load: None,
            initial_load_current: None,
            model: PlantDynamics::Averaged,
            substeps: default_substeps(),
            resynthesize_on_load: false,
            resynthesize_on_ref: false,
            controller_gain: default_controller_gain(),
        }
    }

    pub fn with_event(mut self, time: f64, change: Change) -> Self {
        self.events.push(Event { time, change });
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidScenario(msg));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if self.substeps == 0 {
            return bad("substeps must be at least 1".into());
        }
        if !self.initial_vo_offset.is_finite() {
            return bad("initial_vo_offset must be finite".into());
        }
        if self.initial_load.is_some() && self.initial_load_current.is_some() {
            return bad("initial_load and initial_load_current are mutually exclusive".into());
        }
        for (name, v) in [
            ("initial_ref", self.initial_ref),
            ("initial_load", self.initial_load),
            ("initial_load_current", self.initial_load_current),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.time >= 0.0 && e.time < self.duration) {
                return bad(format!(
                    "event {i} at t = {} lies outside [0, {})",
                    e.time, self.duration
                ));
            }
            if e.time <= last {
                return bad(format!(
                    "event times must be strictly increasing (event {i})"
                ));
            }
            last = e.time;
            let ok = match e.change {
                Change::SetHorizon(p) => p >= 1,
                Change::SetLoad(v) | Change::SetLoadCurrent(v) | Change::SetRef(v) => {
                    v > 0.0 && v.is_finite()
                }
                Change::DisturbVo(v) => v.is_finite(),
            };
            if !ok {
                return bad(format!("event {i} has an invalid value"));
            }
        }
        Ok(())
    }
}
