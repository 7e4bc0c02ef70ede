//! Boost-converter parameterization: operating point, small-signal transfer
//! function, discrete plant model and averaged nonlinear dynamics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{tustin, zoh, ContinuousTf, DiscreteTf, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlantError {
    #[error("invalid converter parameters: {0}")]
    InvalidParams(String),
    #[error("NotBoostable: vo_ref = {vo_ref} V must exceed vg = {vg} V")]
    NotBoostable { vg: f64, vo_ref: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn default_duty_min() -> f64 {
    0.1
}

fn default_duty_max() -> f64 {
    0.9
}

/// Physical boost-converter parameters and duty-cycle limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConverterParams {
    /// Input voltage, V.
    pub vg: f64,
    /// Output voltage reference, V.
    pub vo_ref: f64,
    /// Inductance, H.
    pub l: f64,
    /// Output capacitance, F.
    pub c: f64,
    /// Load resistance, Ω.
    pub r: f64,
    /// Switching and sampling frequency, Hz.
    pub fs: f64,
    #[serde(default = "default_duty_min")]
    pub duty_min: f64,
    #[serde(default = "default_duty_max")]
    pub duty_max: f64,
}

impl Default for ConverterParams {
    fn default() -> Self {
        Self::nominal()
    }
}

impl ConverterParams {
    /// 50 V → 70 V converter: 15 mH, 470 µF, 66 Ω, 10 kHz.
    pub fn nominal() -> Self {
        Self {
            vg: 50.0,
            vo_ref: 70.0,
            l: 15e-3,
            c: 470e-6,
            r: 66.0,
            fs: 10e3,
            duty_min: default_duty_min(),
            duty_max: default_duty_max(),
        }
    }

    pub fn with_load(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_vo_ref(mut self, vo_ref: f64) -> Self {
        self.vo_ref = vo_ref;
        self
    }

    /// Load resistance that draws `current` at the output reference.
    pub fn load_for_current(&self, current: f64) -> f64 {
        self.vo_ref / current
    }

    pub fn sample_time(&self) -> f64 {
        1.0 / self.fs
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        let positive = [
            ("vg", self.vg),
            ("vo_ref", self.vo_ref),
            ("l", self.l),
            ("c", self.c),
            ("r", self.r),
            ("fs", self.fs),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PlantError::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(0.0 <= self.duty_min && self.duty_min < self.duty_max && self.duty_max <= 1.0) {
            return Err(PlantError::InvalidParams(format!(
                "duty limits must satisfy 0 ≤ duty_min < duty_max ≤ 1, got [{}, {}]",
                self.duty_min, self.duty_max
            )));
        }
        if self.vo_ref <= self.vg {
            return Err(PlantError::NotBoostable {
                vg: self.vg,
                vo_ref: self.vo_ref,
            });
        }
        Ok(())
    }
}

/// Steady state of the averaged converter at the commanded output voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub d: f64,
    pub il: f64,
    pub vo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterState {
    pub il: f64,
    pub vo: f64,
}

impl From<OperatingPoint> for ConverterState {
    fn from(op: OperatingPoint) -> Self {
        Self {
            il: op.il,
            vo: op.vo,
        }
    }
}

pub fn operating_point(p: &ConverterParams) -> Result<OperatingPoint, PlantError> {
    p.validate()?;
    let d = 1.0 - p.vg / p.vo_ref;
    let il = p.vo_ref / ((1.0 - d) * p.r);
    Ok(OperatingPoint {
        d,
        il,
        vo: p.vo_ref,
    })
}

/// Which DC gain multiplies the duty-to-output transfer function.
///
/// `Printed` uses `Vg/(1−D)`. `Linearized` uses `Vg/(1−D)²`, the gain
/// obtained by linearizing the averaged dynamics in
/// [`nonlinear_derivatives`]; the two differ only by the constant factor
/// `1/(1−D)`. `Printed` is the design default; the simulator builds its
/// controller from `Linearized` unless a scenario says otherwise, because a
/// controller whose model underestimates the plant gain is too aggressive
/// against the nonlinear converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallSignalGain {
    #[default]
    Printed,
    Linearized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discretization {
    Tustin,
    #[default]
    Zoh,
}

impl fmt::Display for Discretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tustin => "tustin",
            Self::Zoh => "zoh",
        })
    }
}

impl FromStr for Discretization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tustin" => Ok(Self::Tustin),
            "zoh" => Ok(Self::Zoh),
            other => Err(format!("unknown discretization `{other}` (tustin|zoh)")),
        }
    }
}

impl fmt::Display for SmallSignalGain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Printed => "printed",
            Self::Linearized => "linearized",
        })
    }
}

impl FromStr for SmallSignalGain {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(Self::Printed),
            "linearized" => Ok(Self::Linearized),
            other => Err(format!("unknown gain model `{other}` (printed|linearized)")),
        }
    }
}

/// How the controller's discrete model is derived from the converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PlantModel {
    pub discretization: Discretization,
    pub gain: SmallSignalGain,
}

impl PlantModel {
    pub fn new(discretization: Discretization, gain: SmallSignalGain) -> Self {
        Self {
            discretization,
            gain,
        }
    }
}

impl From<Discretization> for PlantModel {
    fn from(discretization: Discretization) -> Self {
        Self {
            discretization,
            gain: SmallSignalGain::default(),
        }
    }
}

/// Duty-to-output-voltage small-signal transfer function
///
/// `G_vd(s) = K·(1 − s·L/((1−D)²R)) / (s²·LC/(1−D)² + s·L/((1−D)²R) + 1)`
///
/// with `K` chosen by `gain`.
pub fn continuous_tf(
    p: &ConverterParams,
    gain: SmallSignalGain,
) -> Result<ContinuousTf, PlantError> {
    let op = operating_point(p)?;
    let m = 1.0 - op.d;
    let k = match gain {
        SmallSignalGain::Printed => p.vg / m,
        SmallSignalGain::Linearized => p.vg / (m * m),
    };
    let tz = p.l / (m * m * p.r);
    let num = vec![k, -k * tz];
    let den = vec![1.0, tz, p.l * p.c / (m * m)];
    Ok(ContinuousTf::new(num, den)?)
}

/// Right-half-plane zero of the duty-to-output path, rad/s.
pub fn rhp_zero(p: &ConverterParams) -> Result<f64, PlantError> {
    let op = operating_point(p)?;
    let m = 1.0 - op.d;
    Ok(m * m * p.r / p.l)
}

/// Undamped natural frequency of the small-signal model, rad/s.
pub fn natural_frequency(p: &ConverterParams) -> Result<f64, PlantError> {
    let op = operating_point(p)?;
    Ok((1.0 - op.d) / (p.l * p.c).sqrt())
}

pub fn discrete_plant(p: &ConverterParams, model: &PlantModel) -> Result<DiscreteTf, PlantError> {
    let ct = continuous_tf(p, model.gain)?;
    let ts = p.sample_time();
    let tf = match model.discretization {
        Discretization::Tustin => tustin(&ct, ts)?,
        Discretization::Zoh => zoh(&ct, ts)?,
    };
    Ok(tf)
}

/// Averaged state derivatives `(diL/dt, dvO/dt)` at duty `d`.
pub fn nonlinear_derivatives(x: &ConverterState, d: f64, p: &ConverterParams) -> (f64, f64) {
    let off = 1.0 - d;
    let dil = (p.vg - off * x.vo) / p.l;
    let dvo = off * x.il / p.c - x.vo / (p.c * p.r);
    (dil, dvo)
}
