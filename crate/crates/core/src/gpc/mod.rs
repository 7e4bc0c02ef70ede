//! Generalized predictive control on a CARIMA model: Diophantine recursion,
//! prediction matrices, gain synthesis and the per-sample control law.

mod controller;
mod diophantine;
mod synthesis;

pub use controller::ControllerState;
pub use diophantine::{diophantine, DiophantineTable};
pub use synthesis::{gain, prediction_matrices, synthesize, GpcSynthesis, PredictionMatrices};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{DiscreteTf, NumericsError, Polynomial};
use crate::plant::PlantError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpcError {
    #[error("invalid GPC configuration: {0}")]
    InvalidConfig(String),
    #[error("Diophantine recursion needs a monic Ã, leading coefficient is {0}")]
    NotMonic(f64),
    #[error("Diophantine table holds {have} steps, prediction needs {need}")]
    DimensionMismatch { need: usize, have: usize },
    #[error("normal matrix δGᵀG + λI is numerically singular")]
    SingularNormalMatrix,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Plant(#[from] PlantError),
}

fn default_nu() -> usize {
    1
}

fn default_delta() -> f64 {
    1.0
}

/// Horizons and weights of the GPC cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpcConfig {
    /// Prediction horizon P.
    pub horizon_p: usize,
    /// Control horizon N_u.
    #[serde(default = "default_nu")]
    pub horizon_nu: usize,
    /// Weight on control increments.
    pub lambda: f64,
    /// Weight on output tracking errors.
    #[serde(default = "default_delta")]
    pub delta_w: f64,
    /// Transport delay in samples beyond the one-sample input delay.
    #[serde(default)]
    pub delay_d: usize,
}

impl GpcConfig {
    pub fn new(horizon_p: usize, lambda: f64) -> Self {
        Self {
            horizon_p,
            horizon_nu: 1,
            lambda,
            delta_w: 1.0,
            delay_d: 0,
        }
    }

    pub fn with_horizon(mut self, p: usize) -> Self {
        self.horizon_p = p;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<(), GpcError> {
        if self.horizon_nu < 1 || self.horizon_nu > self.horizon_p {
            return Err(GpcError::InvalidConfig(format!(
                "need 1 ≤ horizon_nu ≤ horizon_p, got horizon_nu = {} and horizon_p = {}",
                self.horizon_nu, self.horizon_p
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(GpcError::InvalidConfig(format!(
                "lambda must be finite and ≥ 0, got {}",
                self.lambda
            )));
        }
        if !(self.delta_w > 0.0 && self.delta_w.is_finite()) {
            return Err(GpcError::InvalidConfig(format!(
                "delta_w must be finite and > 0, got {}",
                self.delta_w
            )));
        }
        Ok(())
    }
}

/// `A(z⁻¹)·y(k) = z⁻ᵈ·B(z⁻¹)·u(k−1) + e(k)/Δ` with `C = 1`.
///
/// `b` holds the coefficients of `u(k−1), u(k−2), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct CarimaModel {
    pub a: Polynomial,
    pub b: Polynomial,
    pub delay: usize,
    /// Set when the discrete numerator had a direct feedthrough term and was
    /// delayed by one sample to fit the `u(k−1)` structure.
    pub shifted: bool,
}

impl CarimaModel {
    pub fn from_discrete(tf: &DiscreteTf, delay: usize) -> Self {
        let b = tf.b();
        let b0 = b.coeff(0);
        let (b, shifted) = if b.degree() > 0 && b0.abs() <= 1e-12 * b.max_abs() {
            (Polynomial::new(b.coeffs()[1..].to_vec()), false)
        } else {
            (b.clone(), true)
        };
        Self {
            a: tf.a().clone(),
            b,
            delay,
            shifted,
        }
    }

    /// `Ã = ΔA`
    pub fn a_tilde(&self) -> Polynomial {
        Polynomial::structural(crate::numerics::convolve(
            Polynomial::delta().coeffs(),
            self.a.coeffs(),
        ))
    }
}
