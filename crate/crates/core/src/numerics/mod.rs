//! Polynomial and rational-function algebra in the delay operator `z⁻¹`,
//! complex root finding, and s→z discretization.

mod polynomial;
mod roots;
mod transfer;

pub use polynomial::{convolve, poly_mul, Polynomial, TRIM_TOL};
pub use roots::{hausdorff, max_modulus, poly_roots, roots_ascending, ROOT_RESIDUAL_TOL};
pub use transfer::{impulse_coeffs, step_coeffs, tustin, zoh, ContinuousTf, DiscreteTf};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("root finder exceeded its iteration budget")]
    ConvergenceFailure,
    #[error("bilinear substitution annihilates the denominator")]
    DegenerateDenominator,
    #[error("unsupported pole structure for step-invariant discretization: {0}")]
    UnsupportedPoleStructure(String),
    #[error("invalid transfer function: {0}")]
    InvalidTransferFunction(String),
    #[error("sample time must be positive, got {0}")]
    InvalidSampleTime(f64),
}
