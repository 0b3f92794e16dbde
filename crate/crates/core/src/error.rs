//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An integral (or an operation built on one) failed to settle below its
    /// tolerance within the evaluation budget. Usually means the integrand
    /// violates its declared decay hint or lies outside the finite-energy class.
    #[error("quadrature did not converge ({context}): estimate {estimate:.3e} above {threshold:.3e} after {evaluations} evaluations")]
    NonConvergence {
        context: String,
        estimate: f64,
        threshold: f64,
        evaluations: usize,
    },

    /// The declared decay hint describes a non-integrable function.
    #[error("decay hint is not integrable: {0}")]
    InvalidHint(String),

    #[error("exponent must be positive, got {0}")]
    NonpositiveExponent(f64),

    #[error("width must be positive, got {0}")]
    NonpositiveWidth(f64),

    #[error("argument must be positive, got {0}")]
    NonpositiveArgument(f64),

    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),

    /// A quotient report refused to divide by a nonpositive right-hand side.
    #[error("right-hand side nonpositive: lhs {lhs:.6e}, rhs {rhs:.6e}")]
    NonpositiveRhs { lhs: f64, rhs: f64 },

    #[error("negative input value {value} at index {index}")]
    NegativeInput { index: usize, value: f64 },

    /// A grid-based check could not reach its tolerance at the maximum grid.
    #[error("grid too coarse: residual {residual:.3e} above tolerance {tolerance:.3e}")]
    GridTooCoarse { residual: f64, tolerance: f64 },

    #[error("evaluation budget exhausted: {0}")]
    BudgetExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
