//! Error type shared by the whole pipeline.

use core::fmt;

/// Everything that can go wrong while setting up or running a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The sampled convection coefficient is not strictly positive.
    NonPositiveConvection { min: f64 },
    /// The sampled reaction coefficient is negative somewhere.
    NegativeReaction { min: f64 },
    /// The initial-data jump is NaN or infinite.
    NonFiniteJump,
    /// The interior layer reaches the outflow boundary before the final time.
    LayerHitsBoundary { t: f64 },
    /// An evaluation point lies outside the domain of the operation.
    OutOfRange { what: &'static str, value: f64 },
    /// Transition points or node counts do not form a valid mesh.
    InvalidMesh { reason: &'static str },
    /// Tridiagonal elimination met a vanishing pivot. The assembled systems
    /// are M-matrices, so this is defensive only.
    SingularSystem { row: usize },
    /// Convergence orders need two strictly positive differences.
    NonPositiveDifference,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveConvection { min } => {
                write!(f, "convection coefficient must be positive (sampled min {min:e})")
            }
            Error::NegativeReaction { min } => {
                write!(f, "reaction coefficient must be nonnegative (sampled min {min:e})")
            }
            Error::NonFiniteJump => write!(f, "initial-data jump is not finite"),
            Error::LayerHitsBoundary { t } => {
                write!(f, "interior layer reaches the outflow boundary near t = {t}")
            }
            Error::OutOfRange { what, value } => {
                write!(f, "{what} = {value} is outside the admissible range")
            }
            Error::InvalidMesh { reason } => write!(f, "invalid mesh: {reason}"),
            Error::SingularSystem { row } => {
                write!(f, "tridiagonal elimination hit a zero pivot in row {row}")
            }
            Error::NonPositiveDifference => {
                write!(f, "order estimation needs two positive differences")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
