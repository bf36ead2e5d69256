use thiserror::Error;

/// Errors surfaced by the geometry kernel and everything built on top of it.
///
/// Numerical trouble is reported, never silently swallowed: quadratures that
/// fail to converge, finite-difference stencils that produce NaN, maps that
/// fail the symplectomorphism check, all come back as variants here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain(Vec<f64>),

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error(
        "quadrature did not converge after {panels} panels \
         (value {value:.6e}, last correction {error_estimate:.3e})"
    )]
    QuadratureNotConverged {
        value: f64,
        error_estimate: f64,
        panels: u32,
    },

    #[error("cochain of degree {degree} applied to {got} arguments")]
    ArityMismatch { degree: usize, got: usize },

    #[error(
        "map is not a symplectomorphism of the model: \
         pullback residual {residual:.3e} exceeds {tolerance:.1e}"
    )]
    NotSymplectomorphism { residual: f64, tolerance: f64 },

    #[error("arguments do not commute: commutator residual {residual:.3e}")]
    NonCommuting { residual: f64 },

    #[error("vector field is not locally Hamiltonian: d(i_X omega) residual {residual:.3e}")]
    NotLocallyHamiltonian { residual: f64 },

    #[error("matrix is not traceless: |trace| = {0:.3e}")]
    NotTraceless(f64),

    #[error("Moebius parameters must have positive determinant, got {0:.6e}")]
    NotOrientationPreserving(f64),

    #[error("expected an even-dimensional chart, got dimension {0}")]
    OddDimension(usize),

    #[error("degenerate linear system: {0}")]
    Singular(String),

    #[error("{0}")]
    Invalid(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used by validation helpers.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
