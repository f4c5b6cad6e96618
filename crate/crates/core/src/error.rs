use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The integrand tail did not fall below tolerance within the refinement budget.
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),

    /// The integrand does not decay; the integral is infinite (delta-like test function).
    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("degenerate test function: norm {norm:e} underflows")]
    DegenerateTestFunction { norm: f64 },

    /// A configuration that should describe a real field carries an imaginary part.
    #[error("hermitian symmetry broken: imaginary residue {residue:e} (relative)")]
    HermitianViolation { residue: f64 },

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("rejection envelope acceptance rate {rate:.4} below 1%")]
    EnvelopeFailure { rate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
