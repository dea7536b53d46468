//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by matrix kernels, channel/state validation, and the
/// construction families.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("shape mismatch in {op}: {details}")]
    ShapeMismatch { op: &'static str, details: String },

    /// A matrix entry is NaN or infinite.
    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    /// Input to a spectral routine is not Hermitian within tolerance.
    #[error("matrix is not Hermitian: relative asymmetry {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    /// The Jacobi iteration hit its sweep budget before converging.
    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// A constructor or operation received an out-of-domain parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A Kraus set fails the unital/trace-preserving conditions.
    #[error("Kraus set is not UCPT (unital residual {unital:.3e}, trace residual {trace:.3e})")]
    NotUcpt { unital: f64, trace: f64 },

    /// A Kraus set contains linearly dependent operators where an
    /// independent set is required.
    #[error("Kraus set is not reduced: {count} operators span only {independent} dimensions")]
    NotReduced { count: usize, independent: usize },

    /// A density matrix fails the marginal tracial conditions.
    #[error(
        "state is not marginal tracial (partial-trace residuals {first:.3e}/{second:.3e}, \
         psd defect {psd:.3e}, trace defect {trace:.3e})"
    )]
    NotMarginalTracial {
        first: f64,
        second: f64,
        psd: f64,
        trace: f64,
    },

    /// A matrix expected to be unitary is not, within tolerance.
    #[error("matrix is not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    /// The perturbation normalizer is singular at the requested epsilon.
    #[error("degenerate perturbation: normalizer has minimal diagonal entry {min_entry:.3e}")]
    DegenerateEpsilon { min_entry: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
