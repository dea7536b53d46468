//! Numerical toolkit for marginal tracial states on `M_n (x) M_n` and the
//! doubly stochastic quantum channels (UCPT maps) they correspond to.
//!
//! The crate provides:
//!
//! * [`linalg`] — self-contained dense complex linear algebra: products,
//!   tensor and Schur products, partial traces, a Jacobi eigensolver, and a
//!   tolerance-based rank.
//! * [`channel`] — Kraus representations, UCPT validation, reduction to a
//!   minimal Kraus set, Choi matrices, and diagonal (Schur-multiplier)
//!   profiles.
//! * [`state`] — marginal tracial states as density matrices, support
//!   projections, and the inverse state-to-channel construction.
//! * [`extremality`] — two independent extremality criteria (bi-independence
//!   and the support-projection intersection test) with machine-checkable
//!   certificates, plus the rank bound `floor(sqrt(2 n^2 - 1))`.
//! * [`constructions`] — the explicit extremal families (maximal rank on M3
//!   and M4, the rank-n family, diagonal Vandermonde channels), diagonal
//!   perturbations, and seeded random generators.
//!
//! All randomness is driven by the seeded [`rng::SplitMix64`] generator, so
//! every sampled object is reproducible.

pub mod channel;
pub mod constructions;
pub mod error;
pub mod extremality;
pub mod linalg;
pub mod rng;
pub mod state;

pub use channel::{
    apply, choi, diagonal_profile, pairing, reduce_to_independent, validate_ucpt,
    DiagonalProfile, KrausSet, UcptReport,
};
pub use error::{Error, Result};
pub use extremality::{
    cross_validate, ls_bi_independence, ps_support_test, rank_bound, CrossValidation,
    ExtremalityCertificate, Method,
};
pub use linalg::{
    hermitian_eig, maximally_entangled_vector, orthonormalize, partial_trace, rank, Complex64,
    ComplexMatrix, EigenDecomposition, Tolerances, TraceSide,
};
pub use rng::SplitMix64;
pub use state::{
    kraus_from_state, state_rank, support_projection, validate_marginal, MarginalReport,
    MarginalState, SupportProjection,
};
