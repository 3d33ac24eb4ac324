use thiserror::Error;

/// Errors produced by the matrix kernel, problem model, transform, and
/// discriminability layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A square matrix was required.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Operand shapes do not agree.
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },

    /// An entry is NaN or infinite.
    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },

    /// Input was required to be Hermitian but is not, beyond tolerance.
    #[error("matrix is not Hermitian: max |M_ij - conj(M_ji)| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    /// A factorization pivot fell at or below the rank tolerance. For Gram
    /// matrices this signals linearly dependent states.
    #[error("matrix is not positive definite: {detail}")]
    NotPositiveDefinite { detail: String },

    /// An eigenvalue is more negative than the clamp tolerance allows.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    /// An iterative kernel did not converge.
    #[error("{op} did not converge")]
    NonConvergence { op: &'static str },

    /// A density-matrix argument violates its preconditions (trace,
    /// positivity, Hermiticity).
    #[error("invalid state: {detail}")]
    InvalidState { detail: String },

    /// A discrimination problem violates one or more invariants.
    #[error("invalid problem: {}", violations.join("; "))]
    InvalidProblem { violations: Vec<String> },

    /// A scalar argument is outside the contract of a closed form.
    #[error("domain violation: {detail}")]
    InvalidDomain { detail: String },

    /// Exact permutation search was requested beyond its size cap.
    #[error("exact permutation search over {n}! permutations exceeds the cap max_exact_n = {max_exact_n}; choose a fixed permutation or the sorted heuristic")]
    Capability { n: usize, max_exact_n: usize },

    /// The rejection sampler failed to produce a well-conditioned problem.
    #[error("problem generation failed after {attempts} rejection retries")]
    GenerationFailed { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
