//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Kronecker product would exceed the configured entry cap.
    #[error("kronecker product of {rows}x{cols} exceeds the {cap}-entry cap")]
    KronTooLarge {
        rows: usize,
        cols: usize,
        cap: usize,
    },

    /// Eigendecomposition input failed the Hermiticity check.
    #[error("matrix is not Hermitian: max |m - m^H| = {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    /// Jacobi iteration did not reach the off-diagonal threshold.
    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:.3e})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    /// Matrix exponential input contains NaN or infinite entries.
    #[error("matrix contains non-finite entries")]
    NonFinite,

    /// The linear solve inside the Pade approximant hit a singular pivot.
    #[error("singular system in matrix exponential (pivot {pivot:.3e})")]
    SingularSystem { pivot: f64 },

    /// A state vector or amplitude pair is not normalized.
    #[error("state not normalized: |norm^2 - 1| = {norm_sq_error:.3e}")]
    NotNormalized { norm_sq_error: f64 },

    /// Chain or solver parameters violate an invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Transfer timescales are undefined without coupling.
    #[error("no transfer occurs at zero coupling")]
    NoTransfer,

    /// A density matrix failed validation.
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    /// RK4 refinement failed to reach the agreement threshold.
    #[error("rk4 integration did not converge: {steps} steps, residual {residual:.3e}")]
    Rk4NoConvergence { steps: usize, residual: f64 },

    /// An experiment was configured inconsistently.
    #[error("inconsistent experiment configuration: {0}")]
    Misconfigured(String),
}
