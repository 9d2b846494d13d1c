use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input values (non-finite numbers, empty lists, bad parameters).
    #[error("domain error: {0}")]
    Domain(String),

    /// A kernel table or quadrature could not reach the requested accuracy.
    #[error("resolution error: {0} (estimate {estimate})", estimate = .1)]
    Resolution(String, f64),

    /// Matrix is not tied to the frame an operation was invoked with.
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    /// Resolvent requested at (numerically) an eigenvalue.
    #[error("singular resolvent: z = {z} is within {dist:e} of an eigenvalue")]
    SingularResolvent { z: num_complex::Complex64, dist: f64 },

    /// The sufficient contraction condition fails and `force` is off.
    #[error("contraction budget failed: {lhs} >= 1 (variant {variant}, j={j}, gamma={gamma}, ||B||={norm_b})")]
    BudgetFailed {
        variant: String,
        j: f64,
        gamma: f64,
        norm_b: f64,
        lhs: f64,
    },

    /// A structural precondition of the selected iteration variant fails.
    #[error("structural error: {0}")]
    Structural(String),

    /// The fixed-point iteration exhausted its budget or blew up.
    #[error("non-convergence after {iterations} iterations (last update {last_update:e})")]
    NonConvergence {
        iterations: usize,
        last_update: f64,
        log: Vec<f64>,
    },

    /// Intertwiner numerically singular.
    #[error("singular intertwiner: condition number {0:e}")]
    SingularIntertwiner(f64),

    /// The dense eigenvalue iteration failed; results must never be trusted silently.
    #[error("eigen-oracle failure: {0}")]
    OracleFailure(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema error: {0}")]
    Schema(String),
}
