use thiserror::Error;

/// Errors produced by solvers, operators and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge within {iterations} iterations (residual {residual:.3e})")]
    EigNoConverge { iterations: usize, residual: f64 },

    #[error("iterate diverged at iteration {iteration} (norm {norm:.3e}); last finite iteration {last_finite}")]
    Diverged {
        iteration: usize,
        norm: f64,
        last_finite: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("degenerate spectrum: |lambda1| = |lambda2| = {0}")]
    DegenerateSpectrum(f64),

    #[error("instance generation failed after {0} resampling attempts")]
    Generation(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
