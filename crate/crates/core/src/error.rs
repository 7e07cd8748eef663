use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not Hermitian (max |rho - rho^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("frame is not orthonormal; orthonormalize it or use the general A^T T B path")]
    NonOrthonormalFrame,

    #[error("{routine} did not converge after {sweeps} sweeps")]
    NoConvergence { routine: &'static str, sweeps: usize },

    #[error(
        "indeterminate at this resolution: gauge {gauge:.9} exceeds 1 but the best separator \
         scores {continuous_bound:.9} on the continuous LHS set; refine the grid"
    )]
    Indeterminate { gauge: f64, continuous_bound: f64 },

    #[error("linear program: {0}")]
    Lp(String),

    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
