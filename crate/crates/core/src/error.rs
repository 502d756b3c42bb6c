use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("boundary component {index} out of range (region has {count})")]
    InvalidComponent { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("{what} did not converge: estimate {achieved:e} above target {target:e}")]
    NonConvergence { what: String, achieved: f64, target: f64 },

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("measure has a point part; its logarithmic self-energy is infinite")]
    PointPartPresent,

    #[error("mass mismatch: measure has mass {found:e}, expected {expected:e}")]
    MassMismatch { found: f64, expected: f64 },

    #[error("region is not in the closed-form catalog: {0}")]
    NotCatalog(String),

    #[error("matrix is indefinite beyond tolerance (pivot {pivot:e})")]
    Indefinite { pivot: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Indefinite { .. } | Error::RankDeficient(_)
        )
    }
}
