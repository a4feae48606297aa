use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Requested horizon exceeds the depth for which orbit evaluation
    /// is certified accurate.
    #[error("horizon {horizon} exceeds the certified precision budget {budget}")]
    PrecisionBudget { horizon: usize, budget: usize },

    /// Sample too coarse for the requested radius (needs delta <= eps/4).
    #[error("sample resolution {delta} too coarse for radius {eps} (need delta <= eps/4)")]
    Resolution { delta: f64, eps: f64 },

    /// Too few horizons in a table to extract a growth rate.
    #[error("need at least {need} horizons at this radius, table has {have}")]
    InsufficientHorizons { have: usize, need: usize },

    /// Too few ladder radii for a dimension regression.
    #[error("need at least {need} ladder radii, have {have}")]
    InsufficientLadder { have: usize, need: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// A relation check precondition failed (non-invariant subset,
    /// non-invertible maps, missing non-wandering declaration, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
