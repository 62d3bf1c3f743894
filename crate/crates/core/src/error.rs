use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid outcome assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid grid index: {0}")]
    InvalidIndex(String),

    #[error("invalid setting vector: {0}")]
    InvalidSettings(String),

    #[error("invalid outcomes: {0}")]
    InvalidOutcomes(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("not normalized: total {total}")]
    Unnormalized { total: String },

    #[error("incomplete marginal set: {0}")]
    IncompleteMarginals(String),

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    #[error("unsupported form: {0}")]
    UnsupportedForm(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid axes: {0}")]
    InvalidAxes(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
