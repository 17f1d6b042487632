use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ball never lands within {max_time} s")]
    NeverLands { max_time: f64 },
    #[error("no feasible trajectory (best residual {best_residual:?})")]
    NoFeasibleTrajectory { best_residual: Option<f64> },
    #[error("trajectory does not reach the plane")]
    NoIntersection,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{count} clip(s) failed validation; first: clip {clip_id}: {message}")]
    Validation {
        clip_id: u64,
        message: String,
        count: usize,
    },
    #[error("synthetic generation failed: {0}")]
    Generation(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("no supporting clips even after full relaxation")]
    NoData,
    #[error("incoming ball is not playable at t = {time} s")]
    BallEndedEarly { time: f64 },
    #[error("no candidate clips for this query")]
    EmptyCandidateSet,
    #[error("player `{0}` has no serve clips")]
    NoServeClips(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("rally already ended")]
    RallyEnded,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from bad input data rather than a runtime failure.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Validation { .. }
                | Error::InsufficientData(_)
                | Error::NoServeClips(_)
                | Error::UnknownPlayer(_)
                | Error::Json(_)
                | Error::InvalidInput(_)
        )
    }
}
