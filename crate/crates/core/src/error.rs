use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("untracked coordinate: {0}")]
    Untracked(String),
    #[error("degenerate fundamental tensor at {0}")]
    Degenerate(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("form degree: {0}")]
    Degree(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("step {0:e} below the 1e-8 guard")]
    StepTooSmall(f64),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at(self, stage: &str) -> Error {
        Error::Stage { stage: stage.to_string(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
