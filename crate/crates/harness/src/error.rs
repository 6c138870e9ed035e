use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numeric(_) => 3,
            HarnessError::Io(_) | HarnessError::Csv(_) => 1,
        }
    }
}

impl From<hetnet_core::Error> for HarnessError {
    fn from(e: hetnet_core::Error) -> Self {
        match e {
            hetnet_core::Error::Numeric { .. } => HarnessError::Numeric(e.to_string()),
            other => HarnessError::Config(vec![other.to_string()]),
        }
    }
}

impl From<hetnet_sim::SimError> for HarnessError {
    fn from(e: hetnet_sim::SimError) -> Self {
        match e {
            hetnet_sim::SimError::Config(list) => HarnessError::Config(list),
            hetnet_sim::SimError::Model(inner) => inner.into(),
            hetnet_sim::SimError::EmptySamples => HarnessError::Numeric(e.to_string()),
            other => HarnessError::Config(vec![other.to_string()]),
        }
    }
}
