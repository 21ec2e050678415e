use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema violation at `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("cycle detected in task graph (involving task {task})")]
    Cycle { task: usize },

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("task {task} has unscheduled predecessor {pred}")]
    UnscheduledPredecessor { task: usize, pred: usize },

    #[error("machine {machine} does not exist")]
    UnknownMachine { machine: usize },

    #[error("task {task} does not exist")]
    UnknownTask { task: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no group index satisfies the tail threshold for task {task}")]
    NoGroup { task: usize },

    #[error("cannot normalize collapsed assignment for task {task}: captured mass {alpha}")]
    ZeroMass { task: usize, alpha: f64 },

    #[error("priority list is not a topological order: {0}")]
    NotTopological(String),

    #[error("LP did not reach an optimum: {0}")]
    LpStatus(String),

    #[error("machine speeds are not identical")]
    NotIdentical,

    #[error("oracle limits exceeded: {0}")]
    LimitsExceeded(String),

    #[error("invalid generator spec: {0}")]
    Generator(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
