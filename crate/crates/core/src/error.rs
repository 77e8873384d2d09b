use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inconsistent tables: {0}")]
    InconsistentTables(String),

    #[error("offload rate must be positive, got {0}")]
    ZeroRate(f64),

    #[error("offloading set is empty")]
    EmptyOffloadSet,

    #[error("cpu allocation infeasible: lower bounds need {required:.6e} Hz of {capacity:.6e} Hz")]
    InfeasibleAllocation { required: f64, capacity: f64 },
}

pub type Result<T> = std::result::Result<T, SimError>;
