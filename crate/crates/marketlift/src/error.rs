//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing field: {0}")]
    MissingField(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("instance declares more than one slack bus")]
    MultipleSlackBuses,
    #[error("load multiplier must be positive, got {0}")]
    NonPositiveMultiplier(f64),
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("network is disconnected: bus {0} unreachable from slack")]
    DisconnectedNetwork(usize),
    #[error("continuous variable `{0}` has no finite upper bound; the lifting needs one")]
    UnboundedContinuousVariable(String),
    #[error("psd block {0} is empty")]
    EmptyBlock(usize),
    #[error("lifted cell ({0},{1}) appears in the model but lies in no psd block and has no cap")]
    OrphanCell(usize, usize),
    #[error("model is malformed: {0}")]
    MalformedModel(String),
    #[error("optimality gap undefined: exact objective {0} is not strictly positive")]
    NonPositiveExact(f64),
    #[error("closed-form price disagrees with envelope gradient at bus {bus} period {period}: {closed} vs {generic}")]
    ClosedFormMismatch {
        bus: usize,
        period: usize,
        closed: f64,
        generic: f64,
    },
    #[error("ingested dispatch is infeasible: {0}")]
    InfeasibleDispatch(String),
    #[error("solver failed: {0}")]
    SolverFailure(String),
    #[error("problem is {0:?}, expected an optimal solution")]
    NotOptimal(crate::model::SolveStatus),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
