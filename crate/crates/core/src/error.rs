use thiserror::Error;

use crate::model::{RequirementId, RequirementKind, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown requirement `{0}`")]
    UnknownRequirement(RequirementId),

    #[error("requirement `{id}` is not {expected}")]
    WrongKind {
        id: RequirementId,
        expected: RequirementKind,
    },

    #[error("relevance is only defined between distinct requirements (got `{0}` twice)")]
    SelfPair(RequirementId),

    #[error("requirement `{0}` is not a member of the coalition")]
    NotInCoalition(RequirementId),

    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("invalid tradeoff matrix: {0}")]
    InvalidTradeoff(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid model: {}", join_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("{size} requirements exceed the exhaustive-search cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("cannot select a coalition from an empty pool")]
    EmptyPool,

    #[error("unknown corpus model `{0}`")]
    UnknownModel(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid reduction input: {0}")]
    InvalidReduction(String),

    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
