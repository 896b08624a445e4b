use alloc::string::String;

use crate::quartet::QuartetTopology;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid size: need at least 4 leaves, got {0}")]
    InvalidSize(usize),
    #[error("invalid label {label} for a tree with {n} leaves")]
    InvalidLabel { label: usize, n: usize },
    #[error("node {0} is not an internal node")]
    InvalidNode(usize),
    #[error("cannot compare trees: {0}")]
    InvalidComparison(String),
    #[error("cost function has no entry for {0}")]
    IncompleteCostFunction(QuartetTopology),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("mutation not applicable: {0}")]
    MutationNotApplicable(String),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}
