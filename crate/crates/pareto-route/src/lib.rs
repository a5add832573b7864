//! Exact one-to-one multiobjective shortest path solving.
//!
//! The crate computes minimal complete sets of efficient source-target
//! paths on digraphs with non-negative integer cost vectors. The general
//! solver handles any dimension from 2 to 8 and guides a label-setting
//! Dijkstra search towards the target with a lexicographic-Dijkstra
//! heuristic; a biobjective specialisation adds constant-time dominance
//! checks, shortcuts to the target and a parallel bidirectional mode.
//! Instance I/O covers multi-stream DIMACS graphs, generators for grid and
//! NetMaker-style benchmark families, and a CSV solution format. An
//! independent oracle backs the test suite.

pub mod btbda;
pub mod generate;
pub mod io;
pub mod label;
pub mod model;
pub mod oracle;
pub mod preprocess;
pub mod queue;
pub mod run;
pub mod tbda;
pub mod testgraphs;
pub mod tmda;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("node {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: u32, node_count: usize },
    #[error("source and target coincide at node {0}")]
    SourceEqualsTarget(u32),
    #[error("unsupported cost dimension {0}")]
    UnsupportedDimension(usize),
    #[error("arc cost has dimension {found}, expected {expected}")]
    ArcDimensionMismatch { expected: usize, found: usize },
    #[error("invalid component permutation")]
    InvalidPermutation,
}

/// Parse or format failure in an instance, pair, cache or solution file.
#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("time limit exceeded")]
    TimedOut,
    #[error("{algo} supports only dimension {supported}, instance has {dim}")]
    UnsupportedDimension {
        algo: &'static str,
        supported: usize,
        dim: usize,
    },
    #[error("incompatible solver options: {0}")]
    IncompatibleOptions(String),
    #[error("predecessor chain does not terminate")]
    CorruptPredecessorChain,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance with {nodes} nodes exceeds the oracle guard of {limit}")]
    GuardExceeded { nodes: usize, limit: usize },
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
