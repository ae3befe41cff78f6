use thiserror::Error;

use crate::solvers::SolveTrace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("need at least {required} nodes, got {got}")]
    TooFewNodes { required: usize, got: usize },
    #[error("equispaced interval requires a < b (got a = {a}, b = {b})")]
    EmptyInterval { a: f64, b: f64 },
    #[error("duplicate nodes at indices {first} and {second}")]
    DuplicateNodes { first: usize, second: usize },
    #[error("non-finite node at index {index}")]
    NonFiniteNode { index: usize },
    #[error("non-finite function value at node index {index}")]
    NonFiniteValue { index: usize },
    #[error("node and value vectors differ in length ({nodes} vs {values})")]
    LengthMismatch { nodes: usize, values: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error("empty seed vector")]
    EmptySeed,
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("seed length {seed} does not match node count {nodes}")]
    SeedLength { seed: usize, nodes: usize },
    #[error("all weights are zero")]
    ZeroWeights,
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("need {required} positive weights, only {active} are active")]
    TooFewActive { required: usize, active: usize },
    #[error("Arnoldi breakdown produced an empty basis")]
    TotalBreakdown,
    #[error("basis has rank {rank}, cannot evaluate {requested} columns")]
    RankTooSmall { rank: usize, requested: usize },
    #[error("weight vector length {weights} does not match sample count {samples}")]
    WeightLength { weights: usize, samples: usize },
}

#[derive(Debug, Error, Clone)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("problem too small: {required} nodes needed for type ({n1}, {n2}), got {got}")]
    TooFewNodes { n1: usize, n2: usize, required: usize, got: usize },
    #[error("solver aborted after {} iterations: {source}", .trace.records.len())]
    Aborted { source: DualError, trace: SolveTrace },
}
