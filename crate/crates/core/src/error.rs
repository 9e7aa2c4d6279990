use alloc::string::String;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("empty node label")]
    EmptyLabel,
    #[error("edge `{a}`-`{b}` given with conflicting weights {first} and {second}")]
    ConflictingWeight {
        a: String,
        b: String,
        first: f64,
        second: f64,
    },
    #[error("edge `{a}`-`{b}` has non-positive or non-finite weight {weight}")]
    InvalidWeight { a: String, b: String, weight: f64 },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("node id {0} out of range")]
    InvalidNode(usize),
    #[error("graph has no root")]
    NoRoot,
    #[error("node `{0}` is unreachable from the root")]
    UnreachableFromRoot(String),
    #[error("nodes `{0}` and `{1}` are not connected")]
    Disconnected(String, String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph has fewer than {needed} pairs at distance {length} (found {found})")]
    DeficientStratum {
        length: u32,
        needed: usize,
        found: usize,
    },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("dataset labels do not match the graph")]
    LabelMismatch,
    #[error("non-finite value in embeddings at epoch {0}")]
    NonFinite(usize),
    #[error("input lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, got {0}")]
    TooFewValues(usize),
    #[error("input is constant; rank correlation undefined")]
    ConstantInput,
    #[error("similarity backend failed on (`{a}`, `{b}`): {reason}")]
    Backend {
        a: String,
        b: String,
        reason: String,
    },
    #[error("no token has candidate senses")]
    NoCandidates,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
