use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("edge {src} -> {dst} references unknown node {missing}")]
    DanglingEndpoint {
        src: String,
        dst: String,
        missing: String,
    },
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("unknown node kind {0:?}")]
    UnknownKind(String),
    #[error("wildcard {0} carries a node constraint")]
    WildcardConstraint(String),
    #[error("pair constraint {0} -> {1} touches a wildcard")]
    WildcardPair(String, String),
    #[error("pair constraint endpoints must be distinct ({0})")]
    PairSameNode(String),
    #[error("duplicate pair constraint {0} -> {1}")]
    DuplicatePair(String, String),
    #[error("wildcard {0} has a self-loop")]
    WildcardSelfLoop(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("edge {0} -> {1} is not mergeable")]
    NotMergeable(String, String),
    #[error("pattern has an edge between two wildcards")]
    WildcardEdge,
    #[error("k override must be at least 1")]
    BadK,
    #[error("encoding needs {0} variables, over the 2^31 limit")]
    TooManyVars(u64),
    #[error("unsupported pattern: {0}")]
    Unsupported(String),
    #[error("dimacs: {0}")]
    Dimacs(String),
    #[error("literal {lit} out of range for {num_vars} variables")]
    LiteralRange { lit: i64, num_vars: u32 },
    #[error("decoded model violates the witness invariants: {0}")]
    EncoderBug(String),
    #[error("bad limits: {0}")]
    Limits(String),
    #[error("external solver: {0}")]
    External(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
