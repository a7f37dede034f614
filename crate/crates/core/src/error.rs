use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("port {index} out of range ({leaves} leaves)")]
    PortOutOfRange { index: usize, leaves: usize },
    #[error("invalid theory: {0}")]
    InvalidTheory(String),
    #[error("ill-formed net: {0}")]
    IllFormedNet(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("not a tensor: {0}")]
    NotATensor(String),
    #[error("invariant violated: {0}")]
    Internal(String),
    #[error("stale occurrence: {0}")]
    StaleOccurrence(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("net is not in the image of the encoding: {0}")]
    NotEncodable(String),
    #[error("invalid bigraph: {0}")]
    InvalidBigraph(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}
