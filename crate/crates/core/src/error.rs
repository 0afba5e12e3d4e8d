use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed PD code: {0}")]
    Syntax(String),

    #[error("arc label {label} appears {count} times (expected 2)")]
    ArcCount { label: u32, count: usize },

    #[error("open strand: arc label {0} has a free end")]
    OpenStrand(u32),

    #[error("inconsistent strand orientation at crossing {0}")]
    InconsistentOrientation(usize),

    #[error("{crossings} crossings exceeds the configured cap of {cap}")]
    ResourceLimit { crossings: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arc {0} is not an arc of the diagram")]
    InvalidArc(u32),

    #[error("face at vertex {vertex:#b} crossings ({c1}, {c2}): {reason}")]
    FaceClassification { vertex: u32, c1: usize, c2: usize, reason: String },

    #[error("face cochain is not a cocycle: {0}")]
    NotCocycle(String),

    #[error("differential squares to a nonzero map at bidegree ({m}, {s})")]
    NonzeroSquare { m: i32, s: i32 },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("knot table: {0}")]
    Table(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
