use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("duplicate {0} id")]
    DuplicateId(&'static str),
    #[error("face {0} has an empty boundary")]
    EmptyFace(usize),
    #[error("face {face}: boundary length {boundary} but {corners} corners")]
    CornerCount { face: usize, boundary: usize, corners: usize },
    #[error("face {face}: boundary does not close after traversal {position}")]
    OpenBoundary { face: usize, position: usize },
    #[error("invalid complex json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("torus height must be at least 1, got {0}")]
    BadHeight(i64),
    #[error("knight {0} does not close")]
    OpenKnight(String),
    #[error("jump involution has fixed point ({0}, {1})")]
    FixedPoint(i64, i64),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("star completion at vertex {vertex} admits {count} extensions")]
    Ambiguous { vertex: usize, count: usize },
    #[error("star completion at vertex {vertex} impossible: {reason}")]
    Impossible { vertex: usize, reason: String },
    #[error("folding created a loop at vertex {0}")]
    Loop(usize),
    #[error("seed rejected: {0}")]
    Seed(String),
    #[error("extension conflict at ball vertex {vertex}: {reason}")]
    Conflict { vertex: usize, reason: String },
    #[error("frame: {0}")]
    Frame(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PinchError {
    #[error("involution has a fixed point at vertex {0}")]
    FixedPoint(usize),
    #[error("involution is not an involution at vertex {0}")]
    NotInvolution(usize),
    #[error("involution does not cover vertex {0}")]
    Uncovered(usize),
    #[error("filling failed: {0}")]
    Filling(String),
    #[error("link girth violated at vertex {vertex}: cycle of length {length} through link edges {edges:?}")]
    Girth { vertex: usize, length: u32, edges: Vec<usize> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("decomposition failed: {0}")]
    Decompose(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobordismError {
    #[error("fragment too small: {0}")]
    FragmentTooSmall(String),
    #[error("product certificate failed: {0}")]
    Certificate(String),
    #[error("collar mismatch: {0}")]
    CollarMismatch(String),
    #[error("gallery search exhausted")]
    Exhausted,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}
