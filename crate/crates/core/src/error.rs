use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("unknown element {0:?}")]
    UnknownElement(String),

    #[error("antisymmetry violated: {0:?} <= {1:?} and {1:?} <= {0:?}")]
    Antisymmetry(String, String),

    #[error("{what} has {size} elements, above the limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("mapping is not defined on {0:?}")]
    NonTotalMapping(String),

    #[error("mapping is not monotone: {0:?} <= {1:?} but images are not ordered")]
    NotMonotone(String, String),

    #[error("mapping does not preserve {kind} of {elements:?}")]
    NoAdjoint { kind: &'static str, elements: Vec<String> },

    #[error("{0}")]
    NotALattice(String),

    #[error("not a Galois connection: {0}")]
    NotAConnection(String),

    #[error("endomap has a fixed point at {0:?}")]
    FixedPoint(String),

    #[error("face is empty")]
    EmptyFace,

    #[error("face {0:?} repeats a vertex")]
    DuplicateVertex(Vec<String>),

    #[error("face {0:?} is not listed in vertex order")]
    UnsortedFace(Vec<String>),

    #[error("face {missing:?} of {face:?} is missing from the complex")]
    MissingFace { face: Vec<String>, missing: Vec<String> },

    #[error("unknown face {0:?}")]
    UnknownFace(String),

    #[error("invalid subgraph: {0}")]
    InvalidSubgraph(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cover does not union to {0:?}")]
    NotACover(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("no minimal open contains {0:?}")]
    NoMinimalOpen(String),

    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),

    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("sheaves live over different complexes")]
    BaseMismatch,

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("invalid Bayes model: {0}")]
    InvalidModel(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn dims(
        context: impl Into<String>,
        expected: impl std::fmt::Display,
        found: impl std::fmt::Display,
    ) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
