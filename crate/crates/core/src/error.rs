use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("cone is not strictly convex (it contains a line)")]
    NotStrictlyConvex,

    #[error("duplicate ray {0}")]
    DuplicateRay(String),

    #[error("ray {0} is not primitive")]
    NonPrimitiveRay(String),

    #[error("max cones {0:?} and {1:?} overlap")]
    OverlappingCones(Vec<usize>, Vec<usize>),

    #[error("fan `{name}` is not usable here: {reason}")]
    UnsupportedFan { name: String, reason: String },

    #[error("curve class {0} is not an extremal ray of the Mori cone")]
    NotExtremal(String),

    #[error("divisor D_{0} is nef against the given ray")]
    DivisorIsNef(usize),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("unknown toric Fano symbol `{symbol}`; known symbols: {known}")]
    UnknownSymbol { symbol: String, known: String },

    #[error("catalog row {row}: {message}")]
    Catalog { row: String, message: String },

    #[error("transition graph: {0}")]
    Graph(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
