use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("multiplication table is not a Latin square: {0}")]
    NotLatinSquare(String),

    #[error("multiplication is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },

    #[error("multiplication table has no identity element")]
    NoIdentity,

    #[error("element 0 must be the identity (identity found at index {0})")]
    IdentityNotFirst(usize),

    #[error("element index {index} out of range for a group of order {order}")]
    OutOfRange { index: usize, order: usize },

    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("function is not Hermitian: f(g) and conj f(g^-1) differ by {deviation:e} at element {element}")]
    NotHermitian { element: usize, deviation: f64 },

    #[error("complex value at element {element} (imaginary part {imag:e}) where a real function is required")]
    ComplexInput { element: usize, imag: f64 },

    #[error("function is not K-bi-invariant (element {element})")]
    NotBiInvariant { element: usize },

    #[error("kernel is not G-invariant")]
    NotInvariant,

    #[error("(G, K) is not a Gelfand pair")]
    NotGelfand,

    #[error("could not separate spherical functions after {0} attempts")]
    SeparationFailed(usize),

    #[error("objects are defined over different double coset partitions")]
    PartitionMismatch,

    #[error("spherical coefficient {index} is negative ({value:e}); function is not positive definite")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("LP dimension mismatch: {0}")]
    Dimension(String),

    #[error("problem too large for this routine: {0}")]
    TooLarge(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
