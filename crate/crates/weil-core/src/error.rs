use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("element is not a unit of Z[1/p, zeta_p]; its norm is {norm}")]
    NotAUnit { norm: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("element does not stabilize the standard lagrangian")]
    NotInParabolic,
    #[error("not a lagrangian: {0}")]
    NotLagrangian(String),
    #[error("omega is not compatible; violated at a = {witness:?}")]
    IncompatibleOmega { witness: Vec<u16> },
    #[error("product is not scalar: {0}")]
    NonScalar(String),
    #[error("exhaustive enumeration refused: |Sp| = {order} exceeds 10^6")]
    EnumerationTooLarge { order: u128 },
    #[error("the canonical section is only defined on the untwisted standard model")]
    TwistedModel,
    #[error("invalid specialization ideal: {0}")]
    InvalidIdeal(String),
    #[error("matrix is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
