use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operands belong to different moduli")]
    ModulusMismatch,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("{0} failed the primality test")]
    NotPrime(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parameter search exhausted after {0} candidates")]
    SearchExhausted(usize),
    #[error("hashing to the curve failed after {0} attempts")]
    HashToCurveFailed(u32),
    #[error("point does not satisfy the curve equation")]
    OffCurvePoint,
    #[error("point is not in the prime-order subgroup")]
    WrongOrderPoint,
    #[error("policy syntax error at byte {position}: {message}")]
    PolicySyntax { position: usize, message: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("duplicate attribute `{0}` in clause")]
    DuplicateAttribute(String),
    #[error("multi-domain clause: attributes span domains `{0}` and `{1}`")]
    MultiDomainClause(String, String),
    #[error("invalid registry: {0}")]
    InvalidRegistry(String),
    #[error("user is not authorized for attribute `{0}`")]
    IssuanceRefused(String),
    #[error("attribute `{0}` is not administered by this domain")]
    ForeignAttribute(String),
    #[error("message must be exactly {expected} bytes, got {actual}")]
    WrongMessageLength { expected: usize, actual: usize },
    #[error("clause domain `{0}` is not rooted at the first-level domain")]
    ClauseNotRooted(String),
    #[error("not authorized")]
    NotAuthorized,
    #[error("keys were issued by different domains")]
    MixedDomainKeys,
    #[error("oracle collision, choose different attributes")]
    OracleCollision,
    #[error("no ciphertext clause matches the recovered domain")]
    NoMatchingClause,
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unsupported format tag `{0}`")]
    WrongVersion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
