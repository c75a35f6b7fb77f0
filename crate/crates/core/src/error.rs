use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("polynomial is not squarefree over the rationals")]
    NotSquarefree,
    #[error("polynomial exceeds scenario limits: {0}")]
    PolynomialTooLarge(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{m} is not a power of {p}")]
    NotAPowerOfP { m: u64, p: u64 },
    #[error("invalid place set: {0}")]
    InvalidPlaces(String),
    #[error("invalid splitting data: {0}")]
    InvalidSplitting(String),
    #[error("group order exceeds cap {0}")]
    OrderCapExceeded(usize),
    #[error("invalid group table: {0} violated")]
    InvalidTable(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("unknown group element {0:?}")]
    UnknownElement(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("cochain complex too large: {entries} entries exceed cap {cap}")]
    SizeCapExceeded { entries: usize, cap: usize },
    #[error("group is not cyclic")]
    NotCyclic,
    #[error("module is not elementary abelian")]
    NotElementaryAbelian,
    #[error("cyclotomic character required but missing")]
    MissingCyclotomicCharacter,
    #[error("adjoint representation required but missing")]
    MissingRepresentation,
    #[error("unknown module classification {0:?}")]
    UnknownClassification(String),
    #[error("presentation ledger has no rows")]
    EmptyLedger,
    #[error("quotient_is_full must be set for {0}")]
    QuotientNotFull(&'static str),
    #[error("scenario error: {0}")]
    Schema(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Input problems (exit code 2) as opposed to engine failures (exit code 3).
    pub fn is_schema(&self) -> bool {
        !matches!(self, Error::SizeCapExceeded { .. } | Error::Consistency(_) | Error::OrderCapExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
