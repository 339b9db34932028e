use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds 256")]
    TooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("loop {vertex} -> {vertex} at line {line}")]
    Loop { line: usize, vertex: usize },
    #[error("bad graph spec `{0}`")]
    BadSpec(String),
    #[error("paley:{0} requires a prime p with p = 3 mod 4")]
    PaleyNotApplicable(u64),
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("digraph is not acyclic")]
    NotAcyclic,
    #[error("no translate cover exists: fixed-point set is empty")]
    Infeasible,
    #[error("q = {q} exceeds n = {n}")]
    QTooLarge { q: u32, n: usize },
    #[error("digraph is not symmetric")]
    NotSymmetric,
    #[error("simplex construction needs r in 2..=4, got {0}")]
    BadR(u32),
    #[error("missing quantity `{0}`")]
    MissingQuantity(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &'static str, size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}
