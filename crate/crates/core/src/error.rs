use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate polynomial")]
    DegeneratePolynomial,
    #[error("sumset order {j} exceeds base size {size}")]
    SumsetOrder { j: usize, size: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid gross schedule: {0}")]
    InvalidGrossSchedule(String),
    #[error("relation explosion: s = {s} allows up to {bound} relations (limit s <= {s_max})")]
    RelationExplosion { s: u32, s_max: u32, bound: u128 },
    #[error("block {k}: budget {ell} exceeds block size {size}")]
    BudgetExceedsBlock { k: usize, ell: u64, size: u64 },
    #[error("budget {ell} exceeds set size {size}")]
    BudgetExceedsSet { ell: u64, size: u64 },
    #[error("schedule misaligned with set: {0}")]
    MisalignedSchedule(String),
    #[error("schedule increases at index {index}")]
    IncreasingSchedule { index: usize },
    #[error("psi undefined: {0}")]
    PsiUndefined(String),
    #[error("distribution violates |X| <= 1: {0}")]
    UnboundedDistribution(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
