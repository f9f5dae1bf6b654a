use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation orders differ ({left} vs {right}); truncate explicitly first")]
    OrderMismatch { left: usize, right: usize },

    #[error("rational power needs constant term 1, found {0}")]
    NonUnitBase(String),

    #[error("series has zero constant term and cannot be inverted")]
    NotAUnit,

    #[error("composition needs an inner series with zero constant term, found {0}")]
    CompositionDomain(String),

    #[error("series is not compositionally invertible: {0}")]
    NonInvertible(&'static str),

    #[error("{op} domain error: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("algebraic relation has a degenerate branch at the origin: {0}")]
    Branch(String),

    #[error("coefficient index ({i}, {j}) outside ({d1}, {d2})")]
    Range { i: usize, j: usize, d1: usize, d2: usize },

    #[error("expected {expected} leading zero coefficients, found a nonzero one")]
    NotDivisible { expected: usize },

    #[error("no series known for {family} at rank {rank}")]
    UnknownSeries { family: String, rank: i64 },

    #[error("non-integral exponent {0}")]
    NonIntegralExponent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("geometry panel: {0}")]
    Panel(String),

    #[error("universality violated at z^{n}: redundant panel rows are inconsistent")]
    UniversalityViolation { n: usize },

    #[error("localization oracle: {0}")]
    Oracle(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
