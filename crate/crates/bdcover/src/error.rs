use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bad prime {0}: must be an odd prime")]
    BadPrime(u64),
    #[error("defining element is a square in the base field")]
    NotNonSquare,
    #[error("precision {prec} unsupported for p = {p} (need p^N < 2^120)")]
    BadPrecision { p: u64, prec: u32 },
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("zero residue")]
    ZeroResidue,
    #[error("bad modulus m = {0}")]
    BadModulus(u64),
    #[error("Gauss sum did not snap to an 8th root of unity")]
    SnapFailure,
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("element is not regular")]
    NotRegular,
    #[error("sign - requires 4 | m")]
    BadSign,
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(&'static str),
    #[error("orbit is not symmetric")]
    AsymmetricOrbit,
    #[error("lower-left entry vanishes")]
    LowerLeftZero,
    #[error("elements do not commute")]
    NotCommuting,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
