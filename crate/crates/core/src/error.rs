use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Internal` marks consistency checks that must not fire on valid input
/// (Jacobi failures, rewrite-rule coverage gaps); hitting one is a bug,
/// not a user error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Cartan type {series}{rank}")]
    InvalidCartanType { series: char, rank: usize },

    #[error("cannot parse Cartan type from {0:?} (expected e.g. \"A2\", \"G2\")")]
    ParseCartanType(String),

    #[error("prime {p} too small for type with Coxeter number {h}: need p > {}, minimal admissible prime is {minimum}", h + 1)]
    PrimeTooSmall { p: u64, h: i64, minimum: u64 },

    #[error("simple-root index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("root string undefined for proportional roots")]
    ProportionalRoots,

    #[error("vector is not a root of the system: {0:?}")]
    NotARoot(Vec<i64>),

    #[error("word is not a reduced expression for the longest element (prefix of length {prefix_len} sends a simple root negative)")]
    NonReducedWord { prefix_len: usize },

    #[error("ordering is not a permutation of the positive roots")]
    NotAPermutation,

    #[error("commutator constants undefined for opposite roots")]
    OppositeRoots,

    #[error("coefficient ring or truncation mismatch between operands")]
    RingMismatch,

    #[error("p-adic precision too low: need {needed} digits, have {have}")]
    PrecisionTooLow { needed: u32, have: u32 },

    #[error("modulus {p}^{k} does not fit in 64 bits")]
    ModulusOverflow { p: u64, k: u32 },

    #[error("resource cap exceeded for {what}: needed {needed}, cap {cap}")]
    ResourceExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
