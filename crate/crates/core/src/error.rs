use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime in [3, 255]")]
    InvalidModulus(u16),

    #[error("value {value} is not a canonical residue mod {q}")]
    NonCanonical { value: u8, q: u8 },

    #[error("field moduli differ ({left} vs {right})")]
    ModulusMismatch { left: u8, right: u8 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid density polynomial: {0}")]
    InvalidDensity(String),

    #[error("left k x k part of the generator is singular")]
    NotReducible,

    #[error("key generation failed: {0}")]
    KeygenFailed(String),

    #[error(
        "no zero-free signature after {attempts} attempts; the density polynomial d(x) \
         is likely too heavy on large symbols"
    )]
    SignAttemptsExhausted { attempts: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Failures decoding the binary object format or the text inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("bad magic bytes")]
    BadMagic,

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("unknown object type {0}")]
    UnknownObjectType(u8),

    #[error("expected a {expected} object, found a {found} object")]
    WrongObjectType {
        expected: &'static str,
        found: &'static str,
    },

    #[error("truncated input: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },

    #[error("symbol {value} at offset {offset} is not below q = {q}")]
    SymbolOutOfRange { offset: usize, value: u8, q: u8 },

    #[error("{0} trailing bytes after object")]
    TrailingBytes(usize),

    #[error("{0}")]
    Invalid(String),
}
