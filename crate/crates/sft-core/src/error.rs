use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameters outside the domain an operation is defined on.
    Domain(String),
    /// A modulus family that cannot satisfy the required construction.
    Infeasible(String),
    /// `a` has no inverse modulo `m`.
    NoInverse { a: u64, m: u64 },
    /// A value does not fit the integer width contract.
    Overflow(String),
    /// Out-of-range input, such as a lattice point outside its axis window.
    Range(String),
    /// Failure reported by a signal oracle.
    Oracle(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "parameter domain error: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible modulus construction: {msg}"),
            Error::NoInverse { a, m } => write!(f, "{a} has no inverse modulo {m}"),
            Error::Overflow(msg) => write!(f, "integer overflow: {msg}"),
            Error::Range(msg) => write!(f, "out of range: {msg}"),
            Error::Oracle(msg) => write!(f, "oracle evaluation failed: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
