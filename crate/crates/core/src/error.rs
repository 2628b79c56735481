//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Errors are
//! split by what the caller can do about them: input/parse problems, cap
//! (truncation) problems, and mathematical rejections such as a degenerate
//! pairing or a socle of the wrong size.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("relation is not homogeneous: {0}")]
    InhomogeneousRelation(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("generator `{0}` must have internal degree >= 1")]
    NonpositiveDegree(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("division by zero in the scalar field")]
    DivisionByZero,

    #[error("internal degree cap exceeded in {context}: needed degree {needed}, completed to {cap}")]
    CapExceeded {
        context: String,
        needed: u32,
        cap: u32,
    },

    #[error("homological cap exceeded in {context}: needed position {needed}, available {cap}")]
    HomologicalCapExceeded {
        context: String,
        needed: u32,
        cap: u32,
    },

    #[error("map `{0}` is not an algebra automorphism: {1}")]
    NotAnAutomorphism(String, String),

    #[error("socle is not one-dimensional (dimension {0}); the Ext-algebra carries no Frobenius form")]
    SocleNotOneDimensional(usize),

    #[error("Frobenius pairing is degenerate at bidegree ({0}, {1})")]
    DegeneratePairing(i32, i64),

    #[error("input is not Gorenstein under the computed signature: {0}")]
    NotGorenstein(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
