//! Field trace polynomial codes.
//!
//! Indices are 0-based throughout: group `i ∈ 0..L`, server `j ∈ 0..N_L`.
//! Server `j` evaluates at `Ω[L + j]`, which is the `j`-th element of `F_{q0}`
//! in index order. Server `j` answers group `i` iff `j < N_i`.

mod audit;
mod cost;
mod example16;
mod protocol;
mod scheme;

use crate::fields::FieldError;
use crate::matrix::MatrixError;
use crate::poly::PolyError;

pub use audit::{exhaustive_audit, rank_audit_points, security_audit, AuditMode, AuditReport, SubsetAudit};
pub use cost::CostReport;
pub use example16::{F16Example, F16_EXPONENTS};
pub use protocol::{
    decode, encode, encode_with_randoms, server_compute, GroupResponse, ResponseBundle, ServerContext, Share,
};
pub use scheme::{build_scheme, Dims, SchemeParams};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("F_q0 has {q0} elements but {needed} evaluation points are required")]
    TooFewEvalPoints { q0: u64, needed: usize },
    #[error("inner dimension {b} is not divisible by L = {l}")]
    NotDivisible { b: usize, l: usize },
    #[error("primes must be {l} distinct primes in ascending order")]
    PrimesInvalid { l: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("dimension mismatch: {0}")]
    DimMismatch(&'static str),
    #[error("no response bundle from server {0}")]
    MissingBundle(usize),
    #[error("malformed response: {0}")]
    ShapeMismatch(&'static str),
    #[error("configuration too large for exhaustive enumeration")]
    TooLargeForExhaustive,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
