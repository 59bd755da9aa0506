//! Field trace polynomial (FTP) codes for secure distributed matrix
//! multiplication.
//!
//! A user holding `A` (a×b) and `B` (b×c) over a large composite field splits
//! both into `L` inner-product blocks, hides them with `T` random blocks in a
//! pair of polynomials, and uploads evaluations to `N_L` servers. Each server
//! multiplies its two evaluations and, instead of returning the full product,
//! returns one field trace per block group into a maximal subfield. The user
//! recovers `AB` from those traces through the dual of a Reed-Solomon code.
//!
//! This crate is `no_std` (with `alloc`) and carries only the algebra:
//!
//! * [`fields`]: prime fields, `F_{q0}`, the tower `F_q = F_{q0}(α_1,…,α_L)`,
//!   Frobenius, subfield traces and trace-dual bases;
//! * [`poly`]: evaluation, Lagrange interpolation, annihilators and GRS dual weights;
//! * [`matrix`]: dense matrices and inner-product partitioning;
//! * [`ftp`]: scheme construction, encoder, server step, decoder, costs and audits;
//! * [`baseline`]: the three-server traditional scheme and secure MatDot;
//! * [`analysis`]: closed-form rates, crossover constants and prime search.
//!
//! Serialization, networking and the command line live in the `ftp-sdmm` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod baseline;
pub mod fields;
pub mod ftp;
pub mod matrix;
pub mod poly;
pub mod rng;

pub use fields::{BaseField, Field, FieldError, PrimeField, TowerElem, TowerField};
pub use matrix::{Mat, MatrixError, Partition};
pub use poly::{EvalDomain, Poly, PolyError};
pub use rng::SplitMix64;
