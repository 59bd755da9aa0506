//! Finite fields: `F_p`, `F_{q0} = F_{p^d}` and the tower
//! `F_q = F_{q0}(α_1, …, α_L)` with traces into its maximal subfields.
//!
//! Field descriptors are immutable context objects; elements are plain values
//! and every operation goes through the descriptor (`field.mul(&x, &y)`).
//! That keeps elements small and lets [`crate::poly`] and [`crate::matrix`]
//! be generic over any [`Field`].

mod base;
mod dual;
pub mod linalg;
mod prime;
mod tower;
mod upoly;

use core::fmt::Debug;

use num_bigint::BigUint;

use crate::rng::SplitMix64;

pub use base::BaseField;
pub use dual::trace_dual_basis;
pub use prime::{is_prime, PrimeField};
pub use tower::{TowerElem, TowerField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("no monic irreducible polynomial of degree {degree} found")]
    NoIrreducible { degree: usize },
    #[error("field of order {p}^{d} is too large for table arithmetic")]
    TooLarge { p: u64, d: usize },
    #[error("tower degrees must be distinct primes in ascending order")]
    PrimesNotAscendingDistinct,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element does not belong to this field")]
    FieldMismatch,
    #[error("group index {0} out of range")]
    BadGroupIndex(usize),
    #[error("Gram matrix is singular; input is not a basis")]
    SingularGram,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch")]
    DimMismatch,
}

/// Arithmetic over a finite field, with elements of type [`Field::Elem`].
pub trait Field {
    type Elem: Clone + PartialEq + Eq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Uniform element drawn from `rng`.
    fn random(&self, rng: &mut SplitMix64) -> Self::Elem;
    /// Characteristic-prime power `|F|`.
    fn order(&self) -> BigUint;

    /// Checks that `a` is a well-formed element of this field.
    fn validate(&self, _a: &Self::Elem) -> Result<(), FieldError> {
        Ok(())
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a^e` for an arbitrary-size exponent (left-to-right square and multiply).
    fn pow_big(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }
}

#[cfg(test)]
pub(crate) mod axioms {
    //! Field-axiom checks shared by the per-field test modules.
    use super::Field;
    use crate::rng::SplitMix64;

    pub fn check_axioms<F: Field>(f: &F, seed: u64, rounds: usize) {
        let mut rng = SplitMix64::new(seed);
        let one = f.one();
        let zero = f.zero();
        for _ in 0..rounds {
            let a = f.random(&mut rng);
            let b = f.random(&mut rng);
            let c = f.random(&mut rng);
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            assert_eq!(f.mul(&a, &one), a);
            assert_eq!(f.add(&a, &zero), a);
            assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
            assert_eq!(f.sub(&a, &b), f.add(&a, &f.neg(&b)));
            if !f.is_zero(&a) {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), one);
            }
        }
        assert!(f.inv(&zero).is_err());
    }
}
