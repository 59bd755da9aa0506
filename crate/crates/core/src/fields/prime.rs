use num_bigint::BigUint;

use super::{Field, FieldError};
use crate::rng::SplitMix64;

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field `F_p`, `p < 2^32`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(FieldError::NonPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(&self, x: u64) -> u64 {
        x % self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> Result<u64, FieldError> {
        if *a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn random(&self, rng: &mut SplitMix64) -> u64 {
        rng.below(self.p)
    }
    fn order(&self) -> BigUint {
        BigUint::from(self.p)
    }
    fn validate(&self, a: &u64) -> Result<(), FieldError> {
        if *a < self.p {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: std::vec::Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(65_521));
        assert!(!is_prime(65_535));
    }

    #[test]
    fn rejects_composite() {
        assert_eq!(PrimeField::new(9), Err(FieldError::NonPrime(9)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NonPrime(1)));
    }

    #[test]
    fn axioms_f5_f65521() {
        super::super::axioms::check_axioms(&PrimeField::new(5).unwrap(), 1, 200);
        super::super::axioms::check_axioms(&PrimeField::new(65_521).unwrap(), 2, 200);
    }
}
