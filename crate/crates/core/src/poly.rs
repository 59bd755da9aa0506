//! Univariate polynomials over any [`Field`]: Horner evaluation, Lagrange
//! interpolation, annihilators and the column multipliers of the dual of a
//! Reed-Solomon code.

use alloc::vec;
use alloc::vec::Vec;

use crate::fields::{Field, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("evaluation points are not distinct (index {0})")]
    DuplicatePoint(usize),
    #[error("{points} points but {values} values")]
    LengthMismatch { points: usize, values: usize },
    #[error("basis index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Dense polynomial, low degree first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone> Poly<E> {
    pub fn from_coeffs<F: Field<Elem = E>>(field: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant<F: Field<Elem = E>>(field: &F, c: E) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval<F: Field<Elem = E>>(&self, field: &F, x: &E) -> Result<E, FieldError> {
        field.validate(x)?;
        Ok(self.eval_unchecked(field, x))
    }

    pub(crate) fn eval_unchecked<F: Field<Elem = E>>(&self, field: &F, x: &E) -> E {
        self.coeffs.iter().rev().fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = field.zero();
        let coeffs = (0..n)
            .map(|k| field.add(self.coeffs.get(k).unwrap_or(&zero), other.coeffs.get(k).unwrap_or(&zero)))
            .collect();
        Self::from_coeffs(field, coeffs)
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(&out[i + j], &field.mul(a, b));
            }
        }
        Self::from_coeffs(field, out)
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        Self::from_coeffs(field, self.coeffs.iter().map(|v| field.mul(c, v)).collect())
    }
}

fn check_distinct<F: Field>(field: &F, points: &[F::Elem]) -> Result<(), PolyError> {
    for p in points {
        field.validate(p)?;
    }
    for j in 1..points.len() {
        if points[..j].contains(&points[j]) {
            return Err(PolyError::DuplicatePoint(j));
        }
    }
    Ok(())
}

/// Monic `∏_j (x − points[j])`; the empty product is `1`.
pub fn annihilator<F: Field>(field: &F, points: &[F::Elem]) -> Poly<F::Elem> {
    points.iter().fold(Poly::constant(field, field.one()), |acc, a| {
        acc.mul(field, &Poly::from_coeffs(field, vec![field.neg(a), field.one()]))
    })
}

/// Lagrange basis polynomial `f_i` on `points`: `f_i(points[j]) = δ_{ij}`.
pub fn lagrange_basis<F: Field>(field: &F, i: usize, points: &[F::Elem]) -> Result<Poly<F::Elem>, PolyError> {
    if i >= points.len() {
        return Err(PolyError::IndexOutOfRange { index: i, len: points.len() });
    }
    check_distinct(field, points)?;
    let others: Vec<F::Elem> = points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
    let num = annihilator(field, &others);
    let den = num.eval_unchecked(field, &points[i]);
    Ok(num.scale(field, &field.inv(&den)?))
}

/// Values `f_i(x)` of all Lagrange basis polynomials on `points` at `x`.
pub fn lagrange_coefficients<F: Field>(field: &F, points: &[F::Elem], x: &F::Elem) -> Result<Vec<F::Elem>, PolyError> {
    check_distinct(field, points)?;
    if let Some(k) = points.iter().position(|p| p == x) {
        return Ok((0..points.len()).map(|j| if j == k { field.one() } else { field.zero() }).collect());
    }
    points
        .iter()
        .enumerate()
        .map(|(i, pi)| {
            let mut num = field.one();
            let mut den = field.one();
            for (j, pj) in points.iter().enumerate() {
                if j != i {
                    num = field.mul(&num, &field.sub(x, pj));
                    den = field.mul(&den, &field.sub(pi, pj));
                }
            }
            Ok(field.mul(&num, &field.inv(&den)?))
        })
        .collect()
}

/// The unique polynomial of degree `< points.len()` through `(points[j], values[j])`.
pub fn lagrange_interpolate<F: Field>(
    field: &F,
    points: &[F::Elem],
    values: &[F::Elem],
) -> Result<Poly<F::Elem>, PolyError> {
    if points.len() != values.len() {
        return Err(PolyError::LengthMismatch { points: points.len(), values: values.len() });
    }
    check_distinct(field, points)?;
    let mut acc = Poly::zero();
    for (i, v) in values.iter().enumerate() {
        if field.is_zero(v) {
            continue;
        }
        acc = acc.add(field, &lagrange_basis(field, i, points)?.scale(field, v));
    }
    Ok(acc)
}

/// `v_j = ∏_{i≠j} (α_j − α_i)^{-1}`: the multipliers under which the dual of
/// `RS(n, k, Ω)` is `GRS(n, n − k, Ω, v)`.
pub fn dual_weights<F: Field>(field: &F, points: &[F::Elem]) -> Result<Vec<F::Elem>, PolyError> {
    check_distinct(field, points)?;
    points
        .iter()
        .enumerate()
        .map(|(j, aj)| {
            let prod = points
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .fold(field.one(), |acc, (_, ai)| field.mul(&acc, &field.sub(aj, ai)));
            Ok(field.inv(&prod)?)
        })
        .collect()
}

/// An ordered evaluation set `Ω` with its dual weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalDomain<E> {
    points: Vec<E>,
    weights: Vec<E>,
}

impl<E: Clone> EvalDomain<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, points: Vec<E>) -> Result<Self, PolyError> {
        let weights = dual_weights(field, &points)?;
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[E] {
        &self.points
    }

    pub fn weights(&self) -> &[E] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Whether `Σ_j v_j k(α_j) α_j^s h_j = 0` for every `0 ≤ s < s_count`.
///
/// With `h_j = h(α_j)` for a polynomial `h` and `deg(k) + s_count − 1 + deg(h) ≤ n − 2`
/// this is the dual-code relation and must hold.
pub fn dual_orthogonality_check<F: Field>(
    field: &F,
    domain: &EvalDomain<F::Elem>,
    k: &Poly<F::Elem>,
    h_values: &[F::Elem],
    s_count: usize,
) -> bool {
    if h_values.len() != domain.len() {
        return false;
    }
    let terms: Vec<F::Elem> = domain
        .points
        .iter()
        .zip(&domain.weights)
        .zip(h_values)
        .map(|((a, v), h)| field.mul(&field.mul(v, &k.eval_unchecked(field, a)), h))
        .collect();
    let mut powered = terms;
    for _ in 0..s_count {
        let sum = powered.iter().fold(field.zero(), |acc, t| field.add(&acc, t));
        if !field.is_zero(&sum) {
            return false;
        }
        powered = powered.iter().zip(&domain.points).map(|(t, a)| field.mul(t, a)).collect();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BaseField, PrimeField, TowerField};
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn eval_basics() {
        let f = f5();
        assert_eq!(Poly::<u64>::zero().eval(&f, &3).unwrap(), 0);
        let one_minus_x = Poly::from_coeffs(&f, vec![1, 4]);
        assert_eq!(one_minus_x.eval(&f, &1).unwrap(), 0);
        assert_eq!(one_minus_x.eval(&f, &7), Err(FieldError::FieldMismatch));
    }

    #[test]
    fn eval_in_f16() {
        let f = TowerField::new(BaseField::new(2, 2).unwrap(), &[2]).unwrap();
        let a = f.generator(0).unwrap();
        let p = Poly::from_coeffs(&f, vec![f.zero(), f.one(), f.one()]);
        // α^2 + α = α^5 when α^4 = α + 1.
        assert_eq!(p.eval(&f, &a).unwrap(), f.pow(&a, 5));
    }

    #[test]
    fn interpolation_examples() {
        let f = f5();
        let p = lagrange_interpolate(&f, &[0, 1], &[1, 0]).unwrap();
        assert_eq!(p.coeffs(), &[1, 4]);
        assert_eq!(lagrange_basis(&f, 1, &[0, 1]).unwrap().coeffs(), &[0, 1]);
        assert_eq!(lagrange_basis(&f, 0, &[0, 1]).unwrap().coeffs(), &[1, 4]);
        assert_eq!(lagrange_interpolate(&f, &[2, 2], &[1, 1]), Err(PolyError::DuplicatePoint(1)));
        assert_eq!(lagrange_basis(&f, 2, &[0, 1]), Err(PolyError::IndexOutOfRange { index: 2, len: 2 }));
    }

    #[test]
    fn basis_is_kronecker_and_sums_to_one() {
        let f = PrimeField::new(97).unwrap();
        let pts = [3u64, 17, 42, 5, 88];
        let mut sum = Poly::zero();
        for i in 0..pts.len() {
            let b = lagrange_basis(&f, i, &pts).unwrap();
            for (j, x) in pts.iter().enumerate() {
                assert_eq!(b.eval(&f, x).unwrap(), u64::from(i == j));
            }
            sum = sum.add(&f, &b);
        }
        assert_eq!(sum.coeffs(), &[1]);
    }

    #[test]
    fn annihilator_examples() {
        let f = f5();
        assert_eq!(annihilator(&f, &[]).coeffs(), &[1]);
        assert_eq!(annihilator(&f, &[0]).coeffs(), &[0, 1]);
    }

    #[test]
    fn annihilator_vanishes_exactly_on_points_f5() {
        let f = f5();
        for mask in 0u32..32 {
            let pts: Vec<u64> = (0..5).filter(|k| mask >> k & 1 == 1).collect();
            let k = annihilator(&f, &pts);
            assert_eq!(k.degree(), Some(pts.len()));
            assert_eq!(k.coeffs().last(), Some(&1));
            for x in 0..5 {
                assert_eq!(k.eval(&f, &x).unwrap() == 0, pts.contains(&x));
            }
        }
    }

    #[test]
    fn dual_weight_examples() {
        let f = f5();
        assert_eq!(dual_weights(&f, &[0, 1, 2]).unwrap(), vec![3, 4, 3]);
        assert_eq!(dual_weights(&f, &[0, 1]).unwrap(), vec![4, 1]);
        let w = dual_weights(&f, &[0, 1, 2]).unwrap();
        let s = (0..3).fold(0, |acc, j| f.add(&acc, &f.mul(&w[j], &(j as u64))));
        assert_eq!(s, 0);
        assert_eq!(dual_weights(&f, &[1, 1]), Err(PolyError::DuplicatePoint(1)));
    }

    #[test]
    fn orthogonality_on_random_low_degree_h() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = SplitMix64::new(17);
        let pts: Vec<u64> = (0..12).map(|k| k * 7 + 1).collect();
        let domain = EvalDomain::new(&f, pts.clone()).unwrap();
        let k = annihilator(&f, &pts[9..]);
        // deg k = 3, s < 2, so deg h ≤ n − 2 − 3 − 1 = 6.
        let h = Poly::from_coeffs(&f, (0..7).map(|_| f.random(&mut rng)).collect());
        let hv: Vec<u64> = pts.iter().map(|x| h.eval(&f, x).unwrap()).collect();
        assert!(dual_orthogonality_check(&f, &domain, &k, &hv, 2));
        assert!(dual_orthogonality_check(&f, &domain, &k, &[0; 12], 2));
        let mut bad = hv.clone();
        bad[0] = f.add(&bad[0], &1);
        assert!(!dual_orthogonality_check(&f, &domain, &k, &bad, 2));
    }

    proptest! {
        #[test]
        fn interpolate_eval_roundtrip(seed in any::<u64>(), n in 1usize..8) {
            let f = PrimeField::new(257).unwrap();
            let mut rng = SplitMix64::new(seed);
            let pts: Vec<u64> = (0..n as u64).map(|k| (k * 37 + seed % 11) % 257).collect();
            let coeffs: Vec<u64> = (0..n).map(|_| f.random(&mut rng)).collect();
            let p = Poly::from_coeffs(&f, coeffs);
            let vals: Vec<u64> = pts.iter().map(|x| p.eval(&f, x).unwrap()).collect();
            prop_assert_eq!(lagrange_interpolate(&f, &pts, &vals).unwrap(), p.clone());
            let x = f.random(&mut rng);
            let direct = p.eval(&f, &x).unwrap();
            let via = lagrange_coefficients(&f, &pts, &x).unwrap()
                .iter().zip(&vals).fold(0, |acc, (c, v)| f.add(&acc, &f.mul(c, v)));
            prop_assert_eq!(direct, via);
        }
    }
}
