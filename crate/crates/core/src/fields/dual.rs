use alloc::vec::Vec;

use super::{linalg, Field, FieldError, TowerElem, TowerField};
use crate::matrix::Mat;

/// Trace-dual basis of `lambda` with respect to `tr_{F_q/F_i}`.
///
/// `lambda` must be an `F_i`-basis of `F_q` (so it has `p_i` elements). The
/// result `mu` satisfies `tr_i(lambda[s] · mu[t]) = δ_{st}`; it is obtained as
/// `mu = G^{-1} · lambda` where `G_{st} = tr_i(lambda[s] · lambda[t])` is the
/// (symmetric) Gram matrix over `F_i`.
pub fn trace_dual_basis(tower: &TowerField, lambda: &[TowerElem], i: usize) -> Result<Vec<TowerElem>, FieldError> {
    if i >= tower.groups() {
        return Err(FieldError::BadGroupIndex(i));
    }
    let n = tower.subfield_codegree(i);
    if lambda.len() != n {
        return Err(FieldError::SingularGram);
    }
    for x in lambda {
        tower.validate(x)?;
    }
    let mut gram = Mat::zeros(tower, n, n);
    for s in 0..n {
        for t in s..n {
            let g = tower.trace(&tower.mul(&lambda[s], &lambda[t]), i)?;
            gram.set(t, s, g.clone());
            gram.set(s, t, g);
        }
    }
    let inv = linalg::inverse(tower, &gram).map_err(|_| FieldError::SingularGram)?;
    Ok((0..n)
        .map(|t| (0..n).fold(tower.zero(), |acc, s| tower.add(&acc, &tower.mul(inv.get(t, s), &lambda[s]))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BaseField;
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn assert_dual(tower: &TowerField, lambda: &[TowerElem], mu: &[TowerElem], i: usize) {
        for (s, l) in lambda.iter().enumerate() {
            for (t, m) in mu.iter().enumerate() {
                let tr = tower.trace(&tower.mul(l, m), i).unwrap();
                let expect = if s == t { tower.one() } else { tower.zero() };
                assert_eq!(tr, expect);
            }
        }
    }

    #[test]
    fn f4_over_f2_basis_one_omega() {
        let f4 = TowerField::new(BaseField::new(2, 1).unwrap(), &[2]).unwrap();
        let w = f4.generator(0).unwrap();
        let mu = trace_dual_basis(&f4, &[f4.one(), w.clone()], 0).unwrap();
        let w2 = f4.mul(&w, &w);
        assert_eq!(mu, vec![w2, f4.one()]);
    }

    #[test]
    fn dual_of_dual_is_original_and_expansion_holds() {
        let tower = TowerField::new(BaseField::new(11, 1).unwrap(), &[2, 3]).unwrap();
        let mut rng = SplitMix64::new(21);
        for i in 0..2 {
            let a = tower.generator(i).unwrap();
            let c = tower.random(&mut rng);
            let lambda: Vec<TowerElem> =
                (0..tower.primes()[i] as u64).map(|s| tower.mul(&c, &tower.pow(&a, s))).collect();
            let mu = trace_dual_basis(&tower, &lambda, i).unwrap();
            assert_dual(&tower, &lambda, &mu, i);
            assert_eq!(trace_dual_basis(&tower, &mu, i).unwrap(), lambda);
            for _ in 0..50 {
                let beta = tower.random(&mut rng);
                let rebuilt = lambda.iter().zip(&mu).fold(tower.zero(), |acc, (l, m)| {
                    let coef = tower.trace(&tower.mul(l, &beta), i).unwrap();
                    tower.add(&acc, &tower.mul(&coef, m))
                });
                assert_eq!(rebuilt, beta);
            }
        }
    }

    #[test]
    fn dependent_input_is_rejected() {
        let tower = TowerField::new(BaseField::new(11, 1).unwrap(), &[2, 3]).unwrap();
        // Two F_1-multiples of the same element.
        let x = tower.generator(0).unwrap();
        let c = tower.generator(1).unwrap();
        let lambda = vec![x.clone(), tower.mul(&c, &x)];
        assert_eq!(trace_dual_basis(&tower, &lambda, 0), Err(FieldError::SingularGram));
        assert_eq!(trace_dual_basis(&tower, &lambda[..1], 0), Err(FieldError::SingularGram));
    }
}
