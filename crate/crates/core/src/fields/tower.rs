use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use super::{is_prime, upoly, BaseField, Field, FieldError};
use crate::rng::SplitMix64;

/// The composite field `F_q = F_{q0}[x_1, …, x_L] / (m_1(x_1), …, m_L(x_L))`
/// where `m_i` is irreducible of prime degree `p_i` over `F_{q0}`.
///
/// Because the `p_i` are distinct primes the quotient is a field of order
/// `q0^(p_1⋯p_L)`, and `α_i` (the class of `x_i`) generates the degree-`p_i`
/// extension `F_{q0}(α_i)`. Elements are coefficient tensors of shape
/// `p_1 × ⋯ × p_L`, flattened with axis 0 slowest.
///
/// Axis (group) indices in this API are 0-based.
#[derive(Clone)]
pub struct TowerField {
    inner: Arc<Inner>,
}

struct Inner {
    base: BaseField,
    primes: Vec<usize>,
    moduli: Vec<Vec<u32>>,
    strides: Vec<usize>,
    size: usize,
    /// `frob[i][k]`: `p_i × p_i` row-major matrix of `y ↦ y^{q0^k}` on `F_{q0}(α_i)`.
    frob: Vec<Vec<Vec<u32>>>,
    /// `trace_consts[i][s] = tr_{F_{q0}(α_i)/F_{q0}}(α_i^s)`.
    trace_consts: Vec<Vec<u32>>,
    /// Offset of each flat index inside the un-reduced product buffer.
    ext_offsets: Vec<usize>,
    ext_strides: Vec<usize>,
    ext_size: usize,
}

/// An element of a [`TowerField`]: its coefficient tensor over `F_{q0}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TowerElem {
    coeffs: Vec<u32>,
}

impl TowerElem {
    /// Flattened coefficients (axis 0 slowest).
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }
}

impl fmt::Debug for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TowerElem{:?}", self.coeffs)
    }
}

impl fmt::Debug for TowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TowerField")
            .field("p", &self.inner.base.characteristic())
            .field("d", &self.inner.base.degree())
            .field("primes", &self.inner.primes)
            .field("moduli", &self.inner.moduli)
            .finish()
    }
}

impl PartialEq for TowerField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.base == other.inner.base && self.inner.moduli == other.inner.moduli)
    }
}
impl Eq for TowerField {}

impl TowerField {
    /// Builds the tower over `base` with one axis per prime in `primes`.
    ///
    /// Each axis modulus is the first monic irreducible polynomial of degree
    /// `p_i` over `F_{q0}` in increasing code order `Σ_k c_k q0^k`.
    pub fn new(base: BaseField, primes: &[usize]) -> Result<Self, FieldError> {
        if primes.is_empty() || primes.windows(2).any(|w| w[0] >= w[1]) || primes.iter().any(|&p| !is_prime(p as u64)) {
            return Err(FieldError::PrimesNotAscendingDistinct);
        }
        let moduli = primes.iter().map(|&p| find_modulus(&base, p)).collect::<Result<Vec<_>, _>>()?;

        let l = primes.len();
        let mut strides = vec![1usize; l];
        let mut ext_strides = vec![1usize; l];
        for i in (0..l.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * primes[i + 1];
            ext_strides[i] = ext_strides[i + 1] * (2 * primes[i + 1] - 1);
        }
        let size: usize = primes.iter().product();
        let ext_size: usize = primes.iter().map(|p| 2 * p - 1).product();
        let ext_offsets =
            (0..size).map(|flat| (0..l).map(|i| (flat / strides[i]) % primes[i] * ext_strides[i]).sum()).collect();

        let q0 = base.order();
        let mut frob = Vec::with_capacity(l);
        let mut trace_consts = Vec::with_capacity(l);
        for (i, &p) in primes.iter().enumerate() {
            let m = &moduli[i];
            let x = vec![0u32, 1u32];
            let mut mats = Vec::with_capacity(p);
            // beta = x^{q0^k} mod m
            let mut beta = upoly::rem(&base, &x, m);
            for _ in 0..p {
                let mut mat = vec![0u32; p * p];
                let mut col = vec![1u32];
                for s in 0..p {
                    for (r, c) in col.iter().enumerate() {
                        mat[r * p + s] = *c;
                    }
                    col = upoly::mul_mod(&base, &col, &beta, m);
                }
                mats.push(mat);
                beta = upoly::pow_mod(&base, &beta, &q0, m);
            }
            let consts = (0..p).map(|s| mats.iter().fold(0u32, |acc, mat| base.add(&acc, &mat[s]))).collect();
            frob.push(mats);
            trace_consts.push(consts);
        }

        Ok(Self {
            inner: Arc::new(Inner {
                base,
                primes: primes.to_vec(),
                moduli,
                strides,
                size,
                frob,
                trace_consts,
                ext_offsets,
                ext_strides,
                ext_size,
            }),
        })
    }

    pub fn base(&self) -> &BaseField {
        &self.inner.base
    }

    pub fn primes(&self) -> &[usize] {
        &self.inner.primes
    }

    /// Number of groups `L`.
    pub fn groups(&self) -> usize {
        self.inner.primes.len()
    }

    /// Per-axis monic moduli over `F_{q0}`, low degree first.
    pub fn moduli(&self) -> &[Vec<u32>] {
        &self.inner.moduli
    }

    /// Degree `p_1⋯p_L` of `F_q` over `F_{q0}`.
    pub fn degree(&self) -> usize {
        self.inner.size
    }

    /// Degree of `F_q` over the subfield `F_i` (which is `p_i`).
    pub fn subfield_codegree(&self, i: usize) -> usize {
        self.inner.primes[i]
    }

    /// Number of `F_{q0}` coefficients of an element of `F_i`.
    pub fn subfield_degree(&self, i: usize) -> usize {
        self.inner.size / self.inner.primes[i]
    }

    /// Element from a flat coefficient vector.
    pub fn from_coeffs(&self, coeffs: Vec<u32>) -> Result<TowerElem, FieldError> {
        let x = TowerElem { coeffs };
        self.validate(&x)?;
        Ok(x)
    }

    /// Embeds an `F_{q0}` element.
    pub fn embed(&self, c: u32) -> TowerElem {
        let mut coeffs = vec![0u32; self.inner.size];
        coeffs[0] = c;
        TowerElem { coeffs }
    }

    /// The generator `α_i` of axis `i`.
    pub fn generator(&self, i: usize) -> Result<TowerElem, FieldError> {
        if i >= self.groups() {
            return Err(FieldError::BadGroupIndex(i));
        }
        let mut coeffs = vec![0u32; self.inner.size];
        coeffs[self.inner.strides[i]] = 1;
        Ok(TowerElem { coeffs })
    }

    /// Canonical enumeration of `F_q`: base-`q0` digits of `index` fill the
    /// flat coefficients, lowest digit at flat index 0.
    pub fn element_from_index(&self, mut index: u128) -> TowerElem {
        let q0 = self.inner.base.size() as u128;
        let coeffs = (0..self.inner.size)
            .map(|_| {
                let c = (index % q0) as u32;
                index /= q0;
                c
            })
            .collect();
        TowerElem { coeffs }
    }

    /// Inverse of [`Self::element_from_index`]; `None` if the index overflows `u128`.
    pub fn element_index(&self, x: &TowerElem) -> Option<u128> {
        let q0 = self.inner.base.size() as u128;
        x.coeffs.iter().rev().try_fold(0u128, |acc, &c| acc.checked_mul(q0)?.checked_add(c as u128))
    }

    /// `Some(c)` when `x` lies in `F_{q0}`.
    pub fn as_base(&self, x: &TowerElem) -> Option<u32> {
        x.coeffs[1..].iter().all(|&c| c == 0).then_some(x.coeffs[0])
    }

    /// Whether `x` lies in `F_i = F_{q0}(α_j : j ≠ i)`.
    pub fn in_subfield(&self, x: &TowerElem, i: usize) -> bool {
        let (stride, p) = (self.inner.strides[i], self.inner.primes[i]);
        x.coeffs.iter().enumerate().all(|(flat, &c)| c == 0 || (flat / stride) % p == 0)
    }

    /// Flat indices carrying the coefficients of `F_i` elements, in order.
    pub fn subfield_support(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (stride, p) = (self.inner.strides[i], self.inner.primes[i]);
        (0..self.inner.size).filter(move |flat| (flat / stride) % p == 0)
    }

    /// Multiplication by an `F_{q0}` scalar.
    pub fn scale(&self, c: u32, x: &TowerElem) -> TowerElem {
        let base = &self.inner.base;
        TowerElem { coeffs: x.coeffs.iter().map(|v| base.mul(&c, v)).collect() }
    }

    /// `x^{q0^e}`: the `e`-th iterate of Frobenius over `F_{q0}`.
    ///
    /// Applied axis by axis as the linear map `y ↦ y^{q0^e}` of each
    /// `F_{q0}(α_i)`, which is exactly the field automorphism on the tensor.
    pub fn frobenius(&self, x: &TowerElem, e: u64) -> TowerElem {
        let mut out = x.clone();
        for i in 0..self.groups() {
            let k = (e % self.inner.primes[i] as u64) as usize;
            if k != 0 {
                out = self.apply_axis(&out, i, &self.inner.frob[i][k]);
            }
        }
        out
    }

    /// `tr_{F_q/F_i}(x)`, collapsing axis `i` with `tr(α_i^s)`.
    ///
    /// The Galois group of `F_q/F_i` acts on axis `i` exactly as the Galois
    /// group of `F_{q0}(α_i)/F_{q0}` and fixes the other axes.
    pub fn trace(&self, x: &TowerElem, i: usize) -> Result<TowerElem, FieldError> {
        if i >= self.groups() {
            return Err(FieldError::BadGroupIndex(i));
        }
        let base = &self.inner.base;
        let (stride, p) = (self.inner.strides[i], self.inner.primes[i]);
        let consts = &self.inner.trace_consts[i];
        let mut coeffs = vec![0u32; self.inner.size];
        for flat in self.subfield_support(i) {
            let mut acc = 0u32;
            for (s, t) in consts.iter().enumerate() {
                acc = base.add(&acc, &base.mul(t, &x.coeffs[flat + s * stride]));
            }
            coeffs[flat] = acc;
        }
        debug_assert!(p == consts.len());
        Ok(TowerElem { coeffs })
    }

    /// Trace constants `tr(α_i^s)`, `0 ≤ s < p_i`.
    pub fn trace_constants(&self, i: usize) -> &[u32] {
        &self.inner.trace_consts[i]
    }

    fn apply_axis(&self, x: &TowerElem, i: usize, mat: &[u32]) -> TowerElem {
        let base = &self.inner.base;
        let (stride, p) = (self.inner.strides[i], self.inner.primes[i]);
        let mut out = vec![0u32; self.inner.size];
        let block = stride * p;
        for outer in (0..self.inner.size).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for r in 0..p {
                    let mut acc = 0u32;
                    for s in 0..p {
                        let v = x.coeffs[start + s * stride];
                        if v != 0 {
                            acc = base.add(&acc, &base.mul(&mat[r * p + s], &v));
                        }
                    }
                    out[start + r * stride] = acc;
                }
            }
        }
        TowerElem { coeffs: out }
    }

    fn mul_full(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let inner = &*self.inner;
        let base = &inner.base;
        let nz_b: Vec<(usize, u32)> =
            b.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (inner.ext_offsets[k], c)).collect();
        let mut buf = vec![0u32; inner.ext_size];
        for (k, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let oa = inner.ext_offsets[k];
            for &(ob, y) in &nz_b {
                let slot = &mut buf[oa + ob];
                *slot = base.add(slot, &base.mul(&x, &y));
            }
        }
        // Reduce each axis modulo its monic m_i: x^{p+r} -> -Σ_t m_t x^{t+r}.
        let l = inner.primes.len();
        for i in 0..l {
            let p = inner.primes[i];
            let m = &inner.moduli[i];
            let es = inner.ext_strides[i];
            let block = es * (2 * p - 1);
            for outer in (0..inner.ext_size).step_by(block) {
                for off in 0..es {
                    let start = outer + off;
                    for top in (p..2 * p - 1).rev() {
                        let c = buf[start + top * es];
                        if c == 0 {
                            continue;
                        }
                        buf[start + top * es] = 0;
                        for (t, mt) in m[..p].iter().enumerate() {
                            let idx = start + (top - p + t) * es;
                            buf[idx] = base.sub(&buf[idx], &base.mul(&c, mt));
                        }
                    }
                }
            }
        }
        TowerElem { coeffs: inner.ext_offsets.iter().map(|&o| buf[o]).collect() }
    }
}

fn find_modulus(base: &BaseField, degree: usize) -> Result<Vec<u32>, FieldError> {
    let q0 = base.size() as u128;
    let count = q0.checked_pow(degree as u32).unwrap_or(u128::MAX);
    let mut code = 0u128;
    while code < count {
        let mut c = code;
        let mut m: Vec<u32> = (0..degree)
            .map(|_| {
                let d = (c % q0) as u32;
                c /= q0;
                d
            })
            .collect();
        m.push(1);
        if m[0] != 0 && upoly::is_irreducible(base, &m) {
            return Ok(m);
        }
        code += 1;
    }
    Err(FieldError::NoIrreducible { degree })
}

impl Field for TowerField {
    type Elem = TowerElem;

    fn zero(&self) -> TowerElem {
        TowerElem { coeffs: vec![0; self.inner.size] }
    }
    fn one(&self) -> TowerElem {
        self.embed(1)
    }
    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let base = &self.inner.base;
        TowerElem { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| base.add(x, y)).collect() }
    }
    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let base = &self.inner.base;
        TowerElem { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| base.sub(x, y)).collect() }
    }
    fn neg(&self, a: &TowerElem) -> TowerElem {
        let base = &self.inner.base;
        TowerElem { coeffs: a.coeffs.iter().map(|x| base.neg(x)).collect() }
    }
    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        if let Some(c) = self.as_base(a) {
            return self.scale(c, b);
        }
        if let Some(c) = self.as_base(b) {
            return self.scale(c, a);
        }
        self.mul_full(a, b)
    }
    /// Norm-based inversion: `x^{-1} = x^{r-1} / N(x)` with
    /// `r = (q-1)/(q0-1)`, where `x^{r-1} = ∏_{k=1}^{P-1} x^{q0^k}` is built
    /// from Frobenius images in `O(log P)` multiplications.
    fn inv(&self, a: &TowerElem) -> Result<TowerElem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::ZeroInverse);
        }
        let base = &self.inner.base;
        if let Some(c) = self.as_base(a) {
            return Ok(self.embed(base.inv(&c)?));
        }
        let m = (self.inner.size - 1) as u64;
        // acc = ∏_{k<len} a^{q0^k}, grown along the binary expansion of m.
        let mut acc = a.clone();
        let mut len = 1u64;
        for bit in (0..63 - m.leading_zeros()).rev() {
            acc = self.mul_full(&acc, &self.frobenius(&acc, len));
            len *= 2;
            if (m >> bit) & 1 == 1 {
                acc = self.mul_full(a, &self.frobenius(&acc, 1));
                len += 1;
            }
        }
        debug_assert_eq!(len, m);
        let conj = self.frobenius(&acc, 1);
        let norm = self.mul_full(a, &conj);
        let n = self.as_base(&norm).expect("norm of a tower element lies in the base field");
        Ok(self.scale(base.inv(&n)?, &conj))
    }
    fn is_zero(&self, a: &TowerElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }
    fn random(&self, rng: &mut SplitMix64) -> TowerElem {
        let base = &self.inner.base;
        TowerElem { coeffs: (0..self.inner.size).map(|_| base.random(rng)).collect() }
    }
    fn order(&self) -> BigUint {
        self.inner.base.order().pow(self.inner.size as u32)
    }
    fn validate(&self, a: &TowerElem) -> Result<(), FieldError> {
        let q0 = self.inner.base.size();
        if a.coeffs.len() != self.inner.size || a.coeffs.iter().any(|&c| c as u64 >= q0) {
            return Err(FieldError::FieldMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::axioms::check_axioms;
    use num_traits::One;

    fn f16() -> TowerField {
        TowerField::new(BaseField::new(2, 2).unwrap(), &[2]).unwrap()
    }

    fn f11_6() -> TowerField {
        TowerField::new(BaseField::new(11, 1).unwrap(), &[2, 3]).unwrap()
    }

    /// Naive trace oracle: Σ_{t<p_i} x^{|F_i|^t} via big-exponent powering.
    fn naive_trace(f: &TowerField, x: &TowerElem, i: usize) -> TowerElem {
        let sub_order = f.base().order().pow(f.subfield_degree(i) as u32);
        let mut acc = f.zero();
        let mut term = x.clone();
        for _ in 0..f.primes()[i] {
            acc = f.add(&acc, &term);
            term = f.pow_big(&term, &sub_order);
        }
        acc
    }

    #[test]
    fn f16_generator_satisfies_alpha4_alpha_1() {
        let f = f16();
        // Over F_4 = F_2(ω), the axis modulus is x^2 + x + ω.
        assert_eq!(f.moduli()[0], vec![2, 1, 1]);
        let a = f.generator(0).unwrap();
        let a3 = f.pow(&a, 3);
        let a4 = f.mul(&a, &a3);
        assert_eq!(a4, f.add(&a, &f.one()));
        assert_eq!(f.pow(&a, 15), f.one());
        assert_ne!(f.pow(&a, 5), f.one());
        assert_ne!(f.pow(&a, 3), f.one());
    }

    #[test]
    fn trace_of_alpha_in_f16_is_one() {
        let f = f16();
        let a = f.generator(0).unwrap();
        assert_eq!(f.trace(&a, 0).unwrap(), f.one());
        for y in 0..4 {
            assert!(f.is_zero(&f.trace(&f.embed(y), 0).unwrap()));
        }
        assert_eq!(f.trace(&a, 1), Err(FieldError::BadGroupIndex(1)));
    }

    #[test]
    fn frobenius_f16() {
        let f = f16();
        let a = f.generator(0).unwrap();
        assert_eq!(f.frobenius(&a, 1), f.add(&a, &f.one()));
        for y in 0..4 {
            assert_eq!(f.frobenius(&f.embed(y), 1), f.embed(y));
        }
    }

    #[test]
    fn frobenius_matches_repeated_q0_powering() {
        for f in [f16(), f11_6()] {
            let q0 = f.base().size();
            let mut rng = SplitMix64::new(5);
            for _ in 0..20 {
                let x = f.random(&mut rng);
                let mut naive = x.clone();
                for e in 0..=f.degree() as u64 {
                    assert_eq!(f.frobenius(&x, e), naive);
                    naive = f.pow(&naive, q0);
                }
                assert_eq!(f.frobenius(&x, f.degree() as u64), x);
            }
        }
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative() {
        let f = f11_6();
        let mut rng = SplitMix64::new(8);
        for _ in 0..30 {
            let (x, y) = (f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.frobenius(&f.add(&x, &y), 1), f.add(&f.frobenius(&x, 1), &f.frobenius(&y, 1)));
            assert_eq!(f.frobenius(&f.mul(&x, &y), 1), f.mul(&f.frobenius(&x, 1), &f.frobenius(&y, 1)));
        }
    }

    #[test]
    fn trace_equals_naive_exhaustive_f16() {
        let f = f16();
        for k in 0..16u128 {
            let x = f.element_from_index(k);
            assert_eq!(f.trace(&x, 0).unwrap(), naive_trace(&f, &x, 0));
        }
    }

    #[test]
    fn trace_equals_naive_sampled_f11_6() {
        let f = f11_6();
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let x = f.random(&mut rng);
            for i in 0..2 {
                let t = f.trace(&x, i).unwrap();
                assert!(f.in_subfield(&t, i));
                assert_eq!(t, naive_trace(&f, &x, i));
            }
        }
    }

    #[test]
    fn trace_is_subfield_linear() {
        let f = f11_6();
        let mut rng = SplitMix64::new(12);
        for _ in 0..50 {
            for i in 0..2 {
                let c = f.trace(&f.random(&mut rng), i).unwrap();
                let (x, y) = (f.random(&mut rng), f.random(&mut rng));
                let lhs = f.trace(&f.add(&f.mul(&c, &x), &y), i).unwrap();
                let rhs = f.add(&f.mul(&c, &f.trace(&x, i).unwrap()), &f.trace(&y, i).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn inverse_matches_fermat_power() {
        for f in [f16(), f11_6()] {
            let e = f.order() - BigUint::from(2u32);
            let mut rng = SplitMix64::new(3);
            for _ in 0..50 {
                let x = f.random(&mut rng);
                if f.is_zero(&x) {
                    continue;
                }
                let inv = f.inv(&x).unwrap();
                assert_eq!(inv, f.pow_big(&x, &e));
                assert_eq!(f.mul(&x, &inv), f.one());
            }
        }
    }

    #[test]
    fn order_of_f11_6_divides_group_order() {
        let f = f11_6();
        assert_eq!(f.order(), BigUint::from(11u32).pow(6));
        let group = f.order() - BigUint::one();
        let mut rng = SplitMix64::new(9);
        let x = f.random(&mut rng);
        assert_eq!(f.pow_big(&x, &group), f.one());
        // Not contained in any proper subfield F_{11^k}, k ∈ {1,2,3}.
        for k in [1u32, 2, 3] {
            let sub = BigUint::from(11u32).pow(k);
            assert_ne!(f.pow_big(&x, &sub), x);
        }
    }

    #[test]
    fn axioms_small_towers() {
        check_axioms(&f16(), 1, 200);
        check_axioms(&f11_6(), 2, 200);
        let f = TowerField::new(BaseField::new(2, 1).unwrap(), &[2, 3, 5]).unwrap();
        check_axioms(&f, 3, 50);
    }

    #[test]
    fn rejects_bad_primes() {
        let base = BaseField::new(5, 1).unwrap();
        for bad in [&[3usize, 2][..], &[2, 2], &[4], &[]] {
            assert_eq!(TowerField::new(base.clone(), bad).unwrap_err(), FieldError::PrimesNotAscendingDistinct);
        }
    }

    #[test]
    fn moduli_are_irreducible_and_first() {
        let f = f11_6();
        for (i, m) in f.moduli().iter().enumerate() {
            assert_eq!(m.len(), f.primes()[i] + 1);
            assert!(upoly::is_irreducible(f.base(), m));
        }
        // Over F_11 the first irreducible quadratic by code is x^2 + 1 (-1 is a non-residue).
        assert_eq!(f.moduli()[0], vec![1, 0, 1]);
    }

    #[test]
    fn validate_rejects_foreign_elements() {
        let f = f16();
        assert_eq!(f.from_coeffs(vec![0, 1, 2]).unwrap_err(), FieldError::FieldMismatch);
        assert_eq!(f.from_coeffs(vec![4, 0]).unwrap_err(), FieldError::FieldMismatch);
        assert!(f.from_coeffs(vec![3, 2]).is_ok());
    }
}
