use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::{upoly, Field, FieldError, PrimeField};
use crate::rng::SplitMix64;

/// Largest `p^d` (for `d > 1`) served by log/exp tables.
const MAX_TABLE_ORDER: u64 = 1 << 20;
/// Additions go through a full table up to this order.
const MAX_ADD_TABLE_ORDER: u64 = 256;

/// The base field `F_{q0} = F_p[y]/(m(y))`, `q0 = p^d`.
///
/// Elements are `u32` indices `Σ_k c_k p^k` where `c_k` is the coefficient of
/// `y^k`; so `0` and `1` are the field's zero and one and the prime subfield
/// occupies indices `0..p`.
#[derive(Clone, Debug)]
pub struct BaseField {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    p: u64,
    d: usize,
    q0: u64,
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}
impl Eq for BaseField {}

impl BaseField {
    /// `F_{p^d}` with the first monic irreducible modulus of degree `d`, scanning
    /// candidates `y^d + Σ c_k y^k` by increasing code `Σ c_k p^k`.
    pub fn new(p: u64, d: usize) -> Result<Self, FieldError> {
        let fp = PrimeField::new(p)?;
        if d == 0 {
            return Err(FieldError::NoIrreducible { degree: 0 });
        }
        let q0 = match p.checked_pow(d as u32) {
            Some(q) if d == 1 || q <= MAX_TABLE_ORDER => q,
            _ => return Err(FieldError::TooLarge { p, d }),
        };
        let modulus =
            if d == 1 { vec![0, 1] } else { find_modulus(&fp, d).ok_or(FieldError::NoIrreducible { degree: d })? };
        let tables = if d == 1 { None } else { Some(build_tables(&fp, &modulus, q0)) };
        Ok(Self { inner: Arc::new(Inner { p, d, q0, modulus, tables }) })
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    /// Extension degree `d` over the prime field.
    pub fn degree(&self) -> usize {
        self.inner.d
    }

    /// `q0 = p^d`.
    pub fn size(&self) -> u64 {
        self.inner.q0
    }

    /// Monic modulus, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    /// Element with the given index (`index < q0`).
    pub fn elem(&self, index: u64) -> u32 {
        assert!(index < self.inner.q0, "index out of range");
        index as u32
    }

    /// Base-`p` digits of `x`, low first.
    pub fn digits(&self, x: u32) -> Vec<u32> {
        let p = self.inner.p;
        let mut x = x as u64;
        (0..self.inner.d)
            .map(|_| {
                let c = x % p;
                x /= p;
                c as u32
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<u32, FieldError> {
        if digits.len() != self.inner.d || digits.iter().any(|&c| c as u64 >= self.inner.p) {
            return Err(FieldError::FieldMismatch);
        }
        Ok(digits.iter().rev().fold(0u64, |acc, &c| acc * self.inner.p + c as u64) as u32)
    }

    fn add_digits(&self, a: u32, b: u32, negate_b: bool) -> u32 {
        let p = self.inner.p;
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.inner.d {
            let (x, y) = (a % p, b % p);
            let y = if negate_b && y != 0 { p - y } else { y };
            out += (x + y) % p * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out as u32
    }
}

fn find_modulus(fp: &PrimeField, d: usize) -> Option<Vec<u64>> {
    let p = fp.modulus();
    let count = p.pow(d as u32);
    (0..count).find_map(|code| {
        let mut m: Vec<u64> = (0..d).map(|k| code / p.pow(k as u32) % p).collect();
        m.push(1);
        has_no_small_factor(fp, &m).then_some(m)
    })
}

/// Brute-force factor search: no monic polynomial of degree `1..=deg/2` divides `m`.
pub(crate) fn has_no_small_factor(fp: &PrimeField, m: &[u64]) -> bool {
    let p = fp.modulus();
    let deg = m.len() - 1;
    for k in 1..=deg / 2 {
        for code in 0..p.pow(k as u32) {
            let mut g: Vec<u64> = (0..k).map(|i| code / p.pow(i as u32) % p).collect();
            g.push(1);
            if upoly::rem(fp, m, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

fn build_tables(fp: &PrimeField, modulus: &[u64], q0: u64) -> Tables {
    let p = fp.modulus();
    let d = modulus.len() - 1;
    let to_poly = |x: u64| -> Vec<u64> { (0..d).map(|k| x / p.pow(k as u32) % p).collect() };
    let to_index = |c: &[u64]| -> u64 { c.iter().rev().fold(0, |acc, &v| acc * p + v) };
    let mul_slow = |a: u64, b: u64| -> u64 {
        let r = upoly::mul_mod(fp, &to_poly(a), &to_poly(b), modulus);
        to_index(&r)
    };

    let order = q0 - 1;
    let mut factors = Vec::new();
    let mut n = order;
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            factors.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    let pow_slow = |mut a: u64, mut e: u64| -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_slow(acc, a);
            }
            a = mul_slow(a, a);
            e >>= 1;
        }
        acc
    };
    let generator = (2..q0)
        .find(|&g| factors.iter().all(|&r| pow_slow(g, order / r) != 1))
        .expect("multiplicative group of a finite field is cyclic");

    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; q0 as usize];
    let mut x = 1u64;
    for (k, slot) in exp.iter_mut().enumerate() {
        *slot = x as u32;
        log[x as usize] = k as u32;
        x = mul_slow(x, generator);
    }

    let add = (q0 <= MAX_ADD_TABLE_ORDER).then(|| {
        let mut t = vec![0u32; (q0 * q0) as usize];
        for a in 0..q0 {
            let ca = to_poly(a);
            for b in 0..q0 {
                let cb = to_poly(b);
                let s: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                t[(a * q0 + b) as usize] = to_index(&s) as u32;
            }
        }
        t
    });
    Tables { exp, log, add }
}

impl Field for BaseField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let inner = &*self.inner;
        match &inner.tables {
            None => {
                let s = *a as u64 + *b as u64;
                (if s >= inner.p { s - inner.p } else { s }) as u32
            }
            Some(Tables { add: Some(t), .. }) => t[(*a as u64 * inner.q0 + *b as u64) as usize],
            Some(_) => self.add_digits(*a, *b, false),
        }
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }
    fn neg(&self, a: &u32) -> u32 {
        let inner = &*self.inner;
        if inner.d == 1 {
            if *a == 0 {
                0
            } else {
                (inner.p - *a as u64) as u32
            }
        } else if inner.p == 2 {
            *a
        } else {
            self.add_digits(0, *a, true)
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let inner = &*self.inner;
        match &inner.tables {
            None => (*a as u64 * *b as u64 % inner.p) as u32,
            Some(t) => {
                let order = inner.q0 as usize - 1;
                let mut k = t.log[*a as usize] as usize + t.log[*b as usize] as usize;
                if k >= order {
                    k -= order;
                }
                t.exp[k]
            }
        }
    }
    fn inv(&self, a: &u32) -> Result<u32, FieldError> {
        if *a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let inner = &*self.inner;
        Ok(match &inner.tables {
            None => self.pow(a, inner.p - 2),
            Some(t) => {
                let order = inner.q0 as usize - 1;
                t.exp[(order - t.log[*a as usize] as usize) % order]
            }
        })
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn random(&self, rng: &mut SplitMix64) -> u32 {
        rng.below(self.inner.q0) as u32
    }
    fn order(&self) -> BigUint {
        BigUint::from(self.inner.q0)
    }
    fn validate(&self, a: &u32) -> Result<(), FieldError> {
        if (*a as u64) < self.inner.q0 {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }
}
