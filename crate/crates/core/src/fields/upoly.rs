//! Dense univariate polynomial arithmetic used to find and check field moduli.
//! Coefficients are low degree first.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::Field;

pub(crate) fn trim<F: Field>(f: &F, p: &mut Vec<F::Elem>) {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
}

pub(crate) fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    let mut out = out;
    trim(f, &mut out);
    out
}

/// Remainder of `a` modulo a nonzero polynomial `m` (leading coefficient need not be 1).
pub(crate) fn rem<F: Field>(f: &F, a: &[F::Elem], m: &[F::Elem]) -> Vec<F::Elem> {
    let mut r = a.to_vec();
    trim(f, &mut r);
    let mut m = m.to_vec();
    trim(f, &mut m);
    let dm = m.len() - 1;
    let lead_inv = f.inv(&m[dm]).expect("nonzero modulus");
    while r.len() > dm {
        let top = r.len() - 1;
        let q = f.mul(r.last().unwrap(), &lead_inv);
        for (k, mk) in m.iter().enumerate() {
            let idx = top - dm + k;
            r[idx] = f.sub(&r[idx], &f.mul(&q, mk));
        }
        trim(f, &mut r);
    }
    r
}

pub(crate) fn mul_mod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Vec<F::Elem> {
    rem(f, &mul(f, a, b), m)
}

pub(crate) fn pow_mod<F: Field>(f: &F, a: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Vec<F::Elem> {
    let mut acc = rem(f, &[f.one()], m);
    for i in (0..e.bits()).rev() {
        acc = mul_mod(f, &acc, &acc, m);
        if e.bit(i) {
            acc = mul_mod(f, &acc, a, m);
        }
    }
    acc
}

pub(crate) fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let zero = f.zero();
    let mut out: Vec<F::Elem> = (0..n).map(|i| f.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero))).collect();
    trim(f, &mut out);
    out
}

pub(crate) fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(f, &mut x);
    trim(f, &mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    x
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic `m` of degree ≥ 1.
pub(crate) fn is_irreducible<F: Field>(f: &F, m: &[F::Elem]) -> bool {
    let n = m.len() - 1;
    if n == 1 {
        return true;
    }
    let q = f.order();
    let x = vec![f.zero(), f.one()];
    // frob[k] = x^{Q^k} mod m
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(rem(f, &x, m));
    for k in 1..=n {
        let next = pow_mod(f, &frob[k - 1], &q, m);
        frob.push(next);
    }
    if sub(f, &frob[n], &x).iter().any(|c| !f.is_zero(c)) {
        return false;
    }
    prime_factors(n).into_iter().all(|r| {
        let g = gcd(f, &sub(f, &frob[n / r], &x), m);
        g.len() == 1
    })
}
