use alloc::vec::Vec;

use super::SchemeError;
use crate::fields::{trace_dual_basis, BaseField, Field, FieldError, TowerElem, TowerField};
use crate::poly::{annihilator, lagrange_coefficients, EvalDomain, Poly};

/// Matrix dimensions: `A` is `a × b`, `B` is `b × c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        Self { a, b, c }
    }
}

/// Every precomputed quantity of one FTP code instance.
#[derive(Debug, Clone)]
pub struct SchemeParams {
    pub(crate) t: usize,
    pub(crate) dims: Dims,
    pub(crate) tower: TowerField,
    pub(crate) group_sizes: Vec<usize>,
    pub(crate) domain: EvalDomain<TowerElem>,
    /// `α_{L+j}` as `F_{q0}` scalars.
    pub(crate) eval_scalars: Vec<u32>,
    pub(crate) annihilators: Vec<Poly<TowerElem>>,
    pub(crate) lambda: Vec<Vec<TowerElem>>,
    pub(crate) mu: Vec<Vec<TowerElem>>,
    /// `share_coeffs[j][m] = f_m(α_{L+j})` for the Lagrange basis on `α_1..α_{L+T}`.
    pub(crate) share_coeffs: Vec<Vec<TowerElem>>,
    /// `server_weights[j][i] = v_{L+j} k_i(α_{L+j})` for every group with `j < N_i`.
    pub(crate) server_weights: Vec<Vec<(usize, TowerElem)>>,
}

/// Builds an FTP code with `L = primes.len()` groups and security `t`.
///
/// The evaluation domain is `Ω = (α_1, …, α_L, e_0, …, e_{N_L − 1})` where
/// `α_i` are the tower generators and `e_k` is the `F_{q0}` element of index `k`.
pub fn build_scheme(
    l: usize,
    t: usize,
    primes: &[usize],
    base: BaseField,
    dims: Dims,
) -> Result<SchemeParams, SchemeError> {
    if l == 0 || t == 0 {
        return Err(SchemeError::InvalidParams("L and T must be positive"));
    }
    if dims.a == 0 || dims.b == 0 || dims.c == 0 {
        return Err(SchemeError::InvalidParams("matrix dimensions must be positive"));
    }
    if primes.len() != l {
        return Err(SchemeError::PrimesInvalid { l });
    }
    if !dims.b.is_multiple_of(l) {
        return Err(SchemeError::NotDivisible { b: dims.b, l });
    }
    let group_sizes: Vec<usize> = primes.iter().map(|p| p + 2 * l + 2 * t - 2).collect();
    let servers = *group_sizes.last().unwrap();
    if base.size() < servers as u64 {
        return Err(SchemeError::TooFewEvalPoints { q0: base.size(), needed: servers });
    }
    let tower = match TowerField::new(base, primes) {
        Ok(t) => t,
        Err(FieldError::PrimesNotAscendingDistinct) => return Err(SchemeError::PrimesInvalid { l }),
        Err(e) => return Err(e.into()),
    };

    let eval_scalars: Vec<u32> = (0..servers as u64).map(|k| tower.base().elem(k)).collect();
    let mut points = (0..l).map(|i| tower.generator(i)).collect::<Result<Vec<_>, _>>()?;
    points.extend(eval_scalars.iter().map(|&c| tower.embed(c)));
    let domain = EvalDomain::new(&tower, points)?;
    let pts = domain.points();

    // k_i annihilates Ω minus {α_i} minus the N_i points of group i's servers.
    let annihilators: Vec<Poly<TowerElem>> = (0..l)
        .map(|i| {
            let roots: Vec<TowerElem> = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i && !(l..l + group_sizes[i]).contains(j))
                .map(|(_, p)| p.clone())
                .collect();
            annihilator(&tower, &roots)
        })
        .collect();

    let mut lambda = Vec::with_capacity(l);
    let mut mu = Vec::with_capacity(l);
    for i in 0..l {
        let lead = tower.mul(&domain.weights()[i], &annihilators[i].eval_unchecked(&tower, &pts[i]));
        let mut basis = Vec::with_capacity(primes[i]);
        let mut cur = lead;
        for _ in 0..primes[i] {
            basis.push(cur.clone());
            cur = tower.mul(&cur, &pts[i]);
        }
        mu.push(trace_dual_basis(&tower, &basis, i)?);
        lambda.push(basis);
    }

    let nodes = &pts[..l + t];
    let share_coeffs =
        (0..servers).map(|j| lagrange_coefficients(&tower, nodes, &pts[l + j])).collect::<Result<Vec<_>, _>>()?;

    let server_weights = (0..servers)
        .map(|j| {
            let x = &pts[l + j];
            (0..l)
                .filter(|&i| j < group_sizes[i])
                .map(|i| {
                    let w = tower.mul(&domain.weights()[l + j], &annihilators[i].eval_unchecked(&tower, x));
                    (i, w)
                })
                .collect()
        })
        .collect();

    Ok(SchemeParams {
        t,
        dims,
        tower,
        group_sizes,
        domain,
        eval_scalars,
        annihilators,
        lambda,
        mu,
        share_coeffs,
        server_weights,
    })
}

impl SchemeParams {
    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    /// Number of groups `L`.
    pub fn groups(&self) -> usize {
        self.tower.groups()
    }

    /// Security parameter `T`.
    pub fn security(&self) -> usize {
        self.t
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn primes(&self) -> &[usize] {
        self.tower.primes()
    }

    /// `N_i = p_i + 2L + 2T − 2`.
    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Number of servers `N_L`.
    pub fn servers(&self) -> usize {
        *self.group_sizes.last().unwrap()
    }

    /// `n = N_L + L`.
    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &EvalDomain<TowerElem> {
        &self.domain
    }

    /// Evaluation point of server `j` as an `F_{q0}` element.
    pub fn eval_scalar(&self, j: usize) -> u32 {
        self.eval_scalars[j]
    }

    /// Annihilator `k_i`.
    pub fn annihilator(&self, i: usize) -> &Poly<TowerElem> {
        &self.annihilators[i]
    }

    /// `λ_{s,i} = v_i k_i(α_i) α_i^s`.
    pub fn lambda_basis(&self, i: usize) -> &[TowerElem] {
        &self.lambda[i]
    }

    /// Trace-dual basis of [`Self::lambda_basis`] over `F_i`.
    pub fn mu_basis(&self, i: usize) -> &[TowerElem] {
        &self.mu[i]
    }

    /// Groups answered by server `j`, with the scalar `v_{L+j} k_i(α_{L+j})` for each.
    pub fn server_weights(&self, j: usize) -> &[(usize, TowerElem)] {
        &self.server_weights[j]
    }

    /// `f_m(α_{L+j})` for `m ∈ 0..L+T`.
    pub fn share_coefficients(&self, j: usize) -> &[TowerElem] {
        &self.share_coeffs[j]
    }

    /// Block width `b / L`.
    pub fn block_width(&self) -> usize {
        self.dims.b / self.groups()
    }
}
