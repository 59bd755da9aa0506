use alloc::vec;
use alloc::vec::Vec;

use super::{encode_with_randoms, SchemeError, SchemeParams};
use crate::fields::linalg::rank;
use crate::fields::{TowerElem, TowerField};
use crate::matrix::Mat;
use crate::poly::lagrange_coefficients;

const EXHAUSTIVE_LIMIT: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditMode {
    /// Full rank of the `T × T` randomness matrix for every `T`-subset.
    Rank,
    /// Exact uniformity of every `T`-subset of shares over all random draws.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetAudit {
    pub servers: Vec<usize>,
    pub passed: bool,
    /// Rank mode: rank of the `T × T` matrix.
    pub rank: Option<usize>,
    /// Exhaustive mode: smallest and largest frequency of any share tuple.
    pub frequency: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub t: usize,
    pub subsets: Vec<SubsetAudit>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.subsets.iter().all(|s| s.passed)
    }
}

pub fn security_audit(scheme: &SchemeParams, mode: AuditMode) -> Result<AuditReport, SchemeError> {
    match mode {
        AuditMode::Rank => {
            let l = scheme.groups();
            let pts = scheme.domain().points();
            rank_audit_points(scheme.tower(), &pts[..l + scheme.security()], &pts[l..], l)
        }
        AuditMode::Exhaustive => exhaustive_audit(scheme),
    }
}

/// Rank audit for interpolation `nodes` (the `L` data nodes followed by the `T`
/// random nodes) and arbitrary `eval_points`, which need not be distinct.
///
/// For servers `j_1..j_T` the matrix is `[f_{L+t}(eval_points[j_k])]`.
pub fn rank_audit_points(
    tower: &TowerField,
    nodes: &[TowerElem],
    eval_points: &[TowerElem],
    l: usize,
) -> Result<AuditReport, SchemeError> {
    if nodes.len() <= l {
        return Err(SchemeError::InvalidParams("need at least one random node"));
    }
    let t = nodes.len() - l;
    let coeffs = eval_points.iter().map(|x| lagrange_coefficients(tower, nodes, x)).collect::<Result<Vec<_>, _>>()?;
    let subsets = combinations(eval_points.len(), t)
        .into_iter()
        .map(|servers| {
            let m = Mat::from_fn(t, t, |row, col| coeffs[servers[col]][l + row].clone());
            let r = rank(tower, &m);
            SubsetAudit { servers, passed: r == t, rank: Some(r), frequency: None }
        })
        .collect();
    Ok(AuditReport { mode: AuditMode::Rank, t, subsets })
}

/// Fixes every entry of `A` and `B` to `α_1`, enumerates all `|F_q|^T` random
/// draws and counts each `T`-subset's share tuples, separately for `f` and `g`.
///
/// Requires `1 × 1` blocks (`a = c = 1`, `b = L`) and `|F_q|^T ≤ 2^16`.
pub fn exhaustive_audit(scheme: &SchemeParams) -> Result<AuditReport, SchemeError> {
    let tower = scheme.tower();
    let dims = scheme.dims();
    let t = scheme.security();
    if dims.a != 1 || dims.c != 1 || scheme.block_width() != 1 {
        return Err(SchemeError::TooLargeForExhaustive);
    }
    let q = (tower.base().size() as u128)
        .checked_pow(tower.degree() as u32)
        .filter(|&q| q <= EXHAUSTIVE_LIMIT)
        .ok_or(SchemeError::TooLargeForExhaustive)?;
    let draws =
        q.checked_pow(t as u32).filter(|&d| d <= EXHAUSTIVE_LIMIT).ok_or(SchemeError::TooLargeForExhaustive)? as usize;

    let alpha = tower.generator(0)?;
    let a = Mat::from_fn(1, dims.b, |_, _| alpha.clone());
    let b = Mat::from_fn(dims.b, 1, |_, _| alpha.clone());
    let subsets = combinations(scheme.servers(), t);
    let mut f_counts = vec![vec![0u64; draws]; subsets.len()];
    let mut g_counts = vec![vec![0u64; draws]; subsets.len()];

    for k in 0..draws {
        let mut rest = k as u128;
        let rs: Vec<Mat<TowerElem>> = (0..t)
            .map(|_| {
                let x = tower.element_from_index(rest % q);
                rest /= q;
                Mat::from_fn(1, 1, |_, _| x.clone())
            })
            .collect();
        let shares = encode_with_randoms(scheme, &a, &b, &rs, &rs)?;
        let idx = |m: &Mat<TowerElem>| tower.element_index(m.get(0, 0)).unwrap();
        for (s, servers) in subsets.iter().enumerate() {
            let key =
                |pick: &dyn Fn(usize) -> u128| servers.iter().rev().fold(0u128, |acc, &j| acc * q + pick(j)) as usize;
            f_counts[s][key(&|j| idx(&shares[j].f_eval))] += 1;
            g_counts[s][key(&|j| idx(&shares[j].g_eval))] += 1;
        }
    }

    let subsets = subsets
        .into_iter()
        .zip(f_counts.iter().zip(&g_counts))
        .map(|(servers, (fc, gc))| {
            let lo = fc.iter().chain(gc).copied().min().unwrap_or(0);
            let hi = fc.iter().chain(gc).copied().max().unwrap_or(0);
            SubsetAudit { servers, passed: lo == 1 && hi == 1, rank: None, frequency: Some((lo, hi)) }
        })
        .collect();
    Ok(AuditReport { mode: AuditMode::Exhaustive, t, subsets })
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&p| cur[p] != p + n - k) else {
            return out;
        };
        cur[pos] += 1;
        for p in pos + 1..k {
            cur[p] = cur[p - 1] + 1;
        }
    }
}
