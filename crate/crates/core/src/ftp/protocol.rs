use alloc::vec::Vec;

use super::{SchemeError, SchemeParams};
use crate::fields::{Field, TowerElem, TowerField};
use crate::matrix::{linear_combination, mat_add, mat_mul, partition_inner, random_mat, Mat};
use crate::rng::SplitMix64;

/// Upload to server `j`: `f(α_{L+j})` and `g(α_{L+j})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    pub server: usize,
    pub f_eval: Mat<TowerElem>,
    pub g_eval: Mat<TowerElem>,
}

/// One traced `a × c` matrix for group `i`; entries lie in `F_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupResponse {
    pub group: usize,
    pub traced: Mat<TowerElem>,
}

/// Download from server `j`: one [`GroupResponse`] per group `i` with `j < N_i`,
/// in increasing group order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseBundle {
    pub server: usize,
    pub groups: Vec<GroupResponse>,
}

/// What a single server needs to answer: its index and its per-group scalars.
#[derive(Debug, Clone)]
pub struct ServerContext {
    tower: TowerField,
    server: usize,
    weights: Vec<(usize, TowerElem)>,
}

impl ServerContext {
    pub fn from_scheme(scheme: &SchemeParams, server: usize) -> Self {
        Self { tower: scheme.tower.clone(), server, weights: scheme.server_weights[server].clone() }
    }

    /// `weights` pairs each answered group `i` with `v_{L+j} k_i(α_{L+j})`.
    pub fn new(tower: TowerField, server: usize, weights: Vec<(usize, TowerElem)>) -> Self {
        Self { tower, server, weights }
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn weights(&self) -> &[(usize, TowerElem)] {
        &self.weights
    }

    /// `tr_i(w_i · f(α_{L+j}) g(α_{L+j}))` entrywise, for each answered group `i`.
    pub fn respond(&self, share: &Share) -> Result<ResponseBundle, SchemeError> {
        let tower = &self.tower;
        let h = mat_mul(tower, &share.f_eval, &share.g_eval)?;
        let groups = self
            .weights
            .iter()
            .map(|(i, w)| {
                let i = *i;
                let data = h.data().iter().map(|x| tower.trace(&tower.mul(w, x), i)).collect::<Result<Vec<_>, _>>()?;
                Ok(GroupResponse { group: i, traced: Mat::new(h.rows(), h.cols(), data)? })
            })
            .collect::<Result<Vec<_>, SchemeError>>()?;
        Ok(ResponseBundle { server: self.server, groups })
    }
}

/// Encodes with `R_1..R_T` then `S_1..S_T` drawn uniformly from `seed`.
pub fn encode(
    scheme: &SchemeParams,
    a: &Mat<TowerElem>,
    b: &Mat<TowerElem>,
    seed: u64,
) -> Result<Vec<Share>, SchemeError> {
    let tower = &scheme.tower;
    let dims = scheme.dims;
    let w = scheme.block_width();
    let mut rng = SplitMix64::new(seed);
    let rs: Vec<_> = (0..scheme.t).map(|_| random_mat(tower, dims.a, w, &mut rng)).collect();
    let ss: Vec<_> = (0..scheme.t).map(|_| random_mat(tower, w, dims.c, &mut rng)).collect();
    encode_with_randoms(scheme, a, b, &rs, &ss)
}

/// Encodes with caller-supplied randomness: `f(α_i) = A_i`, `f(α_{L+t}) = R_t`,
/// `g(α_i) = B_i`, `g(α_{L+t}) = S_t`, both of degree `≤ L + T − 1`.
pub fn encode_with_randoms(
    scheme: &SchemeParams,
    a: &Mat<TowerElem>,
    b: &Mat<TowerElem>,
    rs: &[Mat<TowerElem>],
    ss: &[Mat<TowerElem>],
) -> Result<Vec<Share>, SchemeError> {
    let dims = scheme.dims;
    if a.shape() != (dims.a, dims.b) || b.shape() != (dims.b, dims.c) {
        return Err(SchemeError::DimMismatch("A or B does not match the scheme"));
    }
    let w = scheme.block_width();
    if rs.len() != scheme.t
        || ss.len() != scheme.t
        || rs.iter().any(|r| r.shape() != (dims.a, w))
        || ss.iter().any(|s| s.shape() != (w, dims.c))
    {
        return Err(SchemeError::DimMismatch("random blocks"));
    }
    let tower = &scheme.tower;
    for m in [a, b].into_iter().chain(rs).chain(ss) {
        for x in m.data() {
            tower.validate(x)?;
        }
    }
    let part = partition_inner(a, b, scheme.groups())?;
    let f_nodes: Vec<&Mat<TowerElem>> = part.a_blocks.iter().chain(rs).collect();
    let g_nodes: Vec<&Mat<TowerElem>> = part.b_blocks.iter().chain(ss).collect();
    (0..scheme.servers())
        .map(|j| {
            let coeffs = &scheme.share_coeffs[j];
            Ok(Share {
                server: j,
                f_eval: linear_combination(tower, coeffs, &f_nodes)?,
                g_eval: linear_combination(tower, coeffs, &g_nodes)?,
            })
        })
        .collect()
}

/// The server step for server `share.server`.
pub fn server_compute(scheme: &SchemeParams, share: &Share) -> Result<ResponseBundle, SchemeError> {
    if share.server >= scheme.servers() {
        return Err(SchemeError::ShapeMismatch("server index out of range"));
    }
    let dims = scheme.dims;
    let w = scheme.block_width();
    if share.f_eval.shape() != (dims.a, w) || share.g_eval.shape() != (w, dims.c) {
        return Err(SchemeError::ShapeMismatch("share shape"));
    }
    ServerContext::from_scheme(scheme, share.server).respond(share)
}

/// Recovers `AB` from the bundles of all `N_L` servers (any order).
pub fn decode(scheme: &SchemeParams, bundles: &[ResponseBundle]) -> Result<Mat<TowerElem>, SchemeError> {
    let tower = &scheme.tower;
    let base = tower.base();
    let (ra, rc) = (scheme.dims.a, scheme.dims.c);
    let servers = scheme.servers();

    let mut by_server: Vec<Option<&ResponseBundle>> = (0..servers).map(|_| None).collect();
    for bundle in bundles {
        let slot = by_server.get_mut(bundle.server).ok_or(SchemeError::ShapeMismatch("server index out of range"))?;
        *slot = Some(bundle);
    }
    let by_server = by_server
        .into_iter()
        .enumerate()
        .map(|(j, b)| b.ok_or(SchemeError::MissingBundle(j)))
        .collect::<Result<Vec<_>, _>>()?;
    for (j, bundle) in by_server.iter().enumerate() {
        let expected = scheme.server_weights[j].iter().map(|(i, _)| *i);
        if !bundle.groups.iter().map(|g| g.group).eq(expected)
            || bundle.groups.iter().any(|g| {
                g.traced.shape() != (ra, rc)
                    || g.traced.data().iter().any(|x| tower.validate(x).is_err() || !tower.in_subfield(x, g.group))
            })
        {
            return Err(SchemeError::ShapeMismatch("response bundle"));
        }
    }

    let mut out = Mat::zeros(tower, ra, rc);
    for i in 0..scheme.groups() {
        let n_i = scheme.group_sizes[i];
        let mu = &scheme.mu[i];
        let h_i = Mat::from_fn(ra, rc, |r, c| {
            let mut acc = tower.zero();
            // powers[j] = α_{L+j}^s, advanced once per s
            let mut powers: Vec<u32> = (0..n_i).map(|_| Field::one(base)).collect();
            for mu_s in mu {
                let mut c_is = tower.zero();
                for (j, pw) in powers.iter().enumerate() {
                    let r_ij = group_response(by_server[j], i).get(r, c);
                    c_is = tower.add(&c_is, &tower.scale(*pw, r_ij));
                }
                acc = tower.add(&acc, &tower.mul(&tower.neg(&c_is), mu_s));
                for (j, pw) in powers.iter_mut().enumerate() {
                    *pw = base.mul(pw, &scheme.eval_scalars[j]);
                }
            }
            acc
        });
        out = mat_add(tower, &out, &h_i)?;
    }
    Ok(out)
}

fn group_response(bundle: &ResponseBundle, i: usize) -> &Mat<TowerElem> {
    // validated in `decode`: every server below N_i carries group i
    &bundle.groups.iter().find(|g| g.group == i).unwrap().traced
}
