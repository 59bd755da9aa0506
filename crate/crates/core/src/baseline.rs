//! Executable comparison schemes that download full `F_q` evaluations.
//!
//! Both variants share one engine: `f(x) = Σ_ℓ A_ℓ x^{ℓ-1} + Σ_t R_t x^{L+t-1}`,
//! `g(x) = Σ_ℓ B_ℓ x^{L-ℓ} + Σ_t S_t x^{L+t-1}`, and `AB` is the coefficient
//! of `x^{L-1}` in `h = fg`. With `L = T = 1` this is `f'(x) = A + Rx`,
//! `g'(x) = B + Sx` on three servers, recovering `h(0) = AB`.

use alloc::vec::Vec;

use crate::fields::linalg::rank;
use crate::fields::Field;
use crate::ftp::CostReport;
use crate::matrix::{linear_combination, mat_mul, partition_inner, random_mat, Mat, MatrixError};
use crate::poly::{lagrange_basis, PolyError};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaselineError {
    #[error("invalid parameters for this variant: {0}")]
    BadVariantParams(&'static str),
    #[error("inner dimension {b} is not divisible by L = {l}")]
    NotDivisible { b: usize, l: usize },
    #[error("{needed} distinct nonzero evaluation points required, {got} given")]
    TooFewPoints { needed: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `L = T = 1` on three servers.
    Section3,
    /// Secure MatDot with recovery threshold `2L + 2T − 1`.
    MatDot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraditionalScheme<E> {
    variant: Variant,
    l: usize,
    t: usize,
    points: Vec<E>,
}

impl<E: Clone + PartialEq> TraditionalScheme<E> {
    /// Three-server scheme; uses the first three of `points`.
    pub fn section3<F: Field<Elem = E>>(field: &F, points: &[E]) -> Result<Self, BaselineError> {
        Self::build(field, Variant::Section3, 1, 1, points)
    }

    /// MatDot on the first `2L + 2T − 1` of `points`.
    pub fn matdot<F: Field<Elem = E>>(field: &F, l: usize, t: usize, points: &[E]) -> Result<Self, BaselineError> {
        if l == 0 || t == 0 {
            return Err(BaselineError::BadVariantParams("L and T must be positive"));
        }
        Self::build(field, Variant::MatDot, l, t, points)
    }

    fn build<F: Field<Elem = E>>(
        field: &F,
        variant: Variant,
        l: usize,
        t: usize,
        points: &[E],
    ) -> Result<Self, BaselineError> {
        let needed = 2 * l + 2 * t - 1;
        let mut chosen: Vec<E> = Vec::with_capacity(needed);
        for p in points {
            if chosen.len() == needed {
                break;
            }
            if field.is_zero(p) || chosen.contains(p) {
                return Err(BaselineError::BadVariantParams("points must be distinct and nonzero"));
            }
            chosen.push(p.clone());
        }
        if chosen.len() < needed {
            return Err(BaselineError::TooFewPoints { needed, got: chosen.len() });
        }
        Ok(Self { variant, l, t, points: chosen })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn groups(&self) -> usize {
        self.l
    }

    pub fn security(&self) -> usize {
        self.t
    }

    /// Number of servers `N′`.
    pub fn servers(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[E] {
        &self.points
    }

    /// Costs in symbols of the scheme's field.
    pub fn cost(&self, a: usize, b: usize, c: usize) -> CostReport {
        let n = self.servers() as u128;
        let (a, b, c, l) = (a as u128, b as u128, c as u128, self.l as u128);
        CostReport::new(n * (a * b / l + b * c / l), n * a * c, a * c)
    }

    /// Whether every `T`-subset of servers sees a full-rank randomness map
    /// `[β_{j_k}^{L+t-1}]`.
    pub fn randomness_full_rank<F: Field<Elem = E>>(&self, field: &F) -> bool {
        subsets(self.servers(), self.t).iter().all(|js| {
            let m = Mat::from_fn(self.t, self.t, |row, col| field.pow(&self.points[js[col]], (self.l + row) as u64));
            rank(field, &m) == self.t
        })
    }
}

/// Per-server upload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineShare<E> {
    pub f_eval: Mat<E>,
    pub g_eval: Mat<E>,
}

/// Evaluates `f` and `g` at every server point, drawing `R_1..R_T` then `S_1..S_T`.
pub fn baseline_encode<F: Field>(
    field: &F,
    scheme: &TraditionalScheme<F::Elem>,
    a: &Mat<F::Elem>,
    b: &Mat<F::Elem>,
    seed: u64,
) -> Result<Vec<BaselineShare<F::Elem>>, BaselineError> {
    let l = scheme.l;
    if a.cols() != b.rows() {
        return Err(MatrixError::DimMismatch("inner dimensions").into());
    }
    if a.cols() % l != 0 {
        return Err(BaselineError::NotDivisible { b: a.cols(), l });
    }
    let part = partition_inner(a, b, l)?;
    let w = a.cols() / l;
    let mut rng = SplitMix64::new(seed);
    let rs: Vec<_> = (0..scheme.t).map(|_| random_mat(field, a.rows(), w, &mut rng)).collect();
    let ss: Vec<_> = (0..scheme.t).map(|_| random_mat(field, w, b.cols(), &mut rng)).collect();
    // f terms in exponent order; g has the data blocks reversed
    let f_terms: Vec<&Mat<F::Elem>> = part.a_blocks.iter().chain(&rs).collect();
    let g_terms: Vec<&Mat<F::Elem>> = part.b_blocks.iter().rev().chain(&ss).collect();
    scheme
        .points
        .iter()
        .map(|x| {
            let powers: Vec<F::Elem> = (0..l + scheme.t).map(|k| field.pow(x, k as u64)).collect();
            Ok(BaselineShare {
                f_eval: linear_combination(field, &powers, &f_terms)?,
                g_eval: linear_combination(field, &powers, &g_terms)?,
            })
        })
        .collect()
}

/// Server step: `h(β_j) = f(β_j) g(β_j)`.
pub fn baseline_respond<F: Field>(field: &F, share: &BaselineShare<F::Elem>) -> Result<Mat<F::Elem>, BaselineError> {
    Ok(mat_mul(field, &share.f_eval, &share.g_eval)?)
}

/// Interpolates `h` from all `N′` answers and returns its `x^{L-1}` coefficient.
pub fn baseline_decode<F: Field>(
    field: &F,
    scheme: &TraditionalScheme<F::Elem>,
    answers: &[Mat<F::Elem>],
) -> Result<Mat<F::Elem>, BaselineError> {
    if answers.len() != scheme.servers() {
        return Err(BaselineError::TooFewPoints { needed: scheme.servers(), got: answers.len() });
    }
    let target = scheme.l - 1;
    let coeffs = (0..scheme.servers())
        .map(|j| {
            let basis = lagrange_basis(field, j, &scheme.points)?;
            Ok(basis.coeffs().get(target).cloned().unwrap_or_else(|| field.zero()))
        })
        .collect::<Result<Vec<_>, BaselineError>>()?;
    let refs: Vec<&Mat<F::Elem>> = answers.iter().collect();
    Ok(linear_combination(field, &coeffs, &refs)?)
}

fn run<F: Field>(
    field: &F,
    scheme: &TraditionalScheme<F::Elem>,
    a: &Mat<F::Elem>,
    b: &Mat<F::Elem>,
    seed: u64,
) -> Result<(Mat<F::Elem>, CostReport), BaselineError> {
    let shares = baseline_encode(field, scheme, a, b, seed)?;
    let answers = shares.iter().map(|s| baseline_respond(field, s)).collect::<Result<Vec<_>, _>>()?;
    let product = baseline_decode(field, scheme, &answers)?;
    Ok((product, scheme.cost(a.rows(), a.cols(), b.cols())))
}

/// Full cycle of a [`Variant::Section3`] scheme.
pub fn trad_run<F: Field>(
    field: &F,
    scheme: &TraditionalScheme<F::Elem>,
    a: &Mat<F::Elem>,
    b: &Mat<F::Elem>,
    seed: u64,
) -> Result<(Mat<F::Elem>, CostReport), BaselineError> {
    if scheme.variant != Variant::Section3 || scheme.l != 1 || scheme.t != 1 {
        return Err(BaselineError::BadVariantParams("the three-server scheme needs L = T = 1"));
    }
    run(field, scheme, a, b, seed)
}

/// Full MatDot cycle over the first `2L + 2T − 1` of `points`.
pub fn matdot_run<F: Field>(
    field: &F,
    l: usize,
    t: usize,
    points: &[F::Elem],
    a: &Mat<F::Elem>,
    b: &Mat<F::Elem>,
    seed: u64,
) -> Result<(Mat<F::Elem>, CostReport), BaselineError> {
    let scheme = TraditionalScheme::matdot(field, l, t, points)?;
    run(field, &scheme, a, b, seed)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return alloc::vec![Vec::new()];
    }
    (0..n)
        .flat_map(|first| {
            subsets(n, k - 1).into_iter().filter(move |rest| rest.first().is_none_or(|&r| r > first)).map(
                move |mut rest| {
                    rest.insert(0, first);
                    rest
                },
            )
        })
        .collect()
}
