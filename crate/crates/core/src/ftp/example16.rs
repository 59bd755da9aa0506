use alloc::vec::Vec;

use super::SchemeError;
use crate::fields::{BaseField, Field, TowerElem, TowerField};
use crate::matrix::{linear_combination, mat_add, mat_mul, mat_scale, mat_sub, random_mat, Mat};
use crate::poly::dual_weights;
use crate::rng::SplitMix64;

/// `(f(y_i), g(y_i))` for one server.
pub type SharePair = (Mat<TowerElem>, Mat<TowerElem>);

/// Server `i` scales by `α^{-F16_EXPONENTS[i]}` before tracing.
pub const F16_EXPONENTS: [u64; 4] = [1, 2, 8, 4];

/// Exponents `e` of the pinned evaluation points `y_i = α^e` (with `y_1 = 0`).
const POINT_EXPONENTS: [Option<u64>; 3] = [Some(5), Some(10), Some(15)];

/// The single-group, single-colluder code over `F_16 = F_4(α)`, `α⁴ + α + 1 = 0`,
/// with servers at `(0, α⁵, α¹⁰, α¹⁵)`.
///
/// Shares are `f(y) = A + R(y − α)` and `g(y) = B + S(y − α)`; server `i`
/// returns `tr(α^{-j_i} f(y_i) g(y_i))` with `tr(x) = x + x⁴`, and
/// `AB = α⁴(S_1 + S_2 + S_3 + S_4) + α⁵ S_2 + α¹⁰ S_3 + α¹⁵ S_4`.
#[derive(Debug, Clone)]
pub struct F16Example {
    tower: TowerField,
    alpha: TowerElem,
    points: Vec<TowerElem>,
}

impl Default for F16Example {
    fn default() -> Self {
        Self::new()
    }
}

impl F16Example {
    pub fn new() -> Self {
        let base = BaseField::new(2, 2).expect("F_4 exists");
        let tower = TowerField::new(base, &[2]).expect("F_16 exists");
        let alpha = tower.generator(0).expect("one axis");
        let mut points = Vec::with_capacity(4);
        points.push(tower.zero());
        for e in POINT_EXPONENTS.iter().flatten() {
            points.push(tower.pow(&alpha, *e));
        }
        Self { tower, alpha, points }
    }

    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    pub fn alpha(&self) -> &TowerElem {
        &self.alpha
    }

    /// `(y_1, y_2, y_3, y_4) = (0, α⁵, α¹⁰, α¹⁵)`.
    pub fn points(&self) -> &[TowerElem] {
        &self.points
    }

    /// `α^{-j_i}` for each server.
    pub fn server_scalars(&self) -> Vec<TowerElem> {
        let inv = self.tower.inv(&self.alpha).expect("α ≠ 0");
        F16_EXPONENTS.iter().map(|&e| self.tower.pow(&inv, e)).collect()
    }

    /// `v_{1+j} k_1(y_j)` from the general construction on `Ω = (α, y_1, …, y_4)`.
    ///
    /// Here `k_1 = 1` because every evaluation point belongs to the single group.
    pub fn domain_weights(&self) -> Result<Vec<TowerElem>, SchemeError> {
        let mut omega = Vec::with_capacity(5);
        omega.push(self.alpha.clone());
        omega.extend(self.points.iter().cloned());
        let v = dual_weights(&self.tower, &omega)?;
        Ok(v[1..].to_vec())
    }

    /// Shares `(f(y_i), g(y_i))` for the four servers.
    pub fn encode(
        &self,
        a: &Mat<TowerElem>,
        b: &Mat<TowerElem>,
        r: &Mat<TowerElem>,
        s: &Mat<TowerElem>,
    ) -> Result<Vec<SharePair>, SchemeError> {
        if a.shape() != r.shape() || b.shape() != s.shape() || a.cols() != b.rows() {
            return Err(SchemeError::DimMismatch("A, B, R, S shapes"));
        }
        let t = &self.tower;
        self.points
            .iter()
            .map(|y| {
                let shift = t.sub(y, &self.alpha);
                Ok((mat_add(t, a, &mat_scale(t, &shift, r))?, mat_add(t, b, &mat_scale(t, &shift, s))?))
            })
            .collect()
    }

    /// Server `i`'s answer `tr(α^{-j_i} f g)`, entrywise in `F_4`.
    pub fn respond(
        &self,
        server: usize,
        f: &Mat<TowerElem>,
        g: &Mat<TowerElem>,
    ) -> Result<Mat<TowerElem>, SchemeError> {
        let t = &self.tower;
        let scalar = &self.server_scalars()[server];
        let h = mat_mul(t, f, g)?;
        let data = h.data().iter().map(|x| t.trace(&t.mul(scalar, x), 0)).collect::<Result<Vec<_>, _>>()?;
        Ok(Mat::new(h.rows(), h.cols(), data)?)
    }

    /// `α⁴(S_1 + S_2 + S_3 + S_4) + α⁵ S_2 + α¹⁰ S_3 + α¹⁵ S_4`.
    pub fn decode(&self, answers: &[Mat<TowerElem>]) -> Result<Mat<TowerElem>, SchemeError> {
        if answers.len() != 4 {
            return Err(SchemeError::DimMismatch("need four answers"));
        }
        let t = &self.tower;
        let a4 = t.pow(&self.alpha, 4);
        let coeffs: Vec<TowerElem> = (0..4).map(|i| t.add(&a4, &self.points[i])).collect();
        let refs: Vec<&Mat<TowerElem>> = answers.iter().collect();
        Ok(linear_combination(t, &coeffs, &refs)?)
    }

    /// Draws `R`, then `S`, runs all four servers and decodes.
    pub fn run(
        &self,
        a: &Mat<TowerElem>,
        b: &Mat<TowerElem>,
        rng: &mut SplitMix64,
    ) -> Result<Mat<TowerElem>, SchemeError> {
        let r = random_mat(&self.tower, a.rows(), a.cols(), rng);
        let s = random_mat(&self.tower, b.rows(), b.cols(), rng);
        let shares = self.encode(a, b, &r, &s)?;
        let answers =
            shares.iter().enumerate().map(|(i, (f, g))| self.respond(i, f, g)).collect::<Result<Vec<_>, _>>()?;
        self.decode(&answers)
    }

    /// `AB` minus the decoded value; zero when the identity holds.
    pub fn residual(
        &self,
        a: &Mat<TowerElem>,
        b: &Mat<TowerElem>,
        rng: &mut SplitMix64,
    ) -> Result<Mat<TowerElem>, SchemeError> {
        let decoded = self.run(a, b, rng)?;
        Ok(mat_sub(&self.tower, &mat_mul(&self.tower, a, b)?, &decoded)?)
    }
}
