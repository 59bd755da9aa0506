//! Dense row-major matrices over a [`Field`] and the inner-product partitioning
//! `A = [A_1 ⋯ A_L]`, `Bᵀ = [B_1ᵀ ⋯ B_Lᵀ]`, so that `AB = Σ_ℓ A_ℓ B_ℓ`.

use alloc::vec::Vec;

use crate::fields::Field;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(&'static str),
    #[error("inner dimension {b} is not divisible by {l}")]
    NotDivisible { b: usize, l: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimMismatch("data length"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros<F: Field<Elem = E>>(field: &F, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| field.zero())
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { field.one() } else { field.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn map<T>(&self, f: impl FnMut(&E) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Columns `start..start+width`.
    pub fn column_block(&self, start: usize, width: usize) -> Self {
        Self::from_fn(self.rows, width, |r, c| self.get(r, start + c).clone())
    }

    /// Rows `start..start+height`.
    pub fn row_block(&self, start: usize, height: usize) -> Self {
        Self::from_fn(height, self.cols, |r, c| self.get(start + r, c).clone())
    }
}

pub fn mat_mul<F: Field>(field: &F, x: &Mat<F::Elem>, y: &Mat<F::Elem>) -> Result<Mat<F::Elem>, MatrixError> {
    if x.cols != y.rows {
        return Err(MatrixError::DimMismatch("inner dimensions"));
    }
    Ok(Mat::from_fn(x.rows, y.cols, |r, c| {
        (0..x.cols).fold(field.zero(), |acc, k| field.add(&acc, &field.mul(x.get(r, k), y.get(k, c))))
    }))
}

pub fn mat_add<F: Field>(field: &F, x: &Mat<F::Elem>, y: &Mat<F::Elem>) -> Result<Mat<F::Elem>, MatrixError> {
    if x.shape() != y.shape() {
        return Err(MatrixError::DimMismatch("shapes differ"));
    }
    Ok(Mat { rows: x.rows, cols: x.cols, data: x.data.iter().zip(&y.data).map(|(a, b)| field.add(a, b)).collect() })
}

pub fn mat_sub<F: Field>(field: &F, x: &Mat<F::Elem>, y: &Mat<F::Elem>) -> Result<Mat<F::Elem>, MatrixError> {
    if x.shape() != y.shape() {
        return Err(MatrixError::DimMismatch("shapes differ"));
    }
    Ok(Mat { rows: x.rows, cols: x.cols, data: x.data.iter().zip(&y.data).map(|(a, b)| field.sub(a, b)).collect() })
}

pub fn mat_scale<F: Field>(field: &F, c: &F::Elem, x: &Mat<F::Elem>) -> Mat<F::Elem> {
    x.map(|v| field.mul(c, v))
}

/// `Σ_k coeffs[k] · mats[k]`; all matrices share one shape.
pub fn linear_combination<F: Field>(
    field: &F,
    coeffs: &[F::Elem],
    mats: &[&Mat<F::Elem>],
) -> Result<Mat<F::Elem>, MatrixError> {
    let first = mats.first().ok_or(MatrixError::DimMismatch("empty combination"))?;
    if coeffs.len() != mats.len() || mats.iter().any(|m| m.shape() != first.shape()) {
        return Err(MatrixError::DimMismatch("combination shapes"));
    }
    let mut out = Mat::zeros(field, first.rows, first.cols);
    for (c, m) in coeffs.iter().zip(mats) {
        if field.is_zero(c) {
            continue;
        }
        for (o, v) in out.data.iter_mut().zip(&m.data) {
            *o = field.add(o, &field.mul(c, v));
        }
    }
    Ok(out)
}

/// Entrywise uniform random matrix; entries are drawn in row-major order.
pub fn random_mat<F: Field>(field: &F, rows: usize, cols: usize, rng: &mut SplitMix64) -> Mat<F::Elem> {
    Mat::from_fn(rows, cols, |_, _| field.random(rng))
}

/// Inner-product partition of a pair `(A, B)` into `L` block pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition<E> {
    pub a_blocks: Vec<Mat<E>>,
    pub b_blocks: Vec<Mat<E>>,
}

impl<E: Clone> Partition<E> {
    pub fn len(&self) -> usize {
        self.a_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_blocks.is_empty()
    }

    /// Concatenates the blocks back into `(A, B)`.
    pub fn reassemble(&self) -> (Mat<E>, Mat<E>) {
        let w = self.a_blocks[0].cols;
        let a_rows = self.a_blocks[0].rows;
        let c = self.b_blocks[0].cols;
        let l = self.len();
        let a = Mat::from_fn(a_rows, w * l, |r, col| self.a_blocks[col / w].get(r, col % w).clone());
        let b = Mat::from_fn(w * l, c, |r, col| self.b_blocks[r / w].get(r % w, col).clone());
        (a, b)
    }
}

pub fn partition_inner<E: Clone>(a: &Mat<E>, b: &Mat<E>, l: usize) -> Result<Partition<E>, MatrixError> {
    if a.cols != b.rows {
        return Err(MatrixError::DimMismatch("inner dimensions"));
    }
    if l == 0 || !a.cols.is_multiple_of(l) {
        return Err(MatrixError::NotDivisible { b: a.cols, l });
    }
    let w = a.cols / l;
    Ok(Partition {
        a_blocks: (0..l).map(|k| a.column_block(k * w, w)).collect(),
        b_blocks: (0..l).map(|k| b.row_block(k * w, w)).collect(),
    })
}
