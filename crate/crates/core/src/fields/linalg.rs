//! Exact Gaussian elimination over any [`Field`], pivoting on the first
//! nonzero entry of each column.

use alloc::vec::Vec;

use super::{Field, FieldError};
use crate::matrix::Mat;

/// Row-reduces `m` in place to row echelon form and returns the pivot columns.
fn echelon<F: Field>(f: &F, m: &mut Mat<F::Elem>) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(m.get(i, c))) else {
            continue;
        };
        m.swap_rows(r, pr);
        let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
        for k in c..cols {
            let v = f.mul(m.get(r, k), &inv);
            m.set(r, k, v);
        }
        for i in 0..rows {
            if i == r || f.is_zero(m.get(i, c)) {
                continue;
            }
            let factor = m.get(i, c).clone();
            for k in c..cols {
                let v = f.sub(m.get(i, k), &f.mul(&factor, m.get(r, k)));
                m.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
    let mut work = m.clone();
    echelon(f, &mut work).len()
}

/// Solves `m · x = b` for square, nonsingular `m`.
pub fn solve<F: Field>(f: &F, m: &Mat<F::Elem>, b: &[F::Elem]) -> Result<Vec<F::Elem>, FieldError> {
    let n = m.rows();
    if m.cols() != n || b.len() != n {
        return Err(FieldError::DimMismatch);
    }
    let mut aug = Mat::from_fn(n, n + 1, |i, j| if j < n { m.get(i, j).clone() } else { b[i].clone() });
    let pivots = echelon(f, &mut aug);
    if pivots.len() < n || pivots.last() == Some(&n) {
        return Err(FieldError::Singular);
    }
    Ok((0..n).map(|i| aug.get(i, n).clone()).collect())
}

/// Inverse of a square, nonsingular matrix.
pub fn inverse<F: Field>(f: &F, m: &Mat<F::Elem>) -> Result<Mat<F::Elem>, FieldError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(FieldError::DimMismatch);
    }
    let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            f.one()
        } else {
            f.zero()
        }
    });
    let pivots = echelon(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(FieldError::Singular);
    }
    Ok(Mat::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
}
