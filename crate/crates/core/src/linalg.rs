//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, XtalError};

const EIGEN_MAX_ITER: usize = 10_000;

/// Classical Gram–Schmidt with one full re-orthogonalization pass (CGS2).
///
/// Returns `(q, r)` with `a = q * r`, `q` having orthonormal columns and `r`
/// upper triangular with positive diagonal. Columns are assumed linearly
/// independent; callers check rank beforehand.
pub fn gram_schmidt(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (rows, cols) = a.shape();
    let mut q = DMatrix::<f64>::zeros(rows, cols);
    let mut r = DMatrix::<f64>::zeros(cols, cols);
    for j in 0..cols {
        let mut w: DVector<f64> = a.column(j).into_owned();
        for _pass in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let h = qi.dot(&w);
                w.axpy(-h, &qi, 1.0);
                r[(i, j)] += h;
            }
        }
        let norm = w.norm();
        r[(j, j)] = norm;
        q.set_column(j, &(w / norm));
    }
    (q, r)
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let size = m.nrows();
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(XtalError::Eigensolver { size })?;
    sorted_finite(eig.eigenvalues.iter().copied(), size)
}

/// Ascending eigenvalues of a complex Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let size = m.nrows();
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(XtalError::Eigensolver { size })?;
    sorted_finite(eig.eigenvalues.iter().copied(), size)
}

fn sorted_finite(vals: impl Iterator<Item = f64>, size: usize) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = vals.collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(XtalError::Eigensolver { size });
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_complex(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Row-major nested vectors, the serialization layout for matrices.
pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || cols == 0 {
        return Err(XtalError::input(field, "empty matrix"));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(XtalError::input(
            format!("{field}[{bad}]"),
            format!("expected {cols} entries, got {}", rows[bad].len()),
        ));
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}
