//! Thin bridge between the dense `ndarray` operator layer and faer's
//! factorizations. `faer::c64` is `num_complex::Complex64`, so conversions
//! are plain copies.

use crate::error::{Error, Result};
use crate::hilbert::{Operator, C64};
use faer::Mat;

pub(crate) fn to_faer(a: &Operator) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(a: &Operator) -> Result<Vec<f64>> {
    let evd = to_faer(a)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::SolverFailure(format!("self-adjoint eigen: {e:?}")))?;
    let s = evd.S();
    let v = s.column_vector();
    Ok((0..v.nrows()).map(|i| v[i].re).collect())
}

/// Singular values, descending (faer's order).
pub(crate) fn singular_values(a: &Operator) -> Result<Vec<f64>> {
    let svd = to_faer(a)
        .svd()
        .map_err(|e| Error::SolverFailure(format!("svd: {e:?}")))?;
    let s = svd.S();
    let v = s.column_vector();
    Ok((0..v.nrows()).map(|i| v[i].re).collect())
}

/// Full SVD A = U diag(s) V†, s descending.
pub(crate) fn svd_full(a: &Operator) -> Result<(Mat<C64>, Vec<f64>, Mat<C64>)> {
    let svd = to_faer(a)
        .svd()
        .map_err(|e| Error::SolverFailure(format!("svd: {e:?}")))?;
    let sv = svd.S();
    let v = sv.column_vector();
    let s = (0..v.nrows()).map(|i| v[i].re).collect();
    Ok((svd.U().to_owned(), s, svd.V().to_owned()))
}
