//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

/// Symmetric eigendecomposition, eigenvalues descending, each eigenvector
/// signed so that its first entry with `|x| > 1e-12` is positive.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let sign = col.iter().find(|x| x.abs() > 1e-12).map_or(1.0, |x| x.signum());
        for r in 0..n {
            vecs[(r, dst)] = sign * col[r];
        }
    }
    (vals, vecs)
}

/// Inverse of a symmetric positive definite matrix through its
/// eigendecomposition. Eigenvalues below `rel_cutoff * lambda_max` are treated
/// as singular and reported instead of pseudo-inverted.
pub fn sym_inverse(m: &DMatrix<f64>, rel_cutoff: f64) -> core::result::Result<DMatrix<f64>, String> {
    let (vals, vecs) = sym_eigen_desc(m);
    let top = vals.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(format!("largest eigenvalue is {top:e}"));
    }
    let bottom = *vals.last().unwrap();
    if bottom < rel_cutoff * top {
        return Err(format!(
            "smallest eigenvalue {bottom:e} is below {rel_cutoff:e} x largest eigenvalue {top:e}"
        ));
    }
    let n = m.nrows();
    Ok(DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| vecs[(i, k)] * vecs[(j, k)] / vals[k]).sum()))
}

/// Singular values sorted descending, with the matching left singular vectors.
pub fn left_singular(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (Vec::new(), DMatrix::zeros(rows, 0));
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let vals = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs = DMatrix::from_fn(rows, order.len(), |r, c| u[(r, order[c])]);
    (vals, vecs)
}

/// Orthonormal basis (as columns) of the column span of `m`, keeping singular
/// directions above `rel_cutoff * sigma_max`. Returns the basis and all
/// singular values.
pub fn column_span(m: &DMatrix<f64>, rel_cutoff: f64) -> (DMatrix<f64>, Vec<f64>) {
    let (vals, vecs) = left_singular(m);
    let top = vals.first().copied().unwrap_or(0.0);
    let r = if top > 0.0 { vals.iter().filter(|s| **s > rel_cutoff * top).count() } else { 0 };
    (vecs.columns(0, r).into_owned(), vals)
}

/// Numerical rank with cutoff `rel_cutoff * sigma_max`.
pub fn rank(m: &DMatrix<f64>, rel_cutoff: f64) -> usize {
    column_span(m, rel_cutoff).0.ncols()
}

pub fn orthonormality_deviation(cols: &DMatrix<f64>) -> f64 {
    let p = cols.ncols();
    if p == 0 {
        return 0.0;
    }
    (cols.transpose() * cols - DMatrix::<f64>::identity(p, p)).amax()
}
