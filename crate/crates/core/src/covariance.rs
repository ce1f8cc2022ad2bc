//! Moment estimation in coefficient space and eigenanalysis of the
//! covariance operator.
//!
//! Covariances use the `1/n` normalization throughout.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::elliptical::EllipticalModel;
use crate::error::{bail, Result};
use crate::linalg;
use crate::samples::SampleMatrix;

const DEGENERATE_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub mean_hat: Vec<f64>,
    pub cov_hat: DMatrix<f64>,
    /// Descending, clipped at zero.
    pub eigvals: Vec<f64>,
    /// Eigenvectors as columns, in the order of `eigvals`.
    pub eigvecs: DMatrix<f64>,
    pub n: usize,
    /// Index pairs `(i, i + 1)` whose eigenvalue gap is below `1e-8 * lambda_1`;
    /// only the spans of such groups are meaningful.
    pub near_degenerate: Vec<(usize, usize)>,
}

/// Column means, `1/n` covariance and its eigendecomposition.
pub fn estimate(samples: &SampleMatrix) -> Result<CovarianceEstimate> {
    let n = samples.n();
    if n < 2 {
        return Err(crate::Error::InsufficientData { needed: 2, got: n });
    }
    let d = samples.d();
    let mean = samples.mean();
    let mut acc = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for r in samples.rows() {
        for (c, (x, m)) in centered.iter_mut().zip(r.iter().zip(&mean)) {
            *c = x - m;
        }
        for i in 0..d {
            let ci = centered[i];
            for j in i..d {
                acc[i * d + j] += ci * centered[j];
            }
        }
    }
    let nf = n as f64;
    let cov = DMatrix::from_fn(d, d, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        acc[a * d + b] / nf
    });
    let (mut eigvals, eigvecs) = linalg::sym_eigen_desc(&cov);
    // the estimate is PSD by construction; negatives are rounding noise
    eigvals.iter_mut().for_each(|l| *l = l.max(0.0));
    let top = eigvals[0];
    let near_degenerate = eigvals
        .windows(2)
        .enumerate()
        .filter(|(_, w)| top > 0.0 && w[0] - w[1] < DEGENERATE_GAP * top)
        .map(|(i, _)| (i, i + 1))
        .collect();
    Ok(CovarianceEstimate { mean_hat: mean, cov_hat: cov, eigvals, eigvecs, n, near_degenerate })
}

impl CovarianceEstimate {
    /// `k`-th eigenvector (0-based) as a plain vector.
    pub fn eigvec(&self, k: usize) -> Vec<f64> {
        self.eigvecs.column(k).iter().copied().collect()
    }

    pub fn trace(&self) -> f64 {
        self.cov_hat.trace()
    }
}

/// Principal angles between the column spans of `u` (`d x p`) and `w`
/// (`d x q`), ascending, `min(p, q)` of them.
///
/// Cosines come from the singular values of `U^T W`; angles below `pi/4` are
/// recomputed from the singular values of `(I - U U^T) W` to keep full
/// precision near zero.
pub fn principal_angles(u: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<Vec<f64>> {
    if u.nrows() != w.nrows() {
        bail!(Shape, "subspaces live in dimensions {} and {}", u.nrows(), w.nrows());
    }
    for (name, m) in [("U", u), ("W", w)] {
        let dev = linalg::orthonormality_deviation(m);
        if dev > 1e-8 {
            bail!(Shape, "columns of {} are not orthonormal (deviation {:e})", name, dev);
        }
    }
    let (big, small) = if u.ncols() >= w.ncols() { (u, w) } else { (w, u) };
    let q = small.ncols();
    if q == 0 {
        return Ok(Vec::new());
    }
    let cross = big.transpose() * small;
    let (cosines, _) = linalg::left_singular(&cross);
    let resid = small - big * &cross;
    let (mut sines, _) = linalg::left_singular(&resid);
    sines.reverse();
    let mut angles: Vec<f64> = (0..q)
        .map(|i| {
            let c = cosines.get(i).copied().unwrap_or(0.0).clamp(0.0, 1.0);
            let s = sines.get(i).copied().unwrap_or(0.0).clamp(0.0, 1.0);
            if c * c >= 0.5 {
                libm::asin(s)
            } else {
                libm::acos(c)
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Anything carrying a descending spectrum.
pub trait Spectrum {
    fn spectrum(&self) -> &[f64];
}

impl Spectrum for EllipticalModel {
    /// Eigenvalues of the shape operator.
    fn spectrum(&self) -> &[f64] {
        self.lambda()
    }
}

impl Spectrum for CovarianceEstimate {
    fn spectrum(&self) -> &[f64] {
        &self.eigvals
    }
}

impl Spectrum for [f64] {
    fn spectrum(&self) -> &[f64] {
        self
    }
}

impl Spectrum for Vec<f64> {
    fn spectrum(&self) -> &[f64] {
        self
    }
}

/// `sum_{i >= k} lambda_i` with 1-based `k` in `1..=d+1`. Beyond the
/// truncation level the tail is zero by construction.
pub fn trace_tail<S: Spectrum + ?Sized>(s: &S, k: usize) -> Result<f64> {
    let l = s.spectrum();
    if k == 0 || k > l.len() + 1 {
        bail!(Shape, "tail index {} outside 1..={}", k, l.len() + 1);
    }
    Ok(l[k - 1..].iter().sum())
}
