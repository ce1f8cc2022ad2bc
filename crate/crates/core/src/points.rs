//! Finite point sets, their domains of attraction and the nearest-point
//! quantizer.
//!
//! Distances are Euclidean in coefficient space. A sample equidistant from
//! several points belongs to the one with the lowest index.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::function_space::{check_dim, sq_dist, HilbertVector};
use crate::samples::SampleMatrix;

/// Distance below which two points count as collapsed.
pub const COLLAPSE_DISTANCE: f64 = 1e-10;

/// Ordered, non-empty set of `k` points of equal dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<HilbertVector>", into = "Vec<HilbertVector>")]
pub struct PointSet {
    points: Vec<HilbertVector>,
}

impl TryFrom<Vec<HilbertVector>> for PointSet {
    type Error = crate::Error;
    fn try_from(v: Vec<HilbertVector>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PointSet> for Vec<HilbertVector> {
    fn from(p: PointSet) -> Self {
        p.points
    }
}

impl PointSet {
    pub fn new(points: Vec<HilbertVector>) -> Result<Self> {
        let Some(first) = points.first() else {
            bail!(Usage, "a point set needs at least one point");
        };
        let d = first.dim();
        if d == 0 {
            bail!(Shape, "points must have dimension at least 1");
        }
        for (j, p) in points.iter().enumerate() {
            if p.dim() != d {
                bail!(Shape, "point {} has dimension {}, expected {}", j, p.dim(), d);
            }
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().cloned().map(HilbertVector::new).collect())
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[HilbertVector] {
        &self.points
    }

    pub fn point(&self, j: usize) -> &[f64] {
        self.points[j].coeffs()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.coeffs().to_vec()).collect()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.k() {
            for j in i + 1..self.k() {
                best = best.min(libm::sqrt(sq_dist(self.point(i), self.point(j))));
            }
        }
        best
    }

    /// Some pair of points closer than [`COLLAPSE_DISTANCE`].
    pub fn is_collapsed(&self) -> bool {
        self.min_pairwise_distance() < COLLAPSE_DISTANCE
    }

    /// Apply `f` to every point.
    pub fn map<F: FnMut(&[f64]) -> Vec<f64>>(&self, mut f: F) -> Result<Self> {
        Self::new(self.points.iter().map(|p| HilbertVector::new(f(p.coeffs()))).collect())
    }

    /// Largest coordinate displacement `max_j ||a_j - b_j||` between two sets
    /// of the same size.
    pub fn max_displacement(&self, other: &Self) -> Result<f64> {
        if self.k() != other.k() {
            bail!(Shape, "point sets have {} and {} points", self.k(), other.k());
        }
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| libm::sqrt(sq_dist(a.coeffs(), b.coeffs())))
            .fold(0.0, f64::max))
    }
}

/// Squared distance to the nearest point and its (lowest) index.
#[inline]
pub(crate) fn nearest(x: &[f64], points: &PointSet) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for (j, p) in points.points.iter().enumerate() {
        let d = sq_dist(x, p.coeffs());
        if d < best {
            best = d;
            idx = j;
        }
    }
    (best, idx)
}

/// `(min_j ||v - y_j||, argmin)` with ties to the lowest index (0-based).
pub fn min_distance(v: &[f64], points: &PointSet) -> Result<(f64, usize)> {
    check_dim(points.dim(), v.len())?;
    let (d2, j) = nearest(v, points);
    Ok((libm::sqrt(d2), j))
}

/// Domain-of-attraction labels of every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractionAssignment {
    /// 0-based index of the attracting point of each sample.
    pub labels: Vec<usize>,
    pub counts: Vec<usize>,
    /// `sum_j d^2(x_j, W)`.
    pub sum_sq: f64,
}

impl AttractionAssignment {
    pub fn mse(&self) -> f64 {
        self.sum_sq / self.labels.len().max(1) as f64
    }
}

fn check_samples(samples: &SampleMatrix, points: &PointSet) -> Result<()> {
    if samples.d() != points.dim() {
        bail!(Shape, "samples have dimension {}, points have {}", samples.d(), points.dim());
    }
    Ok(())
}

pub fn assign(samples: &SampleMatrix, points: &PointSet) -> Result<AttractionAssignment> {
    check_samples(samples, points)?;
    let mut labels = Vec::with_capacity(samples.n());
    let mut counts = vec![0; points.k()];
    let mut sum_sq = 0.0;
    for r in samples.rows() {
        let (d2, j) = nearest(r, points);
        labels.push(j);
        counts[j] += 1;
        sum_sq += d2;
    }
    Ok(AttractionAssignment { labels, counts, sum_sq })
}

/// Mean over samples of `d^2(x, W)`: the empirical `E d^2(V, W)`.
pub fn empirical_mse(samples: &SampleMatrix, points: &PointSet) -> Result<f64> {
    Ok(assign(samples, points)?.mse())
}

/// Mean of the samples attracted by each point, `None` for empty domains.
pub fn domain_means(samples: &SampleMatrix, assignment: &AttractionAssignment) -> Vec<Option<Vec<f64>>> {
    let d = samples.d();
    let k = assignment.counts.len();
    let mut sums = vec![0.0; k * d];
    for (r, &j) in samples.rows().zip(&assignment.labels) {
        for (s, x) in sums[j * d..(j + 1) * d].iter_mut().zip(r) {
            *s += x;
        }
    }
    (0..k)
        .map(|j| {
            let c = assignment.counts[j];
            (c > 0).then(|| sums[j * d..(j + 1) * d].iter().map(|s| s / c as f64).collect())
        })
        .collect()
}

/// Outcome of a self-consistency evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfConsistency {
    /// `max_j ||mean(D_j) - y_j||`; `+inf` when a domain is empty.
    pub residual: f64,
    /// 0-based indices of points with empty domains.
    pub empty_domains: Vec<usize>,
    pub domain_means: Vec<Option<Vec<f64>>>,
}

pub fn self_consistency(samples: &SampleMatrix, points: &PointSet) -> Result<SelfConsistency> {
    let a = assign(samples, points)?;
    let means = domain_means(samples, &a);
    let mut residual: f64 = 0.0;
    let mut empty = Vec::new();
    for (j, m) in means.iter().enumerate() {
        match m {
            Some(m) => residual = residual.max(libm::sqrt(sq_dist(m, points.point(j)))),
            None => empty.push(j),
        }
    }
    if !empty.is_empty() {
        residual = f64::INFINITY;
    }
    Ok(SelfConsistency { residual, empty_domains: empty, domain_means: means })
}

/// `max_j ||E(V | V in D_j) - y_j||` over the empirical law; `+inf` flags an
/// empty domain.
pub fn self_consistency_residual(samples: &SampleMatrix, points: &PointSet) -> Result<f64> {
    Ok(self_consistency(samples, points)?.residual)
}

/// The quantized sample: row `j` is the point attracting sample `j`.
pub fn quantizer_variable(samples: &SampleMatrix, points: &PointSet) -> Result<SampleMatrix> {
    let a = assign(samples, points)?;
    let mut out = SampleMatrix::zeros(samples.n(), samples.d());
    for (j, &l) in a.labels.iter().enumerate() {
        out.row_mut(j).copy_from_slice(points.point(l));
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn min_distance_examples() {
        let w = set(&[&[1.0, 2.0]]);
        assert_eq!(min_distance(&[1.0, 2.0], &w).unwrap(), (0.0, 0));
        let w = set(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(min_distance(&[0.0, 0.0], &w).unwrap(), (1.0, 0));
        assert_eq!(min_distance(&[3.0, 0.0], &w).unwrap(), (2.0, 0));
        assert!(min_distance(&[3.0], &w).is_err());
    }

    #[test]
    fn empty_point_set_is_rejected() {
        assert!(matches!(PointSet::new(Vec::new()), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn boundary_goes_to_lowest_index() {
        let w = set(&[&[0.0, 1.0], &[0.0, -1.0], &[2.0, 0.0]]);
        let s = SampleMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.5], [0.0, 0.9]]).unwrap();
        let a = assign(&s, &w).unwrap();
        assert_eq!(a.labels, vec![0, 0, 0]);
        assert_eq!(a.counts, vec![3, 0, 0]);
    }

    #[test]
    fn single_point_labels_and_mse() {
        let s = SampleMatrix::from_rows(&[[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]]).unwrap();
        let mean = s.mean();
        let w = PointSet::new(vec![HilbertVector::new(mean)]).unwrap();
        let a = assign(&s, &w).unwrap();
        assert!(a.labels.iter().all(|l| *l == 0));
        let est = crate::covariance::estimate(&s).unwrap();
        assert!((empirical_mse(&s, &w).unwrap() - est.trace()).abs() < 1e-14);
        assert_eq!(self_consistency_residual(&s, &w).unwrap(), 0.0);
    }

    #[test]
    fn samples_on_a_point_have_zero_mse() {
        let s = SampleMatrix::from_rows(&[[1.0, 1.0]; 5]).unwrap();
        let w = set(&[&[1.0, 1.0], &[7.0, 0.0]]);
        assert_eq!(empirical_mse(&s, &w).unwrap(), 0.0);
    }

    #[test]
    fn empty_domain_is_flagged_infinite() {
        let s = SampleMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let w = set(&[&[1.5], &[100.0]]);
        let sc = self_consistency(&s, &w).unwrap();
        assert!(sc.residual.is_infinite());
        assert_eq!(sc.empty_domains, vec![1]);
    }

    #[test]
    fn shifted_set_residual_on_symmetric_data() {
        // symmetric data at +-1 along the first axis; {-1, 1} is self-consistent
        let s = SampleMatrix::from_rows(&[[-1.0, 0.5], [-1.0, -0.5], [1.0, 0.5], [1.0, -0.5]]).unwrap();
        let good = set(&[&[-1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(self_consistency_residual(&s, &good).unwrap(), 0.0);
        let delta = 0.3;
        let shifted = set(&[&[-1.0 + delta, 0.0], &[1.0, 0.0]]);
        assert!(self_consistency_residual(&s, &shifted).unwrap() >= delta / 2.0);
    }

    #[test]
    fn quantizer_rows_are_nearest_points() {
        let s = SampleMatrix::from_rows(&[[0.1, 0.0], [-3.0, 1.0], [2.0, 2.0]]).unwrap();
        let w = set(&[&[0.0, 0.0], &[-2.0, 0.0], &[2.0, 1.0]]);
        let q = quantizer_variable(&s, &w).unwrap();
        assert_eq!(q.row(0), &[0.0, 0.0]);
        assert_eq!(q.row(1), &[-2.0, 0.0]);
        assert_eq!(q.row(2), &[2.0, 1.0]);
        let k1 = set(&[&[5.0, 5.0]]);
        let q1 = quantizer_variable(&s, &k1).unwrap();
        assert!(q1.rows().all(|r| r == [5.0, 5.0]));
    }
}
