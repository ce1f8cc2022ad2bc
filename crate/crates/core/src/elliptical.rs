//! Elliptical random elements built as scale mixtures `V = mu + Z * V1`, with
//! `V1` a centered Gaussian element whose covariance operator is the shape
//! operator `Gamma`, and `Z > 0` independent of `V1`.
//!
//! The covariance operator of `V` is `E(Z^2) * Gamma`, every bounded linear
//! image of `V` is again elliptical with the same mixing law, and conditional
//! means across any orthogonal split are linear.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::function_space::{check_dim, HilbertVector, SubspaceSplit};
use crate::linalg;
use crate::rng;
use crate::samples::SampleMatrix;
use crate::univariate::UnivariateLaw;

/// Law of the scale variable `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleMixture {
    /// `Z = 1`.
    Gaussian,
    /// `Z = sqrt(nu / chi2_nu)`, giving multivariate Student-t marginals.
    StudentT { nu: f64 },
    /// `Z = z1` with probability `p`, else `z2`.
    TwoPoint { z1: f64, z2: f64, p: f64 },
}

impl ScaleMixture {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian => Ok(()),
            Self::StudentT { nu } => {
                if !(*nu > 2.0) || !nu.is_finite() {
                    bail!(Config, "student-t mixture needs 2 < nu < inf, got {}", nu);
                }
                Ok(())
            }
            Self::TwoPoint { z1, z2, p } => {
                if !(*z1 >= 0.0 && *z2 >= 0.0) || !z1.is_finite() || !z2.is_finite() {
                    bail!(Config, "two-point mixture values must be finite and non-negative");
                }
                if !(0.0..=1.0).contains(p) {
                    bail!(Config, "two-point mixture probability must lie in [0, 1], got {}", p);
                }
                Ok(())
            }
        }
    }

    /// `E(Z^2)`.
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Gaussian => 1.0,
            Self::StudentT { nu } => nu / (nu - 2.0),
            Self::TwoPoint { z1, z2, p } => p * z1 * z1 + (1.0 - p) * z2 * z2,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Gaussian => 1.0,
            Self::StudentT { nu } => {
                let c: f64 = ChiSquared::new(*nu).expect("validated dof").sample(rng);
                libm::sqrt(nu / c)
            }
            Self::TwoPoint { z1, z2, p } => {
                if rng.random::<f64>() < *p {
                    *z1
                } else {
                    *z2
                }
            }
        }
    }

    /// Law of `Z * xi` with `xi` standard normal and independent of `Z`.
    pub fn mixed_normal_law(&self) -> UnivariateLaw {
        match self {
            Self::Gaussian => UnivariateLaw::standard_normal(),
            Self::StudentT { nu } => UnivariateLaw::StudentT { nu: *nu, loc: 0.0, scale: 1.0 },
            Self::TwoPoint { z1, z2, p } => UnivariateLaw::NormalScaleMixture {
                loc: 0.0,
                weights: vec![*p, 1.0 - p],
                sds: vec![*z1, *z2],
            },
        }
    }

    /// Law of `Z * xi / sqrt(E Z^2)`: unit variance, shared by every
    /// standardized one-dimensional projection of the element.
    pub fn standardized_law(&self) -> Result<UnivariateLaw> {
        let m2 = self.second_moment();
        if !(m2 > 0.0) {
            bail!(DegenerateModel, "scale mixture has E(Z^2) = 0");
        }
        self.mixed_normal_law().scaled(1.0 / libm::sqrt(m2))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Gaussian => "gaussian".into(),
            Self::StudentT { nu } => format!("student_t(nu={nu})"),
            Self::TwoPoint { z1, z2, p } => format!("two_point(z1={z1},z2={z2},p={p})"),
        }
    }
}

/// Model file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub d: usize,
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mixture: ScaleMixture,
    #[serde(default)]
    pub seed: u64,
}

impl ModelSpec {
    pub fn build(&self) -> Result<EllipticalModel> {
        if self.mu.len() != self.d || self.lambda.len() != self.d {
            bail!(
                Config,
                "model has d = {} but mu has {} and lambda has {} entries",
                self.d,
                self.mu.len(),
                self.lambda.len()
            );
        }
        EllipticalModel::new(HilbertVector::new(self.mu.clone()), self.lambda.clone(), self.mixture.clone())
    }

    /// Short human-readable description used in report tables.
    pub fn label(&self) -> String {
        let lam: Vec<String> = self.lambda.iter().map(|l| format!("{l}")).collect();
        format!("{}[{}]", self.mixture.label(), lam.join(","))
    }
}

/// Elliptical element with mean `mu`, shape operator `diag(lambda)` in the model
/// basis (eigenvalues descending) and scale mixture `mixture`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalModel {
    mu: HilbertVector,
    lambda: Vec<f64>,
    mixture: ScaleMixture,
}

impl EllipticalModel {
    pub fn new(mu: HilbertVector, lambda: Vec<f64>, mixture: ScaleMixture) -> Result<Self> {
        if lambda.is_empty() {
            bail!(Config, "model dimension must be at least 1");
        }
        check_dim(lambda.len(), mu.dim()).map_err(|e| Error::Config(format!("{e}")))?;
        if mu.coeffs().iter().any(|m| !m.is_finite()) {
            bail!(Config, "mean coefficients must be finite");
        }
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            bail!(Config, "eigenvalues must be finite and non-negative");
        }
        if lambda.windows(2).any(|w| w[1] > w[0]) {
            bail!(Config, "eigenvalues must be sorted in descending order");
        }
        mixture.validate()?;
        Ok(Self { mu, lambda, mixture })
    }

    pub fn centered(lambda: Vec<f64>, mixture: ScaleMixture) -> Result<Self> {
        let d = lambda.len();
        Self::new(HilbertVector::zeros(d), lambda, mixture)
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn mu(&self) -> &HilbertVector {
        &self.mu
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mixture(&self) -> &ScaleMixture {
        &self.mixture
    }

    pub fn spec(&self, seed: u64) -> ModelSpec {
        ModelSpec {
            d: self.dim(),
            mu: self.mu.coeffs().to_vec(),
            lambda: self.lambda.clone(),
            mixture: self.mixture.clone(),
            seed,
        }
    }

    /// Same law with the mean moved to `mu`.
    pub fn with_mean(&self, mu: HilbertVector) -> Result<Self> {
        Self::new(mu, self.lambda.clone(), self.mixture.clone())
    }

    /// `n` draws; row `j` is `mu + Z_j * (sqrt(lambda_i) * xi_ji)_i`.
    ///
    /// Row `j` reads its scale from [`rng::scale_stream`] and its `d` normals
    /// from [`rng::gauss_stream`], so any subset of rows can be regenerated
    /// independently.
    pub fn sample(&self, n: usize, seed: u64) -> SampleMatrix {
        sample_rows(n, self.dim(), seed, &self.mixture, |xi, out| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = libm::sqrt(self.lambda[i]) * xi[i];
            }
        }, self.mu.coeffs())
    }

    /// Single row `j` of [`Self::sample`].
    pub fn sample_row(&self, seed: u64, row: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let mut xi = vec![0.0; self.dim()];
        fill_row(seed, row, &self.mixture, &mut xi, &mut out, |xi, o| {
            for (i, v) in o.iter_mut().enumerate() {
                *v = libm::sqrt(self.lambda[i]) * xi[i];
            }
        }, self.mu.coeffs());
        out
    }

    /// Eigenvalues of the covariance operator, `E(Z^2) * lambda`.
    pub fn covariance_eigenvalues(&self) -> Vec<f64> {
        let a = self.mixture.second_moment();
        self.lambda.iter().map(|l| a * l).collect()
    }

    /// `Gamma_V = E(Z^2) diag(lambda)`.
    pub fn covariance_operator(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.covariance_eigenvalues()))
    }

    /// `tr(Gamma_V)`.
    pub fn covariance_trace(&self) -> f64 {
        self.covariance_eigenvalues().iter().sum()
    }

    pub fn to_law(&self) -> EllipticalLaw {
        EllipticalLaw::new(
            self.mu.coeffs().to_vec(),
            DMatrix::from_diagonal(&DVector::from_vec(self.lambda.clone())),
            self.mixture.clone(),
        )
        .expect("model parameters are valid")
    }

    /// Image of the element under the linear map `a` (`p x d`): mean `A mu`,
    /// shape `A diag(lambda) A^T`, same mixing law.
    pub fn push_forward(&self, a: &DMatrix<f64>) -> Result<EllipticalLaw> {
        self.to_law().push_forward(a)
    }

    /// Image under `x -> Q x` for an orthogonal `Q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Result<EllipticalLaw> {
        self.push_forward(q)
    }

    /// `E(V2 | W1 = w1)` for the split `W1 = A1 V`, `V2 = A2 V`.
    pub fn conditional_mean(&self, split: &SubspaceSplit, w1: &[f64]) -> Result<Vec<f64>> {
        conditional_mean(self.mu.coeffs(), &self.covariance_operator(), split, w1)
    }

    /// Regression operator `Gamma_{V2,W1} Sigma_{W1}^{-1}` of the split.
    pub fn regression_operator(&self, split: &SubspaceSplit) -> Result<DMatrix<f64>> {
        regression_operator(&self.covariance_operator(), split)
    }

    /// Law of `<a, V - mu> / sqrt(<a, Gamma_V a>)`, which does not depend on `a`.
    pub fn standardized_projection(&self, a: &HilbertVector) -> Result<UnivariateLaw> {
        let var = self.projection_variance(a)?;
        if !(var > 0.0) {
            bail!(DegenerateDirection, "<a, Gamma_V a> = {} along the requested direction", var);
        }
        self.mixture.standardized_law()
    }

    /// Law of `<a, V - mu>`.
    pub fn projection_law(&self, a: &HilbertVector) -> Result<UnivariateLaw> {
        let var = self.projection_variance(a)?;
        self.standardized_projection(a)?.scaled(libm::sqrt(var))
    }

    /// `<a, Gamma_V a>`.
    pub fn projection_variance(&self, a: &HilbertVector) -> Result<f64> {
        check_dim(self.dim(), a.dim())?;
        let m2 = self.mixture.second_moment();
        Ok(a.coeffs().iter().zip(&self.lambda).map(|(x, l)| m2 * l * x * x).sum())
    }
}

/// Elliptical law in `R^p` with a general (not necessarily diagonal) shape
/// matrix. Produced by push-forwards and rotations of [`EllipticalModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalLaw {
    mean: Vec<f64>,
    shape: DMatrix<f64>,
    mixture: ScaleMixture,
    eigvals: Vec<f64>,
    eigvecs: DMatrix<f64>,
}

impl EllipticalLaw {
    pub fn new(mean: Vec<f64>, shape: DMatrix<f64>, mixture: ScaleMixture) -> Result<Self> {
        let p = mean.len();
        if shape.shape() != (p, p) {
            bail!(Shape, "shape matrix must be {}x{}, got {:?}", p, p, shape.shape());
        }
        if shape.iter().any(|x| !x.is_finite()) || mean.iter().any(|x| !x.is_finite()) {
            bail!(Config, "law parameters must be finite");
        }
        mixture.validate()?;
        let sym = (&shape + shape.transpose()) * 0.5;
        let (mut eigvals, eigvecs) = linalg::sym_eigen_desc(&sym);
        let top = eigvals.first().copied().unwrap_or(0.0).abs();
        if eigvals.iter().any(|l| *l < -1e-10 * top.max(1.0)) {
            bail!(Config, "shape matrix is not positive semidefinite");
        }
        eigvals.iter_mut().for_each(|l| *l = l.max(0.0));
        Ok(Self { mean, shape: sym, mixture, eigvals, eigvecs })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn mixture(&self) -> &ScaleMixture {
        &self.mixture
    }

    /// Eigenvalues of the shape matrix, descending.
    pub fn shape_eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    /// Orthonormal eigenvectors of the shape matrix as columns, in the order
    /// of [`Self::shape_eigenvalues`].
    pub fn principal_directions(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        &self.shape * self.mixture.second_moment()
    }

    pub fn push_forward(&self, a: &DMatrix<f64>) -> Result<EllipticalLaw> {
        if a.ncols() != self.dim() {
            bail!(Shape, "map has {} columns, law has dimension {}", a.ncols(), self.dim());
        }
        if a.iter().any(|x| !x.is_finite()) {
            bail!(Config, "linear map has non-finite entries");
        }
        let mean = a * DVector::from_column_slice(&self.mean);
        let shape = a * &self.shape * a.transpose();
        EllipticalLaw::new(mean.iter().copied().collect(), shape, self.mixture.clone())
    }

    /// Same stream layout as [`EllipticalModel::sample`], with the Gaussian
    /// part colored by `V diag(sqrt(l)) xi`.
    pub fn sample(&self, n: usize, seed: u64) -> SampleMatrix {
        let p = self.dim();
        let factor = DMatrix::from_fn(p, p, |i, j| self.eigvecs[(i, j)] * libm::sqrt(self.eigvals[j]));
        sample_rows(n, p, seed, &self.mixture, |xi, out| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = (0..p).map(|j| factor[(i, j)] * xi[j]).sum();
            }
        }, &self.mean)
    }

    pub fn conditional_mean(&self, split: &SubspaceSplit, w1: &[f64]) -> Result<Vec<f64>> {
        conditional_mean(&self.mean, &self.covariance(), split, w1)
    }

    pub fn regression_operator(&self, split: &SubspaceSplit) -> Result<DMatrix<f64>> {
        regression_operator(&self.covariance(), split)
    }

    pub fn covariance_trace(&self) -> f64 {
        self.mixture.second_moment() * self.eigvals.iter().sum::<f64>()
    }
}

fn fill_row<F>(seed: u64, row: u64, mixture: &ScaleMixture, xi: &mut [f64], out: &mut [f64], color: F, mean: &[f64])
where
    F: Fn(&[f64], &mut [f64]),
{
    let z = mixture.draw(&mut rng::scale_stream(seed, row));
    let mut g = rng::gauss_stream(seed, row);
    for x in xi.iter_mut() {
        *x = StandardNormal.sample(&mut g);
    }
    color(xi, out);
    for (o, m) in out.iter_mut().zip(mean) {
        *o = m + z * *o;
    }
}

fn sample_rows<F>(n: usize, d: usize, seed: u64, mixture: &ScaleMixture, color: F, mean: &[f64]) -> SampleMatrix
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut out = SampleMatrix::zeros(n, d);
    let mut xi = vec![0.0; d];
    for j in 0..n {
        fill_row(seed, j as u64, mixture, &mut xi, out.row_mut(j), &color, mean);
    }
    out
}

fn split_blocks(cov: &DMatrix<f64>, split: &SubspaceSplit) -> (DMatrix<f64>, DMatrix<f64>) {
    let a1 = split.basis();
    let a2 = split.completion();
    let sigma11 = a1 * cov * a1.transpose();
    let gamma21 = a2 * cov * a1.transpose();
    (sigma11, gamma21)
}

fn regression_operator(cov: &DMatrix<f64>, split: &SubspaceSplit) -> Result<DMatrix<f64>> {
    if cov.nrows() != split.d() {
        bail!(Shape, "split has dimension {}, law has {}", split.d(), cov.nrows());
    }
    let (sigma11, gamma21) = split_blocks(cov, split);
    let inv = linalg::sym_inverse(&sigma11, 1e-12).map_err(|detail| Error::Singular {
        subspace: split.describe(),
        detail,
    })?;
    Ok(gamma21 * inv)
}

fn conditional_mean(mean: &[f64], cov: &DMatrix<f64>, split: &SubspaceSplit, w1: &[f64]) -> Result<Vec<f64>> {
    check_dim(split.q(), w1.len())?;
    let b = regression_operator(cov, split)?;
    let (mu1, mu2) = split.split(mean)?;
    let dw = DVector::from_iterator(w1.len(), w1.iter().zip(&mu1).map(|(w, m)| w - m));
    let cm = b * dw;
    Ok(mu2.iter().zip(cm.iter()).map(|(m, c)| m + c).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(lambda: Vec<f64>) -> EllipticalModel {
        EllipticalModel::centered(lambda, ScaleMixture::Gaussian).unwrap()
    }

    #[test]
    fn degenerate_scale_returns_the_mean() {
        let m = EllipticalModel::new(
            HilbertVector::new(vec![1.0, -2.0]),
            vec![3.0, 1.0],
            ScaleMixture::TwoPoint { z1: 0.0, z2: 0.0, p: 0.5 },
        )
        .unwrap();
        let s = m.sample(20, 4);
        assert!(s.rows().all(|r| r == [1.0, -2.0]));
    }

    #[test]
    fn zero_eigenvalue_column_is_exactly_zero() {
        let s = gauss(vec![1.0, 0.0]).sample(500, 9);
        assert!(s.rows().all(|r| r[1] == 0.0));
    }

    #[test]
    fn sampling_is_deterministic_and_row_addressable() {
        let m = EllipticalModel::centered(vec![2.0, 1.0, 0.5], ScaleMixture::StudentT { nu: 5.0 }).unwrap();
        let a = m.sample(50, 3);
        assert_eq!(a, m.sample(50, 3));
        assert_ne!(a, m.sample(50, 4));
        assert_eq!(a.row(37), m.sample_row(3, 37).as_slice());
    }

    #[test]
    fn covariance_operator_examples() {
        let g = gauss(vec![3.0, 1.0]);
        assert_eq!(g.covariance_operator(), DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0])));
        let t = EllipticalModel::centered(vec![1.0, 1.0], ScaleMixture::StudentT { nu: 4.0 }).unwrap();
        assert_eq!(t.covariance_operator(), DMatrix::<f64>::identity(2, 2) * 2.0);
        let tp = EllipticalModel::centered(vec![1.0], ScaleMixture::TwoPoint { z1: 1.0, z2: 3.0, p: 0.5 })
            .unwrap();
        assert_eq!(tp.covariance_operator()[(0, 0)], 5.0);
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(gauss_try(vec![1.0, 2.0]).is_err());
        assert!(gauss_try(vec![1.0, -0.5]).is_err());
        assert!(EllipticalModel::centered(vec![1.0], ScaleMixture::StudentT { nu: 2.0 }).is_err());
        assert!(EllipticalModel::centered(vec![1.0], ScaleMixture::TwoPoint { z1: 1.0, z2: 1.0, p: 1.5 })
            .is_err());
    }

    fn gauss_try(lambda: Vec<f64>) -> Result<EllipticalModel> {
        EllipticalModel::centered(lambda, ScaleMixture::Gaussian)
    }

    #[test]
    fn push_forward_examples() {
        let m = EllipticalModel::new(HilbertVector::new(vec![1.0, 2.0]), vec![3.0, 1.0], ScaleMixture::Gaussian)
            .unwrap();
        let id = m.push_forward(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(id.mean(), &[1.0, 2.0]);
        assert_eq!(id.shape(), &DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0])));
        let sel = m.push_forward(&DMatrix::from_row_slice(1, 2, &[1.0, 0.0])).unwrap();
        assert_eq!(sel.shape()[(0, 0)], 3.0);
        assert_eq!(sel.mean(), &[1.0]);
    }

    #[test]
    fn aligned_split_has_constant_conditional_mean() {
        let m = EllipticalModel::new(
            HilbertVector::new(vec![0.5, -1.0, 2.0]),
            vec![4.0, 1.0, 0.25],
            ScaleMixture::StudentT { nu: 5.0 },
        )
        .unwrap();
        let s = SubspaceSplit::canonical(1, 3).unwrap();
        for w in [-3.0, 0.0, 0.5, 10.0] {
            assert_eq!(m.conditional_mean(&s, &[w]).unwrap(), vec![-1.0, 2.0]);
        }
    }

    #[test]
    fn centered_input_returns_mu2() {
        let m = EllipticalModel::new(HilbertVector::new(vec![1.0, 3.0]), vec![2.0, 1.0], ScaleMixture::Gaussian)
            .unwrap();
        let c = libm::cos(0.4);
        let s_ = libm::sin(0.4);
        let split = SubspaceSplit::from_rows(&[vec![c, s_]]).unwrap();
        let (mu1, mu2) = split.split(&[1.0, 3.0]).unwrap();
        let got = m.conditional_mean(&split, &mu1).unwrap();
        assert!((got[0] - mu2[0]).abs() < 1e-14);
    }

    #[test]
    fn singular_split_is_reported() {
        let m = gauss(vec![1.0, 0.0]);
        let s = SubspaceSplit::from_rows(&[vec![0.0, 1.0]]).unwrap();
        let err = m.conditional_mean(&s, &[0.0]).unwrap_err();
        match err {
            Error::Singular { subspace, .. } => assert!(subspace.contains("W1")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn standardized_projection_is_direction_free() {
        let m = EllipticalModel::centered(vec![4.0, 1.0], ScaleMixture::StudentT { nu: 5.0 }).unwrap();
        let a = m.standardized_projection(&HilbertVector::new(vec![1.0, 0.0])).unwrap();
        let b = m.standardized_projection(&HilbertVector::new(vec![0.6, 0.8])).unwrap();
        assert_eq!(a, b);
        assert!((a.variance() - 1.0).abs() < 1e-14);
        let g = gauss(vec![1.0, 1.0]);
        assert_eq!(
            g.standardized_projection(&HilbertVector::unit(2, 0)).unwrap(),
            UnivariateLaw::standard_normal()
        );
        let k = gauss(vec![1.0, 0.0]);
        assert!(matches!(
            k.standardized_projection(&HilbertVector::unit(2, 1)),
            Err(Error::DegenerateDirection(_))
        ));
    }
}
