//! Coefficient-space representation of a separable Hilbert space.
//!
//! An element is stored as its first `d` coefficients in a fixed orthonormal
//! basis. The Fourier family on `[0, 1]` is ordered
//! `1, sqrt2 cos(2 pi t), sqrt2 sin(2 pi t), sqrt2 cos(4 pi t), ...`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisFamily {
    /// Trigonometric basis on `[0, 1]`.
    Fourier,
    /// Abstract coordinates; evaluation is the identity on coefficients.
    SyntheticEigen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub family: BasisFamily,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

/// An evaluable orthonormal basis truncated at `dimension` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    family: BasisFamily,
    dimension: usize,
    grid: Vec<f64>,
}

/// `m` equispaced abscissae covering `[0, 1]` including both endpoints.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..m).map(|i| i as f64 / (m - 1) as f64).collect(),
    }
}

/// Value of the `i`-th (0-based) Fourier element at `t`.
pub fn fourier_element(i: usize, t: f64) -> f64 {
    if i == 0 {
        return 1.0;
    }
    let freq = i.div_ceil(2) as f64;
    let arg = 2.0 * PI * freq * t;
    if i % 2 == 1 {
        SQRT_2 * libm::cos(arg)
    } else {
        SQRT_2 * libm::sin(arg)
    }
}

pub fn make_basis(spec: &BasisSpec) -> Result<Basis> {
    Basis::new(spec)
}

impl Basis {
    pub fn new(spec: &BasisSpec) -> Result<Self> {
        if spec.dimension == 0 {
            bail!(Config, "basis dimension must be at least 1");
        }
        let grid = match (&spec.grid, spec.family) {
            (Some(g), _) => {
                if g.iter().any(|t| !(0.0..=1.0).contains(t)) {
                    bail!(Config, "grid abscissae must lie in [0, 1]");
                }
                if g.windows(2).any(|w| w[1] <= w[0]) {
                    bail!(Config, "grid abscissae must be strictly increasing");
                }
                g.clone()
            }
            (None, BasisFamily::Fourier) => uniform_grid((8 * spec.dimension).max(256) + 1),
            (None, BasisFamily::SyntheticEigen) => Vec::new(),
        };
        Ok(Self { family: spec.family, dimension: spec.dimension, grid })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Values of `v` on the grid. For synthetic coordinates this is the
    /// coefficient vector itself.
    pub fn evaluate(&self, v: &HilbertVector) -> Result<Vec<f64>> {
        check_dim(self.dimension, v.dim())?;
        Ok(match self.family {
            BasisFamily::SyntheticEigen => v.coeffs().to_vec(),
            BasisFamily::Fourier => self
                .grid
                .iter()
                .map(|&t| v.coeffs().iter().enumerate().map(|(i, c)| c * fourier_element(i, t)).sum())
                .collect(),
        })
    }

    /// `(t, value)` pairs for curve export. Synthetic coordinates use the
    /// 1-based coordinate index as abscissa.
    pub fn curve(&self, v: &HilbertVector) -> Result<Vec<(f64, f64)>> {
        let values = self.evaluate(v)?;
        Ok(match self.family {
            BasisFamily::SyntheticEigen => {
                values.into_iter().enumerate().map(|(i, y)| ((i + 1) as f64, y)).collect()
            }
            BasisFamily::Fourier => self.grid.iter().copied().zip(values).collect(),
        })
    }

    /// Gram matrix of the evaluated basis under trapezoidal quadrature on the
    /// grid. Synthetic coordinates are orthonormal by definition.
    pub fn gram(&self) -> DMatrix<f64> {
        let d = self.dimension;
        if self.family == BasisFamily::SyntheticEigen || self.grid.len() < 2 {
            return DMatrix::identity(d, d);
        }
        let g = &self.grid;
        let m = g.len();
        let mut w = vec![0.0; m];
        for i in 0..m - 1 {
            let h = 0.5 * (g[i + 1] - g[i]);
            w[i] += h;
            w[i + 1] += h;
        }
        let vals: Vec<Vec<f64>> =
            (0..d).map(|i| g.iter().map(|&t| fourier_element(i, t)).collect()).collect();
        DMatrix::from_fn(d, d, |a, b| {
            vals[a].iter().zip(&vals[b]).zip(&w).map(|((x, y), wt)| x * y * wt).sum()
        })
    }
}

/// Coefficients `c_i = <phi_i, v>` of an element at truncation level `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HilbertVector(Vec<f64>);

impl HilbertVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    /// Unit vector along the `i`-th (0-based) basis element.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut c = vec![0.0; d];
        c[i] = 1.0;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Squared norm; Parseval at truncation level `d`.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot(&self.0, &other.0))
    }

    /// Keep the first `k` coefficients and zero the rest.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            bail!(Shape, "truncation level {} outside 1..={}", k, self.dim());
        }
        let mut c = self.0.clone();
        c[k..].iter_mut().for_each(|x| *x = 0.0);
        Ok(Self(c))
    }

    pub fn distance_sq(&self, x: &[f64]) -> f64 {
        sq_dist(&self.0, x)
    }
}

impl From<Vec<f64>> for HilbertVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl AsRef<[f64]> for HilbertVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn inner_product(u: &HilbertVector, v: &HilbertVector) -> Result<f64> {
    u.inner(v)
}

pub fn truncate(v: &HilbertVector, k: usize) -> Result<HilbertVector> {
    v.truncate(k)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        bail!(Shape, "dimension mismatch: expected {}, got {}", expected, got);
    }
    Ok(())
}

/// An orthonormal `q x d` frame spanning a subspace `M1` of the truncation,
/// together with a deterministic orthonormal completion spanning `M1^perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSplit {
    basis: DMatrix<f64>,
    completion: DMatrix<f64>,
}

impl SubspaceSplit {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (q, d) = basis.shape();
        if q == 0 || q > d {
            bail!(Shape, "split needs 1 <= q <= d, got q={} d={}", q, d);
        }
        let gram = &basis * basis.transpose();
        let dev = (gram - DMatrix::<f64>::identity(q, q)).amax();
        if dev > 1e-10 {
            bail!(Shape, "split rows are not orthonormal (Gram deviation {:e})", dev);
        }
        let completion = orthonormal_completion(&basis);
        Ok(Self { basis, completion })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let q = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            bail!(Shape, "split rows have unequal lengths");
        }
        Self::new(DMatrix::from_fn(q, d, |i, j| rows[i][j]))
    }

    /// The first `q` canonical directions of a `d`-dimensional truncation.
    pub fn canonical(q: usize, d: usize) -> Result<Self> {
        Self::new(DMatrix::from_fn(q, d, |i, j| if i == j { 1.0 } else { 0.0 }))
    }

    pub fn q(&self) -> usize {
        self.basis.nrows()
    }

    pub fn d(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn completion(&self) -> &DMatrix<f64> {
        &self.completion
    }

    /// Coordinates of `v` in `M1` and in its orthogonal completion.
    pub fn split(&self, v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_dim(self.d(), v.len())?;
        Ok((apply_rows(&self.basis, v), apply_rows(&self.completion, v)))
    }

    pub fn recompose(&self, w1: &[f64], w2: &[f64]) -> Result<HilbertVector> {
        check_dim(self.q(), w1.len())?;
        check_dim(self.d() - self.q(), w2.len())?;
        let mut v = vec![0.0; self.d()];
        for (i, w) in w1.iter().enumerate() {
            for (j, x) in v.iter_mut().enumerate() {
                *x += w * self.basis[(i, j)];
            }
        }
        for (i, w) in w2.iter().enumerate() {
            for (j, x) in v.iter_mut().enumerate() {
                *x += w * self.completion[(i, j)];
            }
        }
        Ok(HilbertVector(v))
    }

    pub(crate) fn describe(&self) -> String {
        let rows: Vec<String> = (0..self.q())
            .map(|i| {
                let r: Vec<String> =
                    (0..self.d()).map(|j| format!("{:.6}", self.basis[(i, j)])).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("W1 spanned by rows [{}]", rows.join(", "))
    }
}

pub fn split(v: &HilbertVector, s: &SubspaceSplit) -> Result<(Vec<f64>, Vec<f64>)> {
    s.split(v.coeffs())
}

fn apply_rows(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

// Gram-Schmidt of the canonical directions against `basis`, in order, with one
// re-orthogonalisation pass.
fn orthonormal_completion(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let (q, d) = basis.shape();
    let mut frame: Vec<Vec<f64>> = (0..q).map(|i| basis.row(i).iter().copied().collect()).collect();
    let mut extra: Vec<Vec<f64>> = Vec::with_capacity(d - q);
    for e in 0..d {
        if extra.len() == d - q {
            break;
        }
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for _ in 0..2 {
            for f in frame.iter() {
                let c = dot(f, &v);
                v.iter_mut().zip(f).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nrm = libm::sqrt(dot(&v, &v));
        if nrm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nrm);
            frame.push(v.clone());
            extra.push(v);
        }
    }
    DMatrix::from_fn(extra.len(), d, |i, j| extra[i][j])
}

/// Seeded `d x d` orthogonal matrix: QR of a standard-normal matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng::stream(seed, rng::ROTATION, 0);
    let mut g = DMatrix::<f64>::zeros(d, d);
    // row-major fill so the layout does not depend on nalgebra's storage
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = StandardNormal.sample(&mut r);
        }
    }
    let qr = g.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..d {
        if rm[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
