//! One-dimensional laws and their principal points.
//!
//! Cell moments are evaluated in closed form (normal, Student-t, uniform,
//! normal scale mixtures) or exactly (finite discrete laws), so the Lloyd fixed
//! point below carries no Monte Carlo noise. Cells are half-open `(lo, hi]`;
//! with points sorted ascending a sample on a boundary belongs to the cell of
//! the lower index.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::special;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnivariateLaw {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `loc + scale * T` with `T` standard Student-t on `nu > 2` degrees of freedom.
    StudentT { nu: f64, loc: f64, scale: f64 },
    /// `loc + S * xi`, `S = sds[i]` with probability `weights[i]`.
    NormalScaleMixture { loc: f64, weights: Vec<f64>, sds: Vec<f64> },
    /// Finite support; atoms sorted strictly ascending.
    Discrete { atoms: Vec<f64>, probs: Vec<f64> },
}

impl UnivariateLaw {
    pub fn standard_normal() -> Self {
        Self::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Normal { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || *sd <= 0.0 {
                    bail!(Config, "normal law needs finite mean and sd > 0");
                }
            }
            Self::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                    bail!(Config, "uniform law needs finite lo < hi");
                }
            }
            Self::StudentT { nu, loc, scale } => {
                if !(*nu > 2.0) || !nu.is_finite() {
                    bail!(Config, "student-t law needs 2 < nu < inf for a finite variance");
                }
                if !loc.is_finite() || !scale.is_finite() || *scale <= 0.0 {
                    bail!(Config, "student-t law needs finite loc and scale > 0");
                }
            }
            Self::NormalScaleMixture { loc, weights, sds } => {
                if weights.is_empty() || weights.len() != sds.len() {
                    bail!(Config, "scale mixture needs matching non-empty weights and sds");
                }
                if !loc.is_finite()
                    || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
                    || sds.iter().any(|s| !s.is_finite() || *s < 0.0)
                {
                    bail!(Config, "scale mixture needs finite non-negative weights and sds");
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    bail!(Config, "scale mixture weights sum to {}, expected 1", total);
                }
            }
            Self::Discrete { atoms, probs } => {
                if atoms.is_empty() || atoms.len() != probs.len() {
                    bail!(Config, "discrete law needs matching non-empty atoms and probs");
                }
                if atoms.windows(2).any(|w| w[1] <= w[0]) || atoms.iter().any(|a| !a.is_finite()) {
                    bail!(Config, "discrete atoms must be finite and strictly ascending");
                }
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    bail!(Config, "discrete probabilities must be non-negative");
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    bail!(Config, "discrete probabilities sum to {}, expected 1", total);
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Normal { mean, .. } => *mean,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::StudentT { loc, .. } | Self::NormalScaleMixture { loc, .. } => *loc,
            Self::Discrete { atoms, probs } => atoms.iter().zip(probs).map(|(a, p)| a * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Normal { sd, .. } => sd * sd,
            Self::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Self::StudentT { nu, scale, .. } => scale * scale * nu / (nu - 2.0),
            Self::NormalScaleMixture { weights, sds, .. } => {
                weights.iter().zip(sds).map(|(w, s)| w * s * s).sum()
            }
            Self::Discrete { atoms, probs } => {
                let m = self.mean();
                atoms.iter().zip(probs).map(|(a, p)| p * (a - m) * (a - m)).sum()
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        let m = self.mean();
        self.variance() + m * m
    }

    /// Number of support points for finite laws, `None` for continuous laws.
    pub fn support_len(&self) -> Option<usize> {
        match self {
            Self::Discrete { probs, .. } => Some(probs.iter().filter(|p| **p > 0.0).count()),
            Self::NormalScaleMixture { weights, sds, .. }
                if weights.iter().zip(sds).all(|(w, s)| *w == 0.0 || *s == 0.0) =>
            {
                Some(1)
            }
            _ => None,
        }
    }

    /// Density, `None` for laws with atoms.
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            Self::Normal { mean, sd } => Some(special::norm_pdf((x - mean) / sd) / sd),
            Self::Uniform { lo, hi } => {
                Some(if x >= *lo && x <= *hi { 1.0 / (hi - lo) } else { 0.0 })
            }
            Self::StudentT { nu, loc, scale } => Some(special::t_pdf((x - loc) / scale, *nu) / scale),
            Self::NormalScaleMixture { loc, weights, sds } => {
                let mut f = 0.0;
                for (w, s) in weights.iter().zip(sds) {
                    if *w == 0.0 {
                        continue;
                    }
                    if *s == 0.0 {
                        return None;
                    }
                    f += w * special::norm_pdf((x - loc) / s) / s;
                }
                Some(f)
            }
            Self::Discrete { .. } => None,
        }
    }

    /// Mass and first moment of the law restricted to `(lo, hi]`.
    pub fn interval_moments(&self, lo: f64, hi: f64) -> (f64, f64) {
        if !(hi > lo) {
            return (0.0, 0.0);
        }
        match self {
            Self::Normal { mean, sd } => normal_moments(*mean, *sd, lo, hi),
            Self::Uniform { lo: a, hi: b } => {
                let l = lo.max(*a);
                let h = hi.min(*b);
                if h <= l {
                    (0.0, 0.0)
                } else {
                    let w = b - a;
                    ((h - l) / w, 0.5 * (h * h - l * l) / w)
                }
            }
            Self::StudentT { nu, loc, scale } => {
                let ta = (lo - loc) / scale;
                let tb = (hi - loc) / scale;
                let mass = special::t_mass(ta, tb, *nu);
                (mass, loc * mass + scale * special::t_partial_mean(ta, tb, *nu))
            }
            Self::NormalScaleMixture { loc, weights, sds } => {
                let mut acc = (0.0, 0.0);
                for (w, s) in weights.iter().zip(sds) {
                    let (m0, m1) = if *s == 0.0 {
                        if lo < *loc && *loc <= hi {
                            (1.0, *loc)
                        } else {
                            (0.0, 0.0)
                        }
                    } else {
                        normal_moments(*loc, *s, lo, hi)
                    };
                    acc.0 += w * m0;
                    acc.1 += w * m1;
                }
                acc
            }
            Self::Discrete { atoms, probs } => {
                let mut acc = (0.0, 0.0);
                for (a, p) in atoms.iter().zip(probs) {
                    if lo < *a && *a <= hi {
                        acc.0 += p;
                        acc.1 += p * a;
                    }
                }
                acc
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.interval_moments(f64::NEG_INFINITY, x).0
    }

    /// Smallest `x` with `cdf(x) >= p`, by bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        if let Self::Discrete { atoms, probs } = self {
            let mut c = 0.0;
            for (a, q) in atoms.iter().zip(probs) {
                c += q;
                if c >= p {
                    return *a;
                }
            }
            return *atoms.last().unwrap();
        }
        let m = self.mean();
        let s = libm::sqrt(self.variance()).max(f64::MIN_POSITIVE);
        let mut lo = m - 8.0 * s;
        let mut hi = m + 8.0 * s;
        while self.cdf(lo) >= p && lo.is_finite() {
            lo = m - 2.0 * (m - lo);
        }
        while self.cdf(hi) < p && hi.is_finite() {
            hi = m + 2.0 * (hi - m);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Law of `rho * Y`.
    pub fn scaled(&self, rho: f64) -> Result<Self> {
        if rho == 0.0 || !rho.is_finite() {
            bail!(Usage, "scale factor must be finite and non-zero, got {}", rho);
        }
        let a = rho.abs();
        Ok(match self {
            Self::Normal { mean, sd } => Self::Normal { mean: rho * mean, sd: a * sd },
            Self::Uniform { lo, hi } => {
                let (x, y) = (rho * lo, rho * hi);
                Self::Uniform { lo: x.min(y), hi: x.max(y) }
            }
            Self::StudentT { nu, loc, scale } => Self::StudentT { nu: *nu, loc: rho * loc, scale: a * scale },
            Self::NormalScaleMixture { loc, weights, sds } => Self::NormalScaleMixture {
                loc: rho * loc,
                weights: weights.clone(),
                sds: sds.iter().map(|s| a * s).collect(),
            },
            Self::Discrete { atoms, probs } => {
                let mut pairs: Vec<(f64, f64)> =
                    atoms.iter().map(|x| rho * x).zip(probs.iter().copied()).collect();
                pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
                Self::Discrete {
                    atoms: pairs.iter().map(|p| p.0).collect(),
                    probs: pairs.iter().map(|p| p.1).collect(),
                }
            }
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Self::StudentT { nu, loc, scale } => {
                let z: f64 = StandardNormal.sample(rng);
                let c: f64 = ChiSquared::new(*nu).expect("validated dof").sample(rng);
                loc + scale * z * libm::sqrt(nu / c)
            }
            Self::NormalScaleMixture { loc, weights, sds } => {
                let s = sds[pick(weights, rng.random::<f64>())];
                let z: f64 = StandardNormal.sample(rng);
                loc + s * z
            }
            Self::Discrete { atoms, probs } => atoms[pick(probs, rng.random::<f64>())],
        }
    }
}

fn pick(weights: &[f64], u: f64) -> usize {
    let mut c = 0.0;
    for (i, w) in weights.iter().enumerate() {
        c += w;
        if u < c {
            return i;
        }
    }
    weights.len() - 1
}

fn normal_moments(mean: f64, sd: f64, lo: f64, hi: f64) -> (f64, f64) {
    let za = (lo - mean) / sd;
    let zb = (hi - mean) / sd;
    let mass = special::norm_mass(za, zb);
    let pa = if za.is_finite() { special::norm_pdf(za) } else { 0.0 };
    let pb = if zb.is_finite() { special::norm_pdf(zb) } else { 0.0 };
    (mass, mean * mass + sd * (pa - pb))
}

fn boundaries(points: &[f64]) -> Vec<f64> {
    let mut b = Vec::with_capacity(points.len() + 1);
    b.push(f64::NEG_INFINITY);
    b.extend(points.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    b.push(f64::INFINITY);
    b
}

/// `E min_j (Y - c_j)^2` for the nearest-point quantizer on `points`.
///
/// Uses `E Y^2 - sum_j (2 c_j M1_j - c_j^2 M0_j)` over the Voronoi cells.
pub fn quantization_objective(law: &UnivariateLaw, points: &[f64]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(f64::total_cmp);
    let b = boundaries(&pts);
    let mut gain = 0.0;
    for (j, c) in pts.iter().enumerate() {
        let (m0, m1) = law.interval_moments(b[j], b[j + 1]);
        gain += 2.0 * c * m1 - c * c * m0;
    }
    (law.second_moment() - gain).max(0.0)
}

/// Result of the quadrature Lloyd iteration in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSolution {
    /// Sorted ascending.
    pub points: Vec<f64>,
    /// `D_Y(k)`, the mean squared quantization error at `points`.
    pub objective: f64,
    /// `max_j |c_j - E(Y | Y in cell_j)|` after the last update.
    pub residual: f64,
    pub iterations: usize,
}

impl UnivariateSolution {
    /// `D_Y(k) / Var(Y)`.
    pub fn ratio(&self, law: &UnivariateLaw) -> f64 {
        self.objective / law.variance()
    }
}

const MAX_ITER_1D: usize = 50_000;

/// The `k` principal points of `law`, sorted ascending.
pub fn univariate_principal_points(law: &UnivariateLaw, k: usize) -> Result<Vec<f64>> {
    Ok(solve_univariate(law, k)?.points)
}

/// Best quadrature Lloyd fixed point over a few deterministic quantile-spread
/// starts.
pub fn solve_univariate(law: &UnivariateLaw, k: usize) -> Result<UnivariateSolution> {
    law.validate()?;
    if k == 0 {
        bail!(Usage, "number of principal points must be at least 1");
    }
    if let Some(m) = law.support_len() {
        if k > m {
            bail!(Usage, "k = {} exceeds the {} support points of the law", k, m);
        }
    }
    let mut best: Option<UnivariateSolution> = None;
    for start in initial_points(law, k) {
        let sol = lloyd_1d(law, start);
        let better = match &best {
            None => true,
            Some(b) => sol.objective < b.objective,
        };
        if better {
            best = Some(sol);
        }
    }
    Ok(best.expect("at least one start"))
}

fn initial_points(law: &UnivariateLaw, k: usize) -> Vec<Vec<f64>> {
    if let UnivariateLaw::Discrete { atoms, probs } = law {
        let support: Vec<f64> =
            atoms.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(a, _)| *a).collect();
        let m = support.len();
        let spread: Vec<f64> = (0..k).map(|j| support[(j * m + m / 2) / k.max(1)].min(support[m - 1])).collect();
        let mut starts = vec![spread];
        // quantile starts can repeat an atom; keep them only when distinct
        let q: Vec<f64> = (0..k).map(|j| law.quantile((j as f64 + 0.5) / k as f64)).collect();
        if q.windows(2).all(|w| w[1] > w[0]) {
            starts.push(q);
        }
        return starts;
    }
    let kf = k as f64;
    let grids: [&dyn Fn(usize) -> f64; 3] = [
        &|j| (j as f64 + 0.5) / kf,
        &|j| (j as f64 + 1.0) / (kf + 1.0),
        &|j| 0.5 + 0.5 * ((j as f64 + 0.5) / kf - 0.5),
    ];
    grids
        .iter()
        .map(|g| {
            let mut pts: Vec<f64> = (0..k).map(|j| law.quantile(g(j))).collect();
            pts.sort_by(f64::total_cmp);
            pts
        })
        .collect()
}

fn lloyd_1d(law: &UnivariateLaw, mut pts: Vec<f64>) -> UnivariateSolution {
    let scale = libm::sqrt(law.variance()).max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < MAX_ITER_1D {
        iterations += 1;
        let b = boundaries(&pts);
        let mut shift: f64 = 0.0;
        let next: Vec<f64> = pts
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let (m0, m1) = law.interval_moments(b[j], b[j + 1]);
                let c_new = if m0 > 0.0 { m1 / m0 } else { *c };
                shift = shift.max((c_new - c).abs());
                c_new
            })
            .collect();
        pts = next;
        pts.sort_by(f64::total_cmp);
        residual = shift;
        if shift <= tol {
            break;
        }
    }
    // residual of the returned set, not of the previous iterate
    let b = boundaries(&pts);
    let mut final_res: f64 = 0.0;
    for (j, c) in pts.iter().enumerate() {
        let (m0, m1) = law.interval_moments(b[j], b[j + 1]);
        if m0 > 0.0 {
            final_res = final_res.max((m1 / m0 - c).abs());
        }
    }
    if final_res.is_finite() {
        residual = final_res;
    }
    UnivariateSolution { objective: quantization_objective(law, &pts), points: pts, residual, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_the_mean() {
        let law = UnivariateLaw::Normal { mean: 1.5, sd: 2.0 };
        let p = univariate_principal_points(&law, 1).unwrap();
        assert!((p[0] - 1.5).abs() < 1e-12);
        let obj = quantization_objective(&law, &p);
        assert!((obj - 4.0).abs() < 1e-12);
    }

    #[test]
    fn moments_cover_the_whole_line() {
        let laws = [
            UnivariateLaw::standard_normal(),
            UnivariateLaw::Uniform { lo: -1.0, hi: 3.0 },
            UnivariateLaw::StudentT { nu: 5.0, loc: 0.5, scale: 2.0 },
            UnivariateLaw::NormalScaleMixture { loc: 0.0, weights: vec![0.3, 0.7], sds: vec![1.0, 3.0] },
        ];
        for law in &laws {
            let (m0, m1) = law.interval_moments(f64::NEG_INFINITY, f64::INFINITY);
            assert!((m0 - 1.0).abs() < 1e-14, "{law:?}");
            assert!((m1 - law.mean()).abs() < 1e-13, "{law:?}");
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let laws = [
            UnivariateLaw::standard_normal(),
            UnivariateLaw::StudentT { nu: 5.0, loc: 0.0, scale: 1.0 },
            UnivariateLaw::NormalScaleMixture { loc: 0.0, weights: vec![0.5, 0.5], sds: vec![1.0, 3.0] },
        ];
        for law in &laws {
            // sinh substitution, midpoint rule
            let m = 200_000;
            let u_max = 12.0;
            let h = 2.0 * u_max / m as f64;
            let s: f64 = (0..m)
                .map(|i| {
                    let u = -u_max + (i as f64 + 0.5) * h;
                    law.density(libm::sinh(u)).unwrap() * libm::cosh(u)
                })
                .sum::<f64>()
                * h;
            assert!((s - 1.0).abs() < 1e-6, "{law:?}: {s}");
        }
    }

    #[test]
    fn discrete_law_rejects_too_many_points() {
        let law = UnivariateLaw::Discrete { atoms: vec![-1.0, 1.0], probs: vec![0.5, 0.5] };
        assert!(matches!(univariate_principal_points(&law, 3), Err(crate::Error::Usage(_))));
        let p = univariate_principal_points(&law, 2).unwrap();
        assert_eq!(p, vec![-1.0, 1.0]);
        assert_eq!(quantization_objective(&law, &p), 0.0);
    }

    #[test]
    fn discrete_boundary_mass_goes_to_lower_index() {
        let law = UnivariateLaw::Discrete { atoms: vec![-1.0, 0.0, 1.0], probs: vec![0.25, 0.5, 0.25] };
        let b = boundaries(&[-1.0, 1.0]);
        let (m0_left, _) = law.interval_moments(b[0], b[1]);
        assert_eq!(m0_left, 0.75);
    }

    #[test]
    fn scaling_rejects_zero() {
        assert!(UnivariateLaw::standard_normal().scaled(0.0).is_err());
        let u = UnivariateLaw::Uniform { lo: 0.0, hi: 1.0 }.scaled(-2.0).unwrap();
        assert_eq!(u, UnivariateLaw::Uniform { lo: -2.0, hi: 0.0 });
    }

    #[test]
    fn student_t_requires_finite_variance() {
        let law = UnivariateLaw::StudentT { nu: 2.0, loc: 0.0, scale: 1.0 };
        assert!(law.validate().is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        let law = UnivariateLaw::StudentT { nu: 5.0, loc: 0.0, scale: 1.0 };
        for &p in &[0.01, 0.25, 0.5, 0.9] {
            assert!((law.cdf(law.quantile(p)) - p).abs() < 1e-12);
        }
    }
}
