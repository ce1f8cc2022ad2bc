//! Two principal points of an elliptical element in closed form.
//!
//! Both points lie on the line through `mu` along the leading eigenvector
//! `phi_1` of the covariance operator, at the two principal points of the real
//! variable `<phi_1, V - mu>`. The resulting distortion is
//! `tr(Gamma_V) - (1 - g) lambda_1(Gamma_V)` with `g = D_Y(2) / Var(Y)` the
//! same for every one-dimensional projection.

use alloc::vec::Vec;

use crate::elliptical::EllipticalModel;
use crate::error::{bail, Result};
use crate::function_space::HilbertVector;
use crate::points::PointSet;
use crate::univariate::{solve_univariate, UnivariateLaw};

/// Relative gap below which the leading eigendirection is not unique.
pub const NON_UNIQUE_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormPoints {
    /// `{mu + gamma_1 phi_1, mu + gamma_2 phi_1}`.
    pub points: PointSet,
    /// `gamma_1 < gamma_2`, principal points of `<phi_1, V - mu>`.
    pub gammas: [f64; 2],
    pub direction: HilbertVector,
    /// `lambda_1 == lambda_2` up to [`NON_UNIQUE_GAP`]; `direction` is then
    /// the first basis direction, one of many optimal choices.
    pub non_unique: bool,
    /// `g = D_Y(2) / Var(Y)` for the standardized projection law.
    pub g: f64,
    /// Analytic `E d^2(V, points)`.
    pub mse: f64,
    /// Fixed-point residual of the one-dimensional solution.
    pub residual: f64,
}

pub fn closed_form_two_points(model: &EllipticalModel) -> Result<ClosedFormPoints> {
    let lam = model.lambda();
    let l1 = lam[0];
    if !(l1 > 0.0) || !(model.mixture().second_moment() > 0.0) {
        bail!(DegenerateModel, "leading eigenvalue of the covariance operator is zero");
    }
    let non_unique = lam.get(1).is_some_and(|l2| l1 - l2 < NON_UNIQUE_GAP * l1);
    let d = model.dim();
    let direction = HilbertVector::unit(d, 0);
    // <phi_1, V - mu> = sqrt(lambda_1) * Z * xi
    let law = model.mixture().mixed_normal_law().scaled(libm::sqrt(l1))?;
    let sol = solve_univariate(&law, 2)?;
    let gammas = [sol.points[0], sol.points[1]];
    let mu = model.mu().coeffs();
    let pts: Vec<HilbertVector> = gammas
        .iter()
        .map(|g| {
            let mut c = mu.to_vec();
            c[0] += g;
            HilbertVector::new(c)
        })
        .collect();
    let g = g_from_law(&model.mixture().standardized_law()?)?;
    let cov_l1 = model.covariance_eigenvalues()[0];
    Ok(ClosedFormPoints {
        points: PointSet::new(pts)?,
        gammas,
        direction,
        non_unique,
        g,
        mse: model.covariance_trace() - (1.0 - g) * cov_l1,
        residual: sol.residual,
    })
}

/// `D_Y(2) / Var(Y)` for the standardized projection law of `model`.
pub fn g_constant(model: &EllipticalModel) -> Result<f64> {
    if !(model.lambda()[0] > 0.0) {
        bail!(DegenerateModel, "model has no non-degenerate direction");
    }
    g_from_law(&model.mixture().standardized_law()?)
}

pub fn g_from_law(law: &UnivariateLaw) -> Result<f64> {
    let sol = solve_univariate(law, 2)?;
    Ok(sol.ratio(law))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptical::ScaleMixture;
    use alloc::vec;

    #[test]
    fn gaussian_constant() {
        let m = EllipticalModel::centered(vec![4.0, 1.0], ScaleMixture::Gaussian).unwrap();
        let g = g_constant(&m).unwrap();
        assert!((g - (1.0 - 2.0 / core::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn unit_two_point_mixture_is_gaussian() {
        let g = EllipticalModel::centered(vec![1.0], ScaleMixture::Gaussian).unwrap();
        let tp = EllipticalModel::centered(vec![1.0], ScaleMixture::TwoPoint { z1: 1.0, z2: 1.0, p: 0.3 })
            .unwrap();
        assert!((g_constant(&g).unwrap() - g_constant(&tp).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn shifting_the_mean_shifts_the_points() {
        let m = EllipticalModel::centered(vec![4.0, 1.0], ScaleMixture::StudentT { nu: 5.0 }).unwrap();
        let shift = vec![0.5, -2.0];
        let ms = m.with_mean(HilbertVector::new(shift.clone())).unwrap();
        let a = closed_form_two_points(&m).unwrap();
        let b = closed_form_two_points(&ms).unwrap();
        for j in 0..2 {
            for (i, s) in shift.iter().enumerate() {
                assert_eq!(b.points.point(j)[i], a.points.point(j)[i] + s);
            }
        }
    }

    #[test]
    fn degenerate_and_tied_models() {
        let zero = EllipticalModel::centered(vec![0.0, 0.0], ScaleMixture::Gaussian).unwrap();
        assert!(matches!(closed_form_two_points(&zero), Err(crate::Error::DegenerateModel(_))));
        let tied = EllipticalModel::centered(vec![1.0, 1.0, 1.0], ScaleMixture::Gaussian).unwrap();
        let cf = closed_form_two_points(&tied).unwrap();
        assert!(cf.non_unique);
        assert_eq!(cf.direction, HilbertVector::unit(3, 0));
    }
}
