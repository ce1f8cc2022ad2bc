//! Minimum-norm point of a convex hull (Wolfe's algorithm), used to test
//! whether a target lies in the convex hull of a finite point set.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::function_space::dot;

/// Simplex weights and the residual `||sum_j w_j y_j - target||`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFit {
    pub weights: Vec<f64>,
    pub residual: f64,
}

/// Minimize `||sum_j w_j y_j - target||` over `w >= 0`, `sum w = 1`.
pub fn hull_fit(points: &[Vec<f64>], target: &[f64]) -> HullFit {
    let k = points.len();
    let p: Vec<Vec<f64>> =
        points.iter().map(|y| y.iter().zip(target).map(|(a, b)| a - b).collect()).collect();
    let scale = p.iter().map(|v| dot(v, v)).fold(0.0, f64::max);
    if k == 0 {
        return HullFit { weights: Vec::new(), residual: f64::INFINITY };
    }
    if scale == 0.0 {
        let mut w = vec![0.0; k];
        w[0] = 1.0;
        return HullFit { weights: w, residual: 0.0 };
    }
    let eps = 1e-12;
    let start = (0..k).min_by(|&a, &b| dot(&p[a], &p[a]).total_cmp(&dot(&p[b], &p[b]))).unwrap();
    let mut active: Vec<usize> = vec![start];
    let mut lam: Vec<f64> = vec![1.0];
    let mut x = p[start].clone();

    for _ in 0..(50 * k + 50) {
        let xx = dot(&x, &x);
        let (j, xj) = (0..k)
            .map(|i| (i, dot(&x, &p[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xj >= xx - eps * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        lam.push(0.0);
        loop {
            let mu = affine_minimizer(&p, &active);
            if mu.iter().all(|m| *m > eps) {
                lam = mu;
                break;
            }
            let mut theta = 1.0f64;
            for (l, m) in lam.iter().zip(&mu) {
                if *m <= eps && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lam.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            let mut i = 0;
            while i < active.len() {
                if lam[i] <= eps {
                    active.remove(i);
                    lam.remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= total);
            if active.len() <= 1 {
                break;
            }
        }
        x = combine(&p, &active, &lam);
    }
    let mut weights = vec![0.0; k];
    for (i, l) in active.iter().zip(&lam) {
        weights[*i] = *l;
    }
    let resid = combine(&p, &active, &lam);
    HullFit { weights, residual: libm::sqrt(dot(&resid, &resid)) }
}

fn combine(p: &[Vec<f64>], active: &[usize], lam: &[f64]) -> Vec<f64> {
    let d = p[0].len();
    let mut x = vec![0.0; d];
    for (i, l) in active.iter().zip(lam) {
        for (a, b) in x.iter_mut().zip(&p[*i]) {
            *a += l * b;
        }
    }
    x
}

// Weights summing to one that minimize the norm over the affine hull of the
// active points; least-squares solution of the bordered Gram system.
fn affine_minimizer(p: &[Vec<f64>], active: &[usize]) -> Vec<f64> {
    let m = active.len();
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            a[(r, c)] = dot(&p[i], &p[j]);
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m + 1);
    b[m] = 1.0;
    let tol = 1e-14 * a.amax();
    let sol = a.svd(true, true).solve(&b, tol).expect("U and V requested");
    let mut mu: Vec<f64> = sol.iter().take(m).copied().collect();
    let total: f64 = mu.iter().sum();
    if total.abs() > 0.0 {
        mu.iter_mut().for_each(|x| *x /= total);
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_inside_triangle() {
        let pts = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0]];
        let fit = hull_fit(&pts, &[1.0, 1.0]);
        assert!(fit.residual < 1e-12);
        assert!((fit.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((fit.weights[1] - 0.25).abs() < 1e-12 && (fit.weights[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn target_outside_projects_to_edge() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0]];
        let fit = hull_fit(&pts, &[1.0, 3.0]);
        assert!((fit.residual - 3.0).abs() < 1e-12);
        assert!((fit.weights[0] - 0.5).abs() < 1e-12);
        let far = hull_fit(&pts, &[5.0, 0.0]);
        assert!((far.residual - 3.0).abs() < 1e-12);
        assert_eq!(far.weights, vec![0.0, 1.0]);
    }

    #[test]
    fn single_point_and_symmetric_pair() {
        assert!(hull_fit(&[vec![1.0, 2.0]], &[1.0, 2.0]).residual == 0.0);
        let fit = hull_fit(&[vec![-1.5, 0.0], vec![1.5, 0.0]], &[0.0, 0.0]);
        assert!(fit.residual < 1e-14);
        assert!((fit.weights[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn affinely_dependent_points() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let fit = hull_fit(&pts, &[1.7]);
        assert!(fit.residual < 1e-12);
        let outside = hull_fit(&pts, &[-1.0]);
        assert!((outside.residual - 1.0).abs() < 1e-12);
    }
}
