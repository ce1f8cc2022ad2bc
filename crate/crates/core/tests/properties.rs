use ppoints_core::{
    assign, empirical_mse, inner_product, lloyd, make_basis, random_orthogonal, self_consistency_residual, split,
    truncate, BasisFamily, BasisSpec, HilbertVector, LloydOptions, PointSet, SampleMatrix, SubspaceSplit,
};
use proptest::prelude::*;

fn coeffs(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // the L2 norm of the evaluated curve equals the coefficient norm
    #[test]
    fn fourier_parseval(c in (1usize..12).prop_flat_map(coeffs)) {
        let d = c.len();
        let basis = make_basis(&BasisSpec { family: BasisFamily::Fourier, dimension: d, grid: None }).unwrap();
        let v = HilbertVector::new(c);
        let curve = basis.curve(&v).unwrap();
        let t: Vec<f64> = curve.iter().map(|p| p.0).collect();
        let y2: Vec<f64> = curve.iter().map(|p| p.1 * p.1).collect();
        let l2 = trapezoid(&t, &y2);
        prop_assert!((l2 - v.norm_sq()).abs() <= 1e-9 * (1.0 + v.norm_sq()));
    }

    #[test]
    fn truncation_is_idempotent_and_shrinks(c in (2usize..10).prop_flat_map(coeffs), k in 1usize..10) {
        let v = HilbertVector::new(c);
        let k = k.min(v.dim());
        let t = truncate(&v, k).unwrap();
        prop_assert_eq!(truncate(&t, k).unwrap(), t.clone());
        prop_assert!(t.norm_sq() <= v.norm_sq() + 1e-12);
        let tail: f64 = v.coeffs()[k..].iter().map(|x| x * x).sum();
        prop_assert!((v.norm_sq() - t.norm_sq() - tail).abs() < 1e-9);
    }

    #[test]
    fn split_is_unitary(c in coeffs(5), seed in 0u64..1000, q in 1usize..5) {
        let rot = random_orthogonal(5, seed);
        let rows: Vec<Vec<f64>> = (0..q).map(|i| (0..5).map(|j| rot[(j, i)]).collect()).collect();
        let s = SubspaceSplit::from_rows(&rows).unwrap();
        let v = HilbertVector::new(c);
        let (w1, w2) = split(&v, &s).unwrap();
        let n2: f64 = w1.iter().chain(&w2).map(|x| x * x).sum();
        prop_assert!((n2 - v.norm_sq()).abs() < 1e-9 * (1.0 + n2));
        let back = s.recompose(&w1, &w2).unwrap();
        for (a, b) in back.coeffs().iter().zip(v.coeffs()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn inner_product_is_symmetric_and_bilinear(a in coeffs(6), b in coeffs(6), s in -3.0..3.0f64) {
        let (u, v) = (HilbertVector::new(a.clone()), HilbertVector::new(b));
        let su = HilbertVector::new(a.iter().map(|x| s * x).collect());
        let uv = inner_product(&u, &v).unwrap();
        prop_assert!((uv - inner_product(&v, &u).unwrap()).abs() < 1e-12);
        prop_assert!((inner_product(&su, &v).unwrap() - s * uv).abs() < 1e-9);
    }

    #[test]
    fn lloyd_distortion_never_increases(seed in 0u64..200, k in 1usize..5) {
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|i| {
                let x = ((i * 7919 + seed as usize * 31) % 1000) as f64 / 100.0;
                let y = ((i * 104_729 + seed as usize * 17) % 977) as f64 / 50.0;
                vec![x, y.sin() * 3.0 + x * 0.2]
            })
            .collect();
        let s = SampleMatrix::from_rows(&rows).unwrap();
        let (pts, rep) = lloyd(&s, &LloydOptions::new(k).with_seed(seed).with_restarts(2)).unwrap();
        for w in rep.mse_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
        }
        prop_assert!((empirical_mse(&s, &pts).unwrap() - rep.final_mse).abs() < 1e-9);
        if rep.converged {
            prop_assert!(self_consistency_residual(&s, &pts).unwrap() < 1e-8);
        }
    }

    // relabelling the points permutes labels and leaves the distortion alone
    #[test]
    fn assignment_follows_point_order(seed in 0u64..100) {
        let rot = random_orthogonal(3, seed);
        let pts: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| 2.0 * rot[(j, i)]).collect()).collect();
        let rev: Vec<Vec<f64>> = pts.iter().rev().cloned().collect();
        let samples: Vec<Vec<f64>> = (0..50).map(|i| {
            let t = i as f64 * 0.37;
            vec![t.cos() * 2.5, (2.0 * t).sin(), t.sin() - 0.5]
        }).collect();
        let s = SampleMatrix::from_rows(&samples).unwrap();
        let a = assign(&s, &PointSet::from_rows(&pts).unwrap()).unwrap();
        let b = assign(&s, &PointSet::from_rows(&rev).unwrap()).unwrap();
        for (x, y) in a.labels.iter().zip(&b.labels) {
            prop_assert_eq!(*x, 2 - *y);
        }
        prop_assert!((a.mse() - b.mse()).abs() < 1e-12);
    }
}
