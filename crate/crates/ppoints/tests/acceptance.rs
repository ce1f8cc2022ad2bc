//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! show up in the test log whether or not they pass.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ppoints::parallel;
use ppoints_core::verify::{
    check_conditional_linearity, check_convex_hull, check_dimension_bound, check_ratio_invariance,
    check_unitary_equivariance, LloydSettings, Status, VerificationReport,
};
use ppoints_core::{
    closed_form_two_points, empirical_mse, g_constant, principal_angles, random_orthogonal, univariate_principal_points,
    EllipticalModel, HilbertVector, LloydOptions, ScaleMixture, SubspaceSplit, UnivariateLaw,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn model(lambda: &[f64], mixture: ScaleMixture) -> EllipticalModel {
    EllipticalModel::centered(lambda.to_vec(), mixture).unwrap()
}

fn t5() -> ScaleMixture {
    ScaleMixture::StudentT { nu: 5.0 }
}

// --- brute-force oracle for symmetric two-point quantizers -----------------

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Distortion of `{-a, a}` for a symmetric density on `[-l, l]`.
fn symmetric_distortion(pdf: &dyn Fn(f64) -> f64, a: f64, l: f64) -> f64 {
    2.0 * simpson(|x| (x - a) * (x - a) * pdf(x), 0.0, l, 20_000)
}

/// Grid search refined by golden section.
fn oracle_half_gap(pdf: &dyn Fn(f64) -> f64, l: f64) -> f64 {
    let f = |a: f64| symmetric_distortion(pdf, a, l);
    let grid: Vec<f64> = (1..200).map(|i| i as f64 * 0.02).collect();
    let best = grid.iter().copied().min_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
    let (mut lo, mut hi) = (best - 0.02, best + 0.02);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-9 {
        let (x1, x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

// --- criteria ---------------------------------------------------------------

fn univariate_oracle() -> Outcome {
    let t = Instant::now();
    let normal_pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let want = oracle_half_gap(&normal_pdf, 12.0);
    let got = univariate_principal_points(&UnivariateLaw::standard_normal(), 2).map_err(|e| e.to_string())?;
    let uni = univariate_principal_points(&UnivariateLaw::Uniform { lo: 0.0, hi: 1.0 }, 2).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let normal_err = (got[0] + want).abs().max((got[1] - want).abs());
    let quoted_err = (got[1] - 0.79788).abs();
    let uniform_err = (uni[0] - 0.25).abs().max((uni[1] - 0.75).abs());
    ensure(
        normal_err < 1e-4 && quoted_err < 1e-4 && uniform_err < 1e-6 && secs < 5.0,
        format!(
            "normal ±{:.6} (oracle {want:.6}, err {normal_err:.1e}); uniform {:?} (err {uniform_err:.1e}); {secs:.2}s",
            got[1], uni
        ),
    )
}

fn closed_form_end_to_end() -> Outcome {
    let t = Instant::now();
    let m = model(&[4.0, 1.0, 0.25], ScaleMixture::Gaussian);
    let s = parallel::sample(&m, 100_000, 2024);
    let (pts, _) = parallel::lloyd(&s, &LloydOptions::new(2).with_seed(2024).with_restarts(10)).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    // E|xi| sqrt(lambda_1) for a standard normal xi
    let gamma = 2.0 * (2.0 / PI).sqrt();
    let mut p: Vec<Vec<f64>> = pts.rows();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let target = [[-gamma, 0.0, 0.0], [gamma, 0.0, 0.0]];
    let coef_err = p.iter().zip(&target).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max);
    let diff: Vec<f64> = p[1].iter().zip(&p[0]).map(|(a, b)| a - b).collect();
    let u = nalgebra::DMatrix::from_column_slice(3, 1, &diff).normalize();
    let e1 = nalgebra::DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
    let angle = principal_angles(&u, &e1).map_err(|e| e.to_string())?[0];
    let cf = closed_form_two_points(&m).map_err(|e| e.to_string())?;
    let cf_err = (0..2).flat_map(|j| (0..3).map(move |i| (j, i))).map(|(j, i)| (p[j][i] - cf.points.point(j)[i]).abs()).fold(0.0, f64::max);
    ensure(
        coef_err < 0.05 && angle < 0.1 && cf_err < 0.05 && secs < 60.0,
        format!("points ±{:.4}·e1, max coef err {coef_err:.4}, angle {angle:.4}, vs closed form {cf_err:.4}; {secs:.1}s", p[1][0]),
    )
}

fn mse_identity() -> Outcome {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    // g = 1 - (E|X|)^2 / Var X for symmetric two-point quantizers:
    // normal E|X| = sqrt(2/pi); t5 E|X| = 4 sqrt(5) / (3 pi), Var = 5/3
    for (mix, g_oracle) in [(ScaleMixture::Gaussian, 1.0 - 2.0 / PI), (t5(), 1.0 - 16.0 / (3.0 * PI * PI))] {
        let m = model(&[4.0, 1.0, 0.25], mix.clone());
        let g = g_constant(&m).map_err(|e| e.to_string())?;
        let cf = closed_form_two_points(&m).map_err(|e| e.to_string())?;
        let s = parallel::sample(&m, 200_000, 77);
        let emp = empirical_mse(&s, &cf.points).map_err(|e| e.to_string())?;
        let pred = m.covariance_trace() - (1.0 - g) * m.covariance_eigenvalues()[0];
        let rel = (emp - pred).abs() / pred;
        ok &= rel < 0.02 && (g - g_oracle).abs() < 1e-6;
        if matches!(mix, ScaleMixture::Gaussian) {
            ok &= (g - 0.36338).abs() < 1e-4;
        }
        lines.push(format!("{}: g {g:.6} (oracle {g_oracle:.6}), rel err {rel:.4}", m.mixture().label()));
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(ok && secs < 60.0, format!("{}; {secs:.1}s", lines.join("; ")))
}

fn unitary_equivariance() -> Outcome {
    let m = model(&[4.0, 1.0, 0.25], ScaleMixture::Gaussian);
    let s = parallel::sample(&m, 20_000, 5);
    let settings = LloydSettings::default();
    let (pts, _) = parallel::lloyd(&s, &settings.options(3, 5)).map_err(|e| e.to_string())?;
    let u = random_orthogonal(3, 99);
    let nu = HilbertVector::new(vec![1.0, -0.5, 2.0]);
    let r = check_unitary_equivariance(&s, &pts, &nu, 2.0, &u, &settings).map_err(|e| e.to_string())?;
    let worst = |name: &str| r.residuals.iter().find(|x| x.name == name).map_or(f64::NAN, |x| x.value);
    let (res, mse) = (worst("residual_scaling_error"), worst("mse_ratio_error"));
    ensure(r.pass && res <= 1e-10 && mse <= 1e-10, format!("|mse'/mse - 4| = {mse:.1e}, residual scaling error {res:.1e}"))
}

fn kernel_orthogonality() -> Outcome {
    let m = model(&[2.0, 1.0, 0.0, 0.0], ScaleMixture::Gaussian);
    let s = parallel::sample(&m, 50_000, 3);
    let mut worst: f64 = 0.0;
    for k in 2..=4 {
        let (pts, _) = parallel::lloyd(&s, &LloydOptions::new(k).with_seed(3)).map_err(|e| e.to_string())?;
        for p in pts.rows() {
            worst = worst.max(p[2].abs()).max(p[3].abs());
        }
    }
    ensure(worst < 1e-12, format!("max kernel coefficient {worst:.1e} over k = 2..4"))
}

fn conditional_linearity() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let split = SubspaceSplit::canonical(1, 3).unwrap();
    for mix in [ScaleMixture::Gaussian, t5()] {
        let m = model(&[4.0, 1.0, 0.25], mix);
        let rotated = m.rotated(&random_orthogonal(3, 11)).map_err(|e| e.to_string())?;
        let r = check_conditional_linearity(&rotated, &split, 200_000, 13).map_err(|e| e.to_string())?;
        let a = check_conditional_linearity(&m.to_law(), &split, 200_000, 13).map_err(|e| e.to_string())?;
        let get = |r: &VerificationReport, n: &str| r.residuals.iter().find(|x| x.name == n).map_or(f64::NAN, |x| x.value);
        let frob = get(&r, "slope_relative_frobenius");
        let z = get(&a, "slope_norm_over_se");
        ok &= frob <= 0.05 && z < 4.0 && r.pass && a.pass;
        lines.push(format!("{}: rotated rel err {frob:.4}, aligned {z:.2} SE", m.mixture().label()));
    }
    ensure(ok, lines.join("; "))
}

fn ratio_invariance() -> Outcome {
    let rhos = [0.5, 1.0, 2.0, 10.0];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for law in [UnivariateLaw::standard_normal(), UnivariateLaw::Uniform { lo: 0.0, hi: 1.0 }] {
        let r = check_ratio_invariance(&law, &rhos, 2).map_err(|e| e.to_string())?;
        worst = worst.max(r.residuals[0].value);
        ok &= r.pass;
    }
    ensure(ok && worst <= 1e-6, format!("max spread of D(2)/Var {worst:.1e}"))
}

fn dimension_and_hull() -> Outcome {
    let profiles: [&[f64]; 3] = [&[4.0, 1.0, 0.25], &[1.0, 1.0, 1.0], &[1.0, 0.0]];
    let mut runs = 0;
    let mut bad = Vec::new();
    let mut worst_hull: f64 = 0.0;
    for mix in [ScaleMixture::Gaussian, t5()] {
        for lam in profiles {
            let m = model(lam, mix.clone());
            let s = parallel::sample(&m, 100_000, 8);
            for k in [2, 3] {
                let (pts, _) = parallel::lloyd(&s, &LloydSettings::default().options(k, 8)).map_err(|e| e.to_string())?;
                let tol = 1e-3 * m.covariance_trace().sqrt();
                let hull = check_convex_hull(&s, &pts, tol);
                let dim = check_dimension_bound(&s, &pts);
                worst_hull = worst_hull.max(hull.residuals[0].value / tol);
                runs += 1;
                if !(hull.pass && dim.status == Status::Pass) {
                    bad.push(format!("{} k={k}", m.spec(8).label()));
                }
            }
        }
    }
    ensure(bad.is_empty(), format!("{runs} runs, worst hull residual {worst_hull:.1e} of tolerance, failures {bad:?}"))
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ppoints");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let model = r#""model": {"d": 3, "mu": [0, 1, 0], "lambda": [4, 1, 0.25], "mixture": {"kind": "student_t", "nu": 5}}"#;
    let basis = r#""basis": {"family": "fourier", "dimension": 3}"#;
    let configs = [
        ("simulate", format!("{{{model}, \"n\": 200, \"seed\": 1, {basis}}}")),
        ("estimate", format!("{{{model}, \"n\": 5000, \"seed\": 2, {basis}}}")),
        ("kmeans", format!("{{{model}, \"n\": 5000, \"k\": 3, \"restarts\": 4, \"seed\": 3, {basis}}}")),
        ("closed-form", format!("{{{model}, {basis}}}")),
        ("verify", format!("{{{model}, \"n\": 4000, \"k\": 2, \"restarts\": 3, \"seed\": 4}}")),
    ];
    let mut checked = 0;
    for (task, cfg) in &configs {
        let path = tmp.path().join(format!("{task}.json"));
        fs::write(&path, cfg).unwrap();
        let mut outputs = Vec::new();
        for jobs in ["1", "3", "1"] {
            let out = tmp.path().join(format!("{task}-{jobs}-{}", outputs.len()));
            let st = Command::new(bin)
                .args([task, "--config"])
                .arg(&path)
                .arg("--out")
                .arg(&out)
                .args(["--jobs", jobs])
                .output()
                .map_err(|e| e.to_string())?;
            if st.status.code() == Some(2) || st.status.code() == Some(3) {
                return Err(format!("{task} exited {:?}: {}", st.status.code(), String::from_utf8_lossy(&st.stderr)));
            }
            outputs.push(files_in(&out));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{task}: outputs differ between runs"));
        }
        checked += outputs[0].len();
        if *task == "verify" {
            let v = tmp.path().join("verify-1-0").join("verification.json");
            let rep_out = tmp.path().join("report");
            let st = Command::new(bin).arg("report").arg(&v).arg("--out").arg(&rep_out).output().map_err(|e| e.to_string())?;
            if !st.status.success() {
                return Err("report failed".into());
            }
            checked += files_in(&rep_out).len();
        }
    }
    Ok(format!("{checked} output files byte-identical across repeated runs and --jobs 1 / 3"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("univariate oracle agreement", univariate_oracle),
        ("two-point closed form end to end", closed_form_end_to_end),
        ("mse identity", mse_identity),
        ("unitary equivariance", unitary_equivariance),
        ("kernel orthogonality", kernel_orthogonality),
        ("conditional linearity", conditional_linearity),
        ("ratio invariance", ratio_invariance),
        ("dimension bound and convex hull", dimension_and_hull),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("acceptance {} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("acceptance {} FAIL {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
