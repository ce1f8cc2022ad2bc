//! Task runners behind the CLI commands.

use std::path::PathBuf;

use ppoints_core::verify::{model_suite, reference_suite, LloydSettings, Status, DEFAULT_REFERENCE_N};
use ppoints_core::{
    closed_form_two_points, estimate, make_basis, Basis, HilbertVector, LloydOptions, PointSet, SampleMatrix,
};

use crate::config::{LoadedConfig, Suite, Task};
use crate::error::CliError;
use crate::files::{self, EstimateFile, Manifest, OutDir, PointSetFile};
use crate::parallel;
use crate::report;

/// Per-invocation settings that are not part of the config identity.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    /// Extra report inputs given on the command line.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub out: PathBuf,
    pub files: Vec<String>,
    /// Number of checks with status `fail`.
    pub failed_checks: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed_checks > 0)
    }
}

const CURVE_LIMIT: usize = 5;

pub fn run(task: Task, cfg: &LoadedConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    if let Some(t) = cfg.config.task {
        if t != task {
            return Err(cfg.error_at("task", format!("config is for `{}`, not `{}`", t.name(), task.name())));
        }
    }
    let seed = cfg.effective_seed(opts.seed);
    let out_path = match (&opts.out, &cfg.config.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => cfg.resolve(o),
        (None, None) => PathBuf::from("out"),
    };
    let basis = match &cfg.config.basis {
        Some(b) => Some(make_basis(b).map_err(|e| cfg.error_at("basis", e))?),
        None => None,
    };
    let pool = parallel::pool(opts.jobs);
    let mut out = OutDir::create(&out_path)?;
    let failed = pool.install(|| -> Result<usize, CliError> {
        match task {
            Task::Simulate => simulate(cfg, seed, basis.as_ref(), &mut out).map(|_| 0),
            Task::Estimate => estimate_task(cfg, seed, basis.as_ref(), &mut out).map(|_| 0),
            Task::Kmeans => kmeans(cfg, seed, basis.as_ref(), &mut out).map(|_| 0),
            Task::ClosedForm => closed_form(cfg, basis.as_ref(), &mut out).map(|_| 0),
            Task::Verify => verify(cfg, seed, &mut out),
            Task::Report => report_task(cfg, opts, &mut out).map(|_| 0),
        }
    })?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        task: task.name().into(),
        config_sha256: cfg.sha256(task, seed),
        seed,
        files: out.written(),
    };
    let files = out.written();
    files::write_json(&out.path("manifest.json"), &manifest)?;
    Ok(Outcome { out: out_path, files, failed_checks: failed })
}

fn check_basis_dim(cfg: &LoadedConfig, basis: Option<&Basis>, d: usize) -> Result<(), CliError> {
    match basis {
        Some(b) if b.dimension() != d => {
            Err(cfg.error_at("basis", format!("dimension {} does not match the data dimension {d}", b.dimension())))
        }
        _ => Ok(()),
    }
}

fn write_curve(out: &mut OutDir, basis: &Basis, name: &str, coeffs: &[f64]) -> Result<(), CliError> {
    let curve = basis.curve(&HilbertVector::new(coeffs.to_vec()))?;
    files::write_curve(&out.path(name), &curve)
}

fn simulate(cfg: &LoadedConfig, seed: u64, basis: Option<&Basis>, out: &mut OutDir) -> Result<(), CliError> {
    let model = cfg.model()?;
    let n = cfg.require_n()?;
    check_basis_dim(cfg, basis, model.dim())?;
    let s = parallel::sample(&model, n, seed);
    files::write_samples(&out.path("samples.csv"), &s)?;
    if let Some(b) = basis {
        for j in 0..n.min(CURVE_LIMIT) {
            write_curve(out, b, &format!("curve_sample_{}.csv", j + 1), s.row(j))?;
        }
    }
    Ok(())
}

/// Samples from the declared CSV, or simulated from the model.
fn load_samples(cfg: &LoadedConfig, seed: u64) -> Result<SampleMatrix, CliError> {
    if let Some(p) = &cfg.config.samples {
        if cfg.config.model.is_some() || cfg.config.n.is_some() {
            return Err(cfg.error_at("samples", "give either a samples file or a model with n, not both"));
        }
        return files::read_samples(&cfg.resolve(p));
    }
    let model = cfg.model()?;
    let n = cfg.require_n()?;
    Ok(parallel::sample(&model, n, seed))
}

fn estimate_task(cfg: &LoadedConfig, seed: u64, basis: Option<&Basis>, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_samples(cfg, seed)?;
    check_basis_dim(cfg, basis, s.d())?;
    let est = estimate(&s).map_err(runtime)?;
    files::write_json(&out.path("estimate.json"), &EstimateFile::from(&est))?;
    if let Some(b) = basis {
        write_curve(out, b, "curve_mean.csv", &est.mean_hat)?;
        for k in 0..s.d().min(CURVE_LIMIT) {
            write_curve(out, b, &format!("curve_eigvec_{}.csv", k + 1), &est.eigvec(k))?;
        }
    }
    Ok(())
}

fn lloyd_options(cfg: &LoadedConfig, k: usize, seed: u64) -> Result<LloydOptions, CliError> {
    let c = &cfg.config;
    let d = LloydSettings::default();
    let tol = c.tol.unwrap_or(d.tol);
    if tol.is_nan() || tol <= 0.0 {
        return Err(cfg.error_at("tol", "must be positive"));
    }
    if c.max_iter == Some(0) {
        return Err(cfg.error_at("max_iter", "must be positive"));
    }
    Ok(LloydOptions::new(k)
        .with_seed(seed)
        .with_restarts(c.restarts.unwrap_or(d.restarts))
        .with_tol(tol)
        .with_max_iter(c.max_iter.unwrap_or(d.max_iter)))
}

fn write_points(
    out: &mut OutDir,
    basis: Option<&Basis>,
    points: &PointSet,
    mse: f64,
    residual: f64,
) -> Result<(), CliError> {
    files::write_json(&out.path("pointset.json"), &PointSetFile::new(points, mse, residual))?;
    if let Some(b) = basis {
        for j in 0..points.k() {
            write_curve(out, b, &format!("curve_point_{}.csv", j + 1), points.point(j))?;
        }
    }
    Ok(())
}

fn kmeans(cfg: &LoadedConfig, seed: u64, basis: Option<&Basis>, out: &mut OutDir) -> Result<(), CliError> {
    let k = match cfg.config.k {
        Some(k) if k > 0 => k,
        Some(_) => return Err(cfg.error_at("k", "must be positive")),
        None => return Err(cfg.error_at("k", "required for kmeans")),
    };
    if let Some(n) = cfg.config.n {
        if k > n {
            return Err(cfg.error_at("k", format!("k = {k} exceeds n = {n}")));
        }
    }
    let opts = lloyd_options(cfg, k, seed)?;
    let s = load_samples(cfg, seed)?;
    if k > s.n() {
        return Err(cfg.error_at("k", format!("k = {k} exceeds the {} samples", s.n())));
    }
    check_basis_dim(cfg, basis, s.d())?;
    let (points, rep) = parallel::lloyd(&s, &opts).map_err(runtime)?;
    let residual = rep.self_consistency_residual;
    write_points(out, basis, &points, rep.final_mse, residual)
}

fn closed_form(cfg: &LoadedConfig, basis: Option<&Basis>, out: &mut OutDir) -> Result<(), CliError> {
    let model = cfg.model()?;
    check_basis_dim(cfg, basis, model.dim())?;
    let cf = closed_form_two_points(&model).map_err(runtime)?;
    write_points(out, basis, &cf.points, cf.mse, cf.residual)
}

fn verify(cfg: &LoadedConfig, seed: u64, out: &mut OutDir) -> Result<usize, CliError> {
    let c = &cfg.config;
    let jobs = match c.suite {
        Some(Suite::Reference) => {
            if c.model.is_some() {
                return Err(cfg.error_at("suite", "the reference suite brings its own models; drop `model`"));
            }
            let n = c.n.unwrap_or(DEFAULT_REFERENCE_N);
            let mut jobs = reference_suite(n, seed);
            if c.checks.is_some() {
                let keep = cfg.checks()?;
                jobs.retain(|j| keep.contains(&j.kind));
            }
            jobs
        }
        None => {
            let model = cfg.model()?;
            let n = cfg.require_n()?;
            let k = c.k.unwrap_or(2);
            if k == 0 || k > n {
                return Err(cfg.error_at("k", format!("k must lie in 1..={n}")));
            }
            let defaults = LloydSettings::default();
            let settings = LloydSettings {
                restarts: c.restarts.unwrap_or(defaults.restarts),
                tol: c.tol.unwrap_or(defaults.tol),
                max_iter: c.max_iter.unwrap_or(defaults.max_iter),
            };
            let spec = model.spec(seed);
            model_suite(&spec, &cfg.checks()?, n, k, seed, settings)
        }
    };
    let results = parallel::run_jobs(&jobs);
    let mut reports = Vec::with_capacity(results.len());
    let mut failed = 0;
    for (r, secs) in results {
        if r.status == Status::Fail {
            failed += 1;
        }
        eprintln!("{:<28} {:<28} {:<13} {:.2}s", r.check, r.subject_label(), status_word(r.status), secs);
        reports.push(r);
    }
    files::write_json(&out.path("verification.json"), &reports)?;
    Ok(failed)
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Indeterminate => "indeterminate",
    }
}

fn report_task(cfg: &LoadedConfig, opts: &RunOptions, out: &mut OutDir) -> Result<(), CliError> {
    let mut inputs: Vec<PathBuf> = cfg.config.inputs.iter().flatten().map(|p| cfg.resolve(p)).collect();
    inputs.extend(opts.inputs.iter().cloned());
    let files = inputs.iter().map(|p| files::read_reports(p)).collect::<Result<Vec<_>, _>>()?;
    let rows = report::rows(&files);
    files::write_atomic(&out.path("report.md"), report::markdown(&rows).as_bytes())?;
    files::write_atomic(&out.path("report.csv"), &report::csv(&rows))?;
    Ok(())
}

/// Core errors after validation are numerical failures.
fn runtime(e: ppoints_core::Error) -> CliError {
    CliError::Runtime(e.to_string())
}
