use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::checks::*;
use super::VerificationReport;
use crate::elliptical::{ModelSpec, ScaleMixture};
use crate::error::Result;
use crate::function_space::{random_orthogonal, HilbertVector, SubspaceSplit};
use crate::lloyd::lloyd;
use crate::univariate::UnivariateLaw;

pub const DEFAULT_RHOS: [f64; 4] = [0.5, 1.0, 2.0, 10.0];
pub const DEFAULT_REFERENCE_N: usize = 200_000;
/// Scaling factor used by the equivariance check in generated suites.
pub const EQUIVARIANCE_RHO: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ConvexHull,
    UnitaryEquivariance,
    KernelOrthogonality,
    EigenSpan,
    DimensionBound,
    ProjectionSelfConsistency,
    ConditionalLinearity,
    RatioInvariance,
    MseIdentity,
    ClosedFormAgreement,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::ConvexHull,
        CheckKind::UnitaryEquivariance,
        CheckKind::KernelOrthogonality,
        CheckKind::EigenSpan,
        CheckKind::DimensionBound,
        CheckKind::ProjectionSelfConsistency,
        CheckKind::ConditionalLinearity,
        CheckKind::RatioInvariance,
        CheckKind::MseIdentity,
        CheckKind::ClosedFormAgreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::ConvexHull => "convex_hull",
            CheckKind::UnitaryEquivariance => "unitary_equivariance",
            CheckKind::KernelOrthogonality => "kernel_orthogonality",
            CheckKind::EigenSpan => "eigen_span",
            CheckKind::DimensionBound => "dimension_bound",
            CheckKind::ProjectionSelfConsistency => "projection_self_consistency",
            CheckKind::ConditionalLinearity => "conditional_linearity",
            CheckKind::RatioInvariance => "ratio_invariance",
            CheckKind::MseIdentity => "mse_identity",
            CheckKind::ClosedFormAgreement => "closed_form_agreement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// What a job runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Model(ModelSpec),
    Law(UnivariateLaw),
}

/// One self-contained check invocation. Jobs carry their own seed so they can
/// run in any order or in parallel.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckJob {
    pub kind: CheckKind,
    pub subject: Subject,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub settings: LloydSettings,
    /// Conditional linearity: rotate the law so the split is not aligned with
    /// its eigenvectors.
    pub rotate: bool,
    pub rhos: Vec<f64>,
}

impl CheckJob {
    pub fn on_model(kind: CheckKind, spec: ModelSpec, n: usize, k: usize, seed: u64) -> Self {
        Self {
            kind,
            subject: Subject::Model(spec),
            n,
            k,
            seed,
            settings: LloydSettings::default(),
            rotate: false,
            rhos: DEFAULT_RHOS.to_vec(),
        }
    }

    pub fn on_law(law: UnivariateLaw, k: usize) -> Self {
        Self {
            kind: CheckKind::RatioInvariance,
            subject: Subject::Law(law),
            n: 0,
            k,
            seed: 0,
            settings: LloydSettings::default(),
            rotate: false,
            rhos: DEFAULT_RHOS.to_vec(),
        }
    }

    pub fn with_settings(mut self, settings: LloydSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn rotated(mut self, rotate: bool) -> Self {
        self.rotate = rotate;
        self
    }

    /// Sort key used to order reports.
    pub fn label(&self) -> String {
        match &self.subject {
            Subject::Model(m) => m.label(),
            Subject::Law(l) => VerificationReport::new("").with_law(l.clone()).subject_label(),
        }
    }
}

/// Run a job. Errors become a failed report carrying the error text.
pub fn run_job(job: &CheckJob) -> VerificationReport {
    let report = match run_inner(job) {
        Ok(r) => r,
        Err(e) => VerificationReport::new(job.kind.name()).failed(&e.to_string()),
    };
    let report = match &job.subject {
        Subject::Model(m) => {
            let mut spec = m.clone();
            spec.seed = job.seed;
            report.with_model(spec)
        }
        Subject::Law(l) => report.with_law(l.clone()),
    };
    let n = if job.kind == CheckKind::RatioInvariance { None } else { Some(job.n) };
    let seed = if job.kind == CheckKind::RatioInvariance { None } else { Some(job.seed) };
    let report = report.with_run(n, seed, Some(job.k));
    if job.kind == CheckKind::ConditionalLinearity {
        report.note(if job.rotate { "rotated split" } else { "eigen-aligned split" })
    } else {
        report
    }
}

fn run_inner(job: &CheckJob) -> Result<VerificationReport> {
    let spec = match &job.subject {
        Subject::Law(law) => {
            return match job.kind {
                CheckKind::RatioInvariance => check_ratio_invariance(law, &job.rhos, job.k),
                other => Err(crate::Error::Usage(alloc::format!(
                    "check {} needs a model, not a univariate law",
                    other.name()
                ))),
            };
        }
        Subject::Model(s) => s,
    };
    let model = spec.build()?;
    let (n, k, seed, st) = (job.n, job.k, job.seed, &job.settings);
    let fitted = || -> Result<_> {
        let samples = model.sample(n, seed);
        let (pts, _) = lloyd(&samples, &st.options(k, seed))?;
        Ok((samples, pts))
    };
    match job.kind {
        CheckKind::ConvexHull => {
            let (samples, pts) = fitted()?;
            let tol = 1e-3 * libm::sqrt(model.covariance_trace());
            Ok(check_convex_hull(&samples, &pts, tol))
        }
        CheckKind::UnitaryEquivariance => {
            let (samples, pts) = fitted()?;
            let d = model.dim();
            let u = random_orthogonal(d, seed);
            let nu = HilbertVector::new((0..d).map(|i| 0.5 - 0.25 * i as f64).collect());
            check_unitary_equivariance(&samples, &pts, &nu, EQUIVARIANCE_RHO, &u, st)
        }
        CheckKind::KernelOrthogonality => check_kernel_orthogonality(&model, k, n, seed, st, KERNEL_TOL),
        CheckKind::EigenSpan => check_eigen_span(&model.to_law(), k, None, n, seed, st),
        CheckKind::DimensionBound => {
            let (samples, pts) = fitted()?;
            Ok(check_dimension_bound(&samples, &pts))
        }
        CheckKind::ProjectionSelfConsistency => {
            let (samples, pts) = fitted()?;
            check_projection_self_consistency(&samples, &pts, st)
        }
        CheckKind::ConditionalLinearity => {
            let d = model.dim();
            if d < 2 {
                return Ok(VerificationReport::new("conditional_linearity")
                    .indeterminate("dimension 1 has no proper split"));
            }
            let law = if job.rotate {
                model.rotated(&random_orthogonal(d, seed))?
            } else {
                model.to_law()
            };
            let split = SubspaceSplit::canonical(1, d)?;
            check_conditional_linearity(&law, &split, n, seed)
        }
        CheckKind::RatioInvariance => {
            let law = model.projection_law(&HilbertVector::unit(model.dim(), 0))?;
            check_ratio_invariance(&law, &job.rhos, k)
        }
        CheckKind::MseIdentity => check_mse_identity(&model, &default_directions(model.dim()), n, seed),
        CheckKind::ClosedFormAgreement => check_closed_form_agreement(&model, n, seed, st),
    }
}

/// Jobs for `checks` on one model. Conditional linearity is run on both a
/// rotated and an eigen-aligned split.
pub fn model_suite(
    spec: &ModelSpec,
    checks: &[CheckKind],
    n: usize,
    k: usize,
    seed: u64,
    settings: LloydSettings,
) -> Vec<CheckJob> {
    let mut jobs = Vec::new();
    for &kind in checks {
        let base = CheckJob::on_model(kind, spec.clone(), n, k, seed).with_settings(settings);
        match kind {
            CheckKind::ConditionalLinearity => {
                jobs.push(base.clone().rotated(true));
                jobs.push(base);
            }
            CheckKind::MseIdentity | CheckKind::ClosedFormAgreement => {
                jobs.push(CheckJob { k: 2, ..base });
            }
            _ => jobs.push(base),
        }
    }
    jobs
}

fn reference_models(seed: u64) -> Vec<ModelSpec> {
    let mixtures = [ScaleMixture::Gaussian, ScaleMixture::StudentT { nu: 5.0 }];
    let profiles: [&[f64]; 3] = [&[4.0, 1.0, 0.25], &[1.0, 1.0, 1.0], &[1.0, 0.0]];
    let mut out = Vec::new();
    for mix in &mixtures {
        for lam in profiles {
            out.push(ModelSpec {
                d: lam.len(),
                mu: vec![0.0; lam.len()],
                lambda: lam.to_vec(),
                mixture: mix.clone(),
                seed,
            });
        }
    }
    out
}

/// The reference laws for ratio invariance.
pub fn reference_laws() -> Vec<UnivariateLaw> {
    vec![
        UnivariateLaw::standard_normal(),
        UnivariateLaw::Uniform { lo: 0.0, hi: 1.0 },
        UnivariateLaw::StudentT { nu: 5.0, loc: 0.0, scale: 1.0 },
    ]
}

/// Every check on the reference models: gaussian and t with 5 degrees of
/// freedom over the spectra `(4, 1, 0.25)`, `(1, 1, 1)` and `(1, 0)`, a
/// kernel model `(2, 1, 0, 0)`, and ratio invariance on three laws.
pub fn reference_suite(n: usize, seed: u64) -> Vec<CheckJob> {
    let settings = LloydSettings::default();
    let mut jobs = Vec::new();
    for spec in reference_models(seed) {
        let has_kernel = spec.lambda.contains(&0.0);
        let kinds: Vec<CheckKind> = CheckKind::ALL
            .into_iter()
            .filter(|c| *c != CheckKind::RatioInvariance)
            .filter(|c| has_kernel || *c != CheckKind::KernelOrthogonality)
            .collect();
        jobs.extend(model_suite(&spec, &kinds, n, 2, seed, settings));
        jobs.push(CheckJob::on_model(CheckKind::DimensionBound, spec.clone(), n, 3, seed));
    }
    let kernel = ModelSpec {
        d: 4,
        mu: vec![0.0; 4],
        lambda: vec![2.0, 1.0, 0.0, 0.0],
        mixture: ScaleMixture::Gaussian,
        seed,
    };
    jobs.push(CheckJob::on_model(CheckKind::KernelOrthogonality, kernel, n, 3, seed));
    for law in reference_laws() {
        for k in [2, 3] {
            jobs.push(CheckJob::on_law(law.clone(), k));
        }
    }
    jobs
}

