//! Executable checks of the structural results on principal points.
//!
//! A check never fails by returning an error for numerical reasons: it returns
//! a [`VerificationReport`] that lists every measured residual against its
//! tolerance. Errors are reserved for invalid inputs (for example a zero
//! scaling factor or a singular split).
//!
//! Tolerances fall in three classes: exact algebra (`1e-10`), quadrature
//! (`1e-6` to `1e-4`) and Monte Carlo (standard-error multiples or relative
//! percentages).

mod checks;
mod suite;

pub use checks::*;
pub use suite::*;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::elliptical::ModelSpec;
use crate::univariate::UnivariateLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TolClass {
    ExactAlgebra,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    /// Non-finite values serialize as `null` and read back as `+inf`.
    #[serde(with = "non_finite_as_null")]
    pub value: f64,
    pub tol: f64,
    pub class: TolClass,
}

impl Residual {
    pub fn passes(&self) -> bool {
        self.value <= self.tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not falsifiable on this input (degenerate spectrum, ambiguous rank,
    /// inapplicable model); excluded from the overall verdict.
    Indeterminate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<UnivariateLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: CheckParameters,
    pub residuals: Vec<Residual>,
    pub status: Status,
    /// `true` iff every residual is within tolerance and the check was not
    /// flagged indeterminate.
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall-clock seconds, filled in by drivers that can measure time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
}

impl VerificationReport {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.into(),
            parameters: CheckParameters::default(),
            residuals: Vec::new(),
            status: Status::Pass,
            pass: true,
            note: None,
            runtime_s: None,
        }
    }

    pub fn residual(mut self, name: &str, value: f64, tol: f64, class: TolClass) -> Self {
        self.residuals.push(Residual { name: name.into(), value, tol, class });
        self.settle()
    }

    pub fn indeterminate(mut self, note: &str) -> Self {
        self.status = Status::Indeterminate;
        self.pass = false;
        self.append_note(note);
        self
    }

    /// Record a failure that has no residual (for example an error raised
    /// while running the check).
    pub fn failed(mut self, note: &str) -> Self {
        self.status = Status::Fail;
        self.pass = false;
        self.append_note(note);
        self
    }

    pub fn note(mut self, note: &str) -> Self {
        self.append_note(note);
        self
    }

    pub fn with_model(mut self, spec: ModelSpec) -> Self {
        self.parameters.model = Some(spec);
        self
    }

    pub fn with_law(mut self, law: UnivariateLaw) -> Self {
        self.parameters.law = Some(law);
        self
    }

    pub fn with_run(mut self, n: Option<usize>, seed: Option<u64>, k: Option<usize>) -> Self {
        self.parameters.n = n.or(self.parameters.n);
        self.parameters.seed = seed.or(self.parameters.seed);
        self.parameters.k = k.or(self.parameters.k);
        self
    }

    /// Residual with the largest `value / tol` ratio.
    pub fn worst_residual(&self) -> Option<&Residual> {
        let ratio = |r: &Residual| {
            if r.tol > 0.0 {
                r.value / r.tol
            } else if r.value > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        };
        self.residuals.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }

    /// Short model or law description for summary tables.
    pub fn subject_label(&self) -> String {
        if let Some(m) = &self.parameters.model {
            return m.label();
        }
        if let Some(l) = &self.parameters.law {
            return law_label(l);
        }
        String::from("-")
    }

    fn append_note(&mut self, note: &str) {
        match &mut self.note {
            Some(n) => {
                n.push_str("; ");
                n.push_str(note);
            }
            None => self.note = Some(note.into()),
        }
    }

    fn settle(mut self) -> Self {
        if self.status == Status::Indeterminate {
            return self;
        }
        let ok = self.residuals.iter().all(Residual::passes);
        if !ok {
            self.status = Status::Fail;
        }
        self.pass = self.status == Status::Pass;
        self
    }
}

fn law_label(l: &UnivariateLaw) -> String {
    use alloc::format;
    match l {
        UnivariateLaw::Normal { mean, sd } => format!("normal(mean={mean},sd={sd})"),
        UnivariateLaw::Uniform { lo, hi } => format!("uniform({lo},{hi})"),
        UnivariateLaw::StudentT { nu, loc, scale } => format!("student_t(nu={nu},loc={loc},scale={scale})"),
        UnivariateLaw::NormalScaleMixture { weights, .. } => format!("normal_scale_mixture({})", weights.len()),
        UnivariateLaw::Discrete { atoms, .. } => format!("discrete({})", atoms.len()),
    }
}

mod non_finite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
