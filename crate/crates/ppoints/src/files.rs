//! On-disk formats and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ppoints_core::verify::VerificationReport;
use ppoints_core::{CovarianceEstimate, HilbertVector, PointSet, SampleMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::{fmt_num, to_json};

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::io(path, e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let s = to_json(value).map_err(|e| CliError::Runtime(format!("serializing {}: {e}", path.display())))?;
    write_atomic(path, s.as_bytes())
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Runtime(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(format!("csv: {e}")))
}

/// Samples CSV: header `c1..cd`, one row per draw.
pub fn write_samples(path: &Path, s: &SampleMatrix) -> Result<(), CliError> {
    let header: Vec<String> = (1..=s.d()).map(|i| format!("c{i}")).collect();
    let bytes = csv_bytes(&header, s.rows().map(|r| r.iter().map(|x| fmt_num(*x)).collect()))?;
    write_atomic(path, &bytes)
}

pub fn read_samples(path: &Path) -> Result<SampleMatrix, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    let d = r.headers().map_err(|e| CliError::input(path, e))?.len();
    let mut data = Vec::new();
    let mut n = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(path, e))?;
        for cell in rec.iter() {
            let x: f64 = cell
                .trim()
                .parse()
                .map_err(|_| CliError::Schema(format!("{}:{}: not a number: {cell:?}", path.display(), i + 2)))?;
            data.push(x);
        }
        n += 1;
    }
    SampleMatrix::new(n, d, data).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

/// Curve CSV: header `t,value`.
pub fn write_curve(path: &Path, curve: &[(f64, f64)]) -> Result<(), CliError> {
    let header = ["t".to_string(), "value".to_string()];
    let bytes = csv_bytes(&header, curve.iter().map(|(t, y)| vec![fmt_num(*t), fmt_num(*y)]))?;
    write_atomic(path, &bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateFile {
    pub mean: Vec<f64>,
    pub eigvals: Vec<f64>,
    /// One eigenvector per entry, in eigenvalue order.
    pub eigvecs: Vec<Vec<f64>>,
    pub n: usize,
}

impl From<&CovarianceEstimate> for EstimateFile {
    fn from(e: &CovarianceEstimate) -> Self {
        Self {
            mean: e.mean_hat.clone(),
            eigvals: e.eigvals.clone(),
            eigvecs: (0..e.eigvals.len()).map(|k| e.eigvec(k)).collect(),
            n: e.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetFile {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub mse: f64,
    /// `null` when some domain of attraction is empty.
    pub residual: Option<f64>,
}

impl PointSetFile {
    pub fn new(points: &PointSet, mse: f64, residual: f64) -> Self {
        Self {
            k: points.k(),
            points: points.rows(),
            mse,
            residual: residual.is_finite().then_some(residual),
        }
    }

    pub fn point_set(&self) -> Result<PointSet, CliError> {
        PointSet::new(self.points.iter().cloned().map(HilbertVector::new).collect())
            .map_err(|e| CliError::Schema(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub task: String,
    pub config_sha256: String,
    pub seed: u64,
    /// Files written by the run, relative to the output directory.
    pub files: Vec<String>,
}

pub fn read_reports(path: &Path) -> Result<Vec<VerificationReport>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Schema(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })
}

/// Output directory tracker that remembers the files it was asked to write.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> Vec<String> {
        let mut w = self.written.clone();
        w.sort();
        w.dedup();
        w
    }
}
