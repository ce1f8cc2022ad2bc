//! Summary tables over verification files.

use std::cmp::Ordering;

use ppoints_core::verify::{Status, VerificationReport};
use serde::{Deserialize, Serialize};

use crate::format::fmt_num;

pub const COLUMNS: [&str; 7] = ["name", "model", "n", "seed", "residual", "tol", "pass"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub model: String,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    /// The residual closest to (or furthest past) its tolerance.
    pub residual: Option<f64>,
    pub tol: Option<f64>,
    pub pass: String,
}

impl Row {
    pub fn from_report(r: &VerificationReport) -> Self {
        let worst = r.worst_residual();
        Self {
            name: r.check.clone(),
            model: r.subject_label(),
            n: r.parameters.n,
            seed: r.parameters.seed,
            residual: worst.map(|w| w.value),
            tol: worst.map(|w| w.tol),
            pass: match r.status {
                Status::Pass => "true",
                Status::Fail => "false",
                Status::Indeterminate => "indeterminate",
            }
            .into(),
        }
    }

    pub fn cells(&self) -> Vec<String> {
        let opt = |x: Option<String>| x.unwrap_or_default();
        vec![
            self.name.clone(),
            self.model.clone(),
            opt(self.n.map(|n| n.to_string())),
            opt(self.seed.map(|s| s.to_string())),
            opt(self.residual.map(fmt_num)),
            opt(self.tol.map(fmt_num)),
            self.pass.clone(),
        ]
    }
}

/// One row per report. A single file keeps its order; several files are
/// merged and sorted by `(name, seed)`, ties kept in input order.
pub fn rows(files: &[Vec<VerificationReport>]) -> Vec<Row> {
    let mut rows: Vec<Row> = files.iter().flatten().map(Row::from_report).collect();
    if files.len() > 1 {
        rows.sort_by(|a, b| match a.name.cmp(&b.name) {
            Ordering::Equal => a.seed.cmp(&b.seed),
            o => o,
        });
    }
    rows
}

pub fn markdown(rows: &[Row]) -> String {
    let mut s = String::new();
    s.push_str(&format!("| {} |\n", COLUMNS.join(" | ")));
    s.push_str(&format!("|{}\n", "---|".repeat(COLUMNS.len())));
    for r in rows {
        let cells: Vec<String> = r.cells().into_iter().map(|c| c.replace('|', "\\|")).collect();
        s.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    s
}

pub fn csv(rows: &[Row]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record(r.cells()).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}
