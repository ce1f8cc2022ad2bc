use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};

/// Row-major `n x d` matrix of coefficient vectors, one draw per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 {
            bail!(Shape, "sample dimension must be at least 1");
        }
        if data.len() != n * d {
            bail!(Shape, "expected {} values for a {}x{} sample, got {}", n * d, n, d, data.len());
        }
        Ok(Self { n, d, data })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self { n, d, data: vec![0.0; n * d] }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            bail!(Shape, "cannot build a sample matrix from zero rows");
        };
        let d = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for (j, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                bail!(Shape, "row {} has length {}, expected {}", j, r.len(), d);
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), d, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.d..(j + 1) * self.d]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    /// Column means.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for r in self.rows() {
            for (acc, x) in m.iter_mut().zip(r) {
                *acc += x;
            }
        }
        let n = self.n.max(1) as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// New matrix whose rows are `f(row)`; all outputs must share one length.
    pub fn map_rows<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut data = Vec::new();
        let mut d_out = None;
        for r in self.rows() {
            let out = f(r);
            match d_out {
                None => d_out = Some(out.len()),
                Some(d) if d != out.len() => bail!(Shape, "row map produced ragged output"),
                _ => {}
            }
            data.extend(out);
        }
        Self::new(self.n, d_out.unwrap_or(self.d), data)
    }
}
