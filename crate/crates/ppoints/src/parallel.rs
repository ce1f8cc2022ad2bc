//! Rayon-backed versions of the core's sequential loops. Each unit of work
//! rebuilds its own random stream, so results do not depend on the pool size.

use std::time::Instant;

use ppoints_core::lloyd::{lloyd_run, select_best};
use ppoints_core::verify::{run_job, CheckJob, VerificationReport};
use ppoints_core::{EllipticalModel, LloydOptions, LloydReport, PointSet, Result, SampleMatrix};
use rayon::prelude::*;

pub fn pool(jobs: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().expect("thread pool")
}

pub fn sample(model: &EllipticalModel, n: usize, seed: u64) -> SampleMatrix {
    let d = model.dim();
    let mut data = vec![0.0; n * d];
    if d > 0 {
        data.par_chunks_mut(d).enumerate().for_each(|(j, row)| {
            row.copy_from_slice(&model.sample_row(seed, j as u64));
        });
    }
    SampleMatrix::new(n, d, data).expect("n * d entries")
}

pub fn lloyd(samples: &SampleMatrix, opts: &LloydOptions) -> Result<(PointSet, LloydReport)> {
    let runs = (0..opts.run_count())
        .into_par_iter()
        .map(|r| lloyd_run(samples, opts, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(runs))
}

/// Reports in job order, each with its wall-clock time in seconds.
pub fn run_jobs(jobs: &[CheckJob]) -> Vec<(VerificationReport, f64)> {
    jobs.par_iter()
        .map(|j| {
            let t = Instant::now();
            let r = run_job(j);
            (r, t.elapsed().as_secs_f64())
        })
        .collect()
}
