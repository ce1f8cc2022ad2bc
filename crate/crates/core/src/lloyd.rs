//! Lloyd's algorithm for self-consistent point sets of an empirical law.
//!
//! Each iteration assigns samples to their nearest point (ties to the lowest
//! index) and replaces every point by the mean of its domain of attraction.
//! A point whose domain empties is re-seeded to the sample farthest from the
//! current set, so `k` never shrinks. Independent restarts are seeded from
//! `(seed, restart)` and the restart with the lowest final mse wins, ties going
//! to the lower restart index.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{bail, Result};
use crate::function_space::{check_dim, sq_dist, HilbertVector};
use crate::points::{self, nearest, PointSet};
use crate::rng;
use crate::samples::SampleMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// k-means++ seeding: first point uniform over the samples, every further
    /// point drawn with probability proportional to its squared distance to
    /// the points chosen so far.
    FarthestSeeding,
    /// Start from the given set; a single run regardless of `restarts`.
    User(PointSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydOptions {
    pub k: usize,
    pub init: Init,
    /// Stop once every point moves less than `tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl LloydOptions {
    pub fn new(k: usize) -> Self {
        Self { k, init: Init::FarthestSeeding, tol: 1e-10, max_iter: 1000, restarts: 10, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_init(mut self, init: PointSet) -> Self {
        self.init = Init::User(init);
        self
    }

    /// Number of independent runs these options ask for.
    pub fn run_count(&self) -> usize {
        match self.init {
            Init::User(_) => 1,
            Init::FarthestSeeding => self.restarts.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydReport {
    pub iterations: usize,
    pub final_mse: f64,
    pub self_consistency_residual: f64,
    /// Number of runs compared.
    pub restarts_used: usize,
    /// Index of the winning run.
    pub best_restart: usize,
    pub converged: bool,
    /// Assignment-phase mse of every iteration followed by the final mse.
    pub mse_history: Vec<f64>,
    pub reseeds: usize,
    pub collapsed: bool,
}

fn validate(samples: &SampleMatrix, opts: &LloydOptions) -> Result<()> {
    if opts.k == 0 {
        bail!(Usage, "k must be at least 1");
    }
    if samples.n() < opts.k {
        return Err(crate::Error::InsufficientData { needed: opts.k, got: samples.n() });
    }
    if !(opts.tol > 0.0) {
        bail!(Usage, "tolerance must be positive, got {}", opts.tol);
    }
    if let Init::User(p) = &opts.init {
        if p.k() != opts.k {
            bail!(Usage, "initial set has {} points but k = {}", p.k(), opts.k);
        }
        check_dim(samples.d(), p.dim())?;
    }
    Ok(())
}

/// Best of [`LloydOptions::run_count`] runs, evaluated one after the other.
pub fn lloyd(samples: &SampleMatrix, opts: &LloydOptions) -> Result<(PointSet, LloydReport)> {
    validate(samples, opts)?;
    let runs = (0..opts.run_count())
        .map(|r| lloyd_run(samples, opts, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(runs))
}

/// Winner among runs indexed in order: lowest final mse, then lowest index.
pub fn select_best(runs: Vec<(PointSet, LloydReport)>) -> (PointSet, LloydReport) {
    let total = runs.len();
    let mut best: Option<(PointSet, LloydReport)> = None;
    for (i, (p, mut rep)) in runs.into_iter().enumerate() {
        rep.best_restart = i;
        let better = match &best {
            None => true,
            Some((_, b)) => rep.final_mse < b.final_mse,
        };
        if better {
            best = Some((p, rep));
        }
    }
    let (p, mut rep) = best.expect("at least one run");
    rep.restarts_used = total;
    (p, rep)
}

/// Single run number `restart`, seeded independently of every other run.
pub fn lloyd_run(samples: &SampleMatrix, opts: &LloydOptions, restart: usize) -> Result<(PointSet, LloydReport)> {
    validate(samples, opts)?;
    let mut current = match &opts.init {
        Init::User(p) => p.clone(),
        Init::FarthestSeeding => {
            let mut r = rng::stream(opts.seed, rng::RESTART, restart as u64);
            seed_points(samples, opts.k, &mut r)
        }
    };
    let n = samples.n();
    let d = samples.d();
    let k = opts.k;
    let mut history = Vec::new();
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut reseeds = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        let mut total = 0.0;
        for (j, r) in samples.rows().enumerate() {
            let (d2, c) = nearest(r, &current);
            labels[j] = c;
            dists[j] = d2;
            total += d2;
            counts[c] += 1;
            for (s, x) in sums[c * d..(c + 1) * d].iter_mut().zip(r) {
                *s += x;
            }
        }
        history.push(total / n as f64);

        let mut next: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                if counts[c] > 0 {
                    sums[c * d..(c + 1) * d].iter().map(|s| s / counts[c] as f64).collect()
                } else {
                    current.point(c).to_vec()
                }
            })
            .collect();
        let mut reseeded = false;
        for c in (0..k).filter(|&c| counts[c] == 0) {
            // farthest sample from the set as it stands, then refresh distances
            let far = argmax(&dists);
            next[c] = samples.row(far).to_vec();
            for (j, r) in samples.rows().enumerate() {
                dists[j] = dists[j].min(sq_dist(r, &next[c]));
            }
            reseeds += 1;
            reseeded = true;
        }
        let shift = next
            .iter()
            .zip(current.points())
            .map(|(a, b)| libm::sqrt(sq_dist(a, b.coeffs())))
            .fold(0.0, f64::max);
        current = PointSet::new(next.into_iter().map(HilbertVector::new).collect())?;
        if !reseeded && shift < opts.tol {
            converged = true;
            break;
        }
    }
    let sc = points::self_consistency(samples, &current)?;
    let final_mse = points::empirical_mse(samples, &current)?;
    history.push(final_mse);
    let collapsed = current.is_collapsed();
    let report = LloydReport {
        iterations,
        final_mse,
        self_consistency_residual: sc.residual,
        restarts_used: 1,
        best_restart: restart,
        converged,
        mse_history: history,
        reseeds,
        collapsed,
    };
    Ok((current, report))
}

fn argmax(v: &[f64]) -> usize {
    let mut idx = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[idx] {
            idx = i;
        }
    }
    idx
}

/// k-means++ seeding. Once every remaining sample coincides with a chosen
/// point the farthest sample (lowest index) is taken instead.
pub fn seed_points(samples: &SampleMatrix, k: usize, rng: &mut ChaCha8Rng) -> PointSet {
    let n = samples.n();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = samples.rows().map(|r| sq_dist(r, samples.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (j, w) in d2.iter().enumerate() {
                acc += w;
                if *w > 0.0 && acc > target {
                    pick = Some(j);
                    break;
                }
            }
            pick.unwrap_or_else(|| argmax(&d2))
        } else {
            argmax(&d2)
        };
        chosen.push(next);
        let c = samples.row(next);
        for (j, r) in samples.rows().enumerate() {
            d2[j] = d2[j].min(sq_dist(r, c));
        }
    }
    PointSet::new(chosen.iter().map(|&j| HilbertVector::new(samples.row(j).to_vec())).collect())
        .expect("k >= 1 sample rows")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_samples() -> SampleMatrix {
        let rows: Vec<[f64; 2]> =
            (0..40).map(|i| [(i % 8) as f64 * 0.5 - 2.0, (i / 8) as f64 * 0.3 - 0.6]).collect();
        SampleMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn single_point_is_the_sample_mean() {
        let s = grid_samples();
        let (p, rep) = lloyd(&s, &LloydOptions::new(1).with_seed(3)).unwrap();
        let m = s.mean();
        assert!(sq_dist(p.point(0), &m) < 1e-28);
        assert_eq!(rep.self_consistency_residual, 0.0);
        assert!(rep.converged);
    }

    #[test]
    fn k_equal_n_quantizes_perfectly() {
        let s = SampleMatrix::from_rows(&[[0.0, 1.0], [3.0, -1.0], [2.0, 2.0], [-4.0, 0.5]]).unwrap();
        let (p, rep) = lloyd(&s, &LloydOptions::new(4).with_seed(1)).unwrap();
        assert_eq!(rep.final_mse, 0.0);
        let mut rows = p.rows();
        rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(rows[0], vec![-4.0, 0.5]);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let s = SampleMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(lloyd(&s, &LloydOptions::new(3)), Err(crate::Error::InsufficientData { .. })));
        assert!(lloyd(&s, &LloydOptions::new(1).with_tol(0.0)).is_err());
    }

    #[test]
    fn empty_domain_is_reseeded_not_dropped() {
        let s = SampleMatrix::from_rows(&[[0.0], [0.1], [5.0], [5.1]]).unwrap();
        let init = PointSet::from_rows(&[vec![0.05], vec![100.0]]).unwrap();
        let (p, rep) = lloyd(&s, &LloydOptions::new(2).with_init(init)).unwrap();
        assert_eq!(p.k(), 2);
        assert!(rep.reseeds >= 1);
        let mut xs: Vec<f64> = p.rows().iter().map(|r| r[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] - 0.05).abs() < 1e-12 && (xs[1] - 5.05).abs() < 1e-12);
    }

    #[test]
    fn runs_are_reproducible_and_history_monotone() {
        let s = grid_samples();
        let opts = LloydOptions::new(3).with_seed(9).with_restarts(4);
        let a = lloyd(&s, &opts).unwrap();
        assert_eq!(a, lloyd(&s, &opts).unwrap());
        for w in a.1.mse_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert_eq!(a.1.restarts_used, 4);
    }

    #[test]
    fn best_run_matches_individual_runs() {
        let s = grid_samples();
        let opts = LloydOptions::new(3).with_seed(2).with_restarts(5);
        let (_, best) = lloyd(&s, &opts).unwrap();
        let min = (0..5).map(|r| lloyd_run(&s, &opts, r).unwrap().1.final_mse).fold(f64::INFINITY, f64::min);
        assert_eq!(best.final_mse, min);
    }
}
