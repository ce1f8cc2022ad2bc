use ppoints::parallel;
use ppoints_core::verify::{reference_suite, run_job};
use ppoints_core::{lloyd, EllipticalModel, LloydOptions, ScaleMixture};

fn model() -> EllipticalModel {
    EllipticalModel::centered(vec![3.0, 1.0, 0.5], ScaleMixture::TwoPoint { z1: 0.5, z2: 1.5, p: 0.4 }).unwrap()
}

#[test]
fn parallel_sampling_matches_sequential() {
    let m = model();
    for threads in [1, 4] {
        let s = parallel::pool(Some(threads)).install(|| parallel::sample(&m, 3001, 17));
        assert_eq!(s, m.sample(3001, 17));
    }
}

#[test]
fn parallel_restarts_match_sequential() {
    let m = model();
    let s = m.sample(4000, 2);
    let opts = LloydOptions::new(4).with_seed(9).with_restarts(6);
    let seq = lloyd(&s, &opts).unwrap();
    for threads in [1, 3] {
        let par = parallel::pool(Some(threads)).install(|| parallel::lloyd(&s, &opts)).unwrap();
        assert_eq!(par, seq);
    }
}

#[test]
fn parallel_checks_keep_job_order() {
    let jobs: Vec<_> = reference_suite(3000, 4).into_iter().step_by(7).collect();
    let seq: Vec<_> = jobs.iter().map(run_job).collect();
    let par: Vec<_> = parallel::pool(Some(4)).install(|| parallel::run_jobs(&jobs)).into_iter().map(|r| r.0).collect();
    assert_eq!(par, seq);
}
