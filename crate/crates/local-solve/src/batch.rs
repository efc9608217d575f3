//! Replicated runs over a seed range, for estimating mean error and cost
//! curves of the randomized schedulers. With the `parallel` feature the
//! replications fan out over a rayon pool; the sequential path is always
//! available and produces identical output for the same seeds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::sched::{Scheduler, SchedulerKind};
use crate::solver::{self, NullSink, SolveResult, TerminationRule};
use crate::system::FixedPointSystem;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct BatchSpec {
    pub kind: SchedulerKind,
    pub base_seed: u64,
    pub replications: u64,
}

fn run_one(
    system: &FixedPointSystem,
    i: usize,
    spec: &BatchSpec,
    rule: &TerminationRule,
    rep: u64,
) -> Result<SolveResult> {
    let mut sched = Scheduler::new(spec.kind, spec.base_seed.wrapping_add(rep), &system.g, i)?;
    solver::run(system, i, &mut sched, rule, &mut NullSink, None)
}

/// Sequential replication sweep: seeds `base_seed..base_seed+replications`.
pub fn run_many_sequential(
    system: &FixedPointSystem,
    i: usize,
    spec: &BatchSpec,
    rule: &TerminationRule,
) -> Result<Vec<SolveResult>> {
    (0..spec.replications).map(|rep| run_one(system, i, spec, rule, rep)).collect()
}

/// Replication sweep over the rayon pool. Seed assignment matches the
/// sequential path, so results are identical up to ordering work, and the
/// returned vector is ordered by replication index either way.
#[cfg(feature = "parallel")]
pub fn run_many(
    system: &FixedPointSystem,
    i: usize,
    spec: &BatchSpec,
    rule: &TerminationRule,
) -> Result<Vec<SolveResult>> {
    (0..spec.replications)
        .into_par_iter()
        .map(|rep| run_one(system, i, spec, rule, rep))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_many(
    system: &FixedPointSystem,
    i: usize,
    spec: &BatchSpec,
    rule: &TerminationRule,
) -> Result<Vec<SolveResult>> {
    run_many_sequential(system, i, spec, rule)
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::NormKind;
    use crate::sparse::SparseMatrix;

    fn small_system() -> FixedPointSystem {
        let g = SparseMatrix::from_triplets(
            3,
            &[(0, 1, 0.4), (1, 2, 0.4), (2, 0, 0.4), (1, 0, 0.1)],
        )
        .unwrap();
        FixedPointSystem::new(g, vec![1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn parallel_matches_sequential() {
        let sys = small_system();
        let rule = TerminationRule::new(NormKind::L2, 1e-8, 100_000).unwrap();
        let spec =
            BatchSpec { kind: SchedulerKind::UniformCensored, base_seed: 42, replications: 16 };
        let seq = run_many_sequential(&sys, 0, &spec, &rule).unwrap();
        let par = run_many(&sys, 0, &spec, &rule).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a.estimate, b.estimate);
            assert_eq!(a.ledger, b.ledger);
            assert_eq!(a.reason, b.reason);
        }
    }

    #[test]
    fn mean_std_basics() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert!((m - 2.0).abs() < 1e-15);
        assert!((s - 1.0).abs() < 1e-15);
        let (m1, s1) = mean_std(&[5.0]);
        assert_eq!((m1, s1), (5.0, 0.0));
        assert!(mean_std(&[]).0.is_nan());
    }
}
