//! Logical simulator of asynchronous execution: a task queue, simulated
//! workers, configurable atomicity of the three update steps, and seeded
//! interleaving of the per-task micro-operations.
//!
//! Concurrency is modeled, not real: the simulator runs in one thread and
//! interleaves ready micro-operations by seeded uniform choice, preserving
//! program order within each task. Step 1 (the read-and-scale of `r_u`) is
//! always executed indivisibly; the additions of steps 2 and 3 commute, so
//! any interleaving reaches a well-defined state. Termination is evaluated
//! only at quiescent points, when no task is in flight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sched::{Draw, Scheduler};
use crate::solver::{
    apply_tick, check_termination, init_state, make_record, ResidualState, SolveResult,
    Termination, TerminationRule, TraceSink,
};
use crate::system::FixedPointSystem;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atomicity {
    /// Whole update tasks execute as single units.
    TaskAtomic,
    /// Only step 1 is indivisible; remaining additions interleave freely.
    Step1Atomic,
}

impl std::str::FromStr for Atomicity {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "task" => Ok(Atomicity::TaskAtomic),
            "step1" => Ok(Atomicity::Step1Atomic),
            other => Err(crate::Error::InvalidParam(format!("unknown atomicity '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub workers: usize,
    pub atomicity: Atomicity,
    pub interleave_seed: u64,
    pub max_tasks: u64,
}

/// Remaining micro-operations of one in-flight update task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MicroOp {
    /// READ `r_u` into the task-local `rho`, SET `r_u ← G_uu·rho`.
    ReadSetRu,
    /// ADD `rho·z_u` to the estimate.
    AddEstimate,
    /// ADD `G_uv·rho` to `r_v` for the neighbor at this row offset.
    AddNeighbor(usize),
}

struct InFlightTask {
    coordinate: usize,
    worker: usize,
    rho: f64,
    next_op: usize,
    ops: Vec<MicroOp>,
}

impl InFlightTask {
    fn new(system: &FixedPointSystem, u: usize, worker: usize) -> Self {
        let mut ops = vec![MicroOp::ReadSetRu, MicroOp::AddEstimate];
        for (off, &(v, _)) in system.g.row(u).iter().enumerate() {
            if v != u {
                ops.push(MicroOp::AddNeighbor(off));
            }
        }
        InFlightTask { coordinate: u, worker, rho: 0.0, next_op: 0, ops }
    }

    fn step(&mut self, state: &mut ResidualState, system: &FixedPointSystem) -> Result<bool> {
        let u = self.coordinate;
        match self.ops[self.next_op] {
            MicroOp::ReadSetRu => {
                self.rho = state.r.get(u);
                state.r.set(u, system.g.get(u, u) * self.rho)?;
            }
            MicroOp::AddEstimate => {
                state.estimate += self.rho * system.z[u];
            }
            MicroOp::AddNeighbor(off) => {
                let (v, g) = system.g.row(u)[off];
                state.r.add(v, g * self.rho)?;
            }
        }
        self.next_op += 1;
        Ok(self.next_op >= self.ops.len())
    }

    fn charge(&self, state: &mut ResidualState, system: &FixedPointSystem) {
        let fanout = system.g.row(self.coordinate).len() as u64;
        state.ledger.tasks += 1;
        state.ledger.dfs_reads += 1 + fanout;
        state.ledger.dfs_writes += 1 + fanout;
        state.ledger.multiplications += 1 + fanout;
    }
}

/// Run the solve under simulated asynchrony. With `task_atomic` (or a
/// single worker) the trace is identical to [`crate::solver::run`]; with
/// `step1_atomic` up to `workers` tasks are in flight at once and their
/// micro-operations interleave by seeded uniform choice.
pub fn simulate(
    system: &FixedPointSystem,
    i: usize,
    scheduler: &mut Scheduler,
    rule: &TerminationRule,
    cfg: &SimConfig,
    sink: &mut dyn TraceSink,
    oracle_x: Option<&[f64]>,
) -> Result<SolveResult> {
    assert!(cfg.workers >= 1, "workers must be >= 1");
    let rule = TerminationRule { max_tasks: rule.max_tasks.min(cfg.max_tasks), ..*rule };

    if cfg.atomicity == Atomicity::TaskAtomic {
        // every task boundary is quiescent, so this is the sequential loop
        let mut sink = SimColumnSink { inner: sink };
        return crate::solver::run(system, i, scheduler, &rule, &mut sink, oracle_x);
    }

    let mut state = init_state(system, i)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.interleave_seed);

    loop {
        // quiescent point
        sink.quiescent(&state);
        match check_termination(&state, &rule) {
            Termination::Continue => {}
            reason => {
                return Ok(SolveResult {
                    estimate: state.estimate,
                    final_norms: state.r.norms(),
                    ledger: state.ledger,
                    reason,
                })
            }
        }

        // one burst of up to `workers` tasks between quiescent points
        let mut spawn_budget =
            (cfg.workers as u64).min(rule.max_tasks - state.ledger.tasks) as usize;
        let mut in_flight: Vec<InFlightTask> = Vec::new();
        let mut free_workers: Vec<usize> = (0..cfg.workers).rev().collect();
        let mut started = state.ledger.tasks;

        while spawn_budget > 0 || !in_flight.is_empty() {
            let can_spawn = spawn_budget > 0 && in_flight.len() < cfg.workers;
            let options = in_flight.len() + usize::from(can_spawn);
            let choice = rng.gen_range(0..options);
            if can_spawn && choice == in_flight.len() {
                spawn_budget -= 1;
                match scheduler.next(&state.r, started) {
                    Ok(Draw::Update(u)) => {
                        started += 1;
                        let worker = free_workers.pop().expect("worker available");
                        in_flight.push(InFlightTask::new(system, u, worker));
                    }
                    Ok(Draw::Tick) => {
                        started += 1;
                        apply_tick(&mut state);
                        let mut rec = make_record(&state, None, oracle_x);
                        rec.worker_id = Some(free_workers.last().copied().unwrap_or(0));
                        rec.in_flight_count = Some(in_flight.len());
                        sink.record(&rec);
                    }
                    // residual transiently empty: nothing to spawn this burst
                    Err(crate::Error::EmptyResidual) => {
                        spawn_budget = 0;
                    }
                    Err(e) => return Err(e),
                }
            } else {
                let done = in_flight[choice].step(&mut state, system)?;
                if done {
                    let task = in_flight.swap_remove(choice);
                    task.charge(&mut state, system);
                    free_workers.push(task.worker);
                    let mut rec = make_record(&state, Some(task.coordinate), oracle_x);
                    rec.worker_id = Some(task.worker);
                    rec.in_flight_count = Some(in_flight.len());
                    sink.record(&rec);
                }
            }
        }
    }
}

/// Adds the simulator trace columns to sequential records.
struct SimColumnSink<'a> {
    inner: &'a mut dyn TraceSink,
}

impl TraceSink for SimColumnSink<'_> {
    fn record(&mut self, rec: &crate::solver::TraceRecord) {
        let mut rec = *rec;
        rec.worker_id = Some(0);
        rec.in_flight_count = Some(0);
        self.inner.record(&rec);
    }

    fn quiescent(&mut self, state: &ResidualState) {
        self.inner.quiescent(state);
    }
}

/// Per-task DFS access counts summarized as a histogram plus totals.
#[derive(Debug, Clone)]
pub struct LedgerReport {
    pub totals: crate::solver::CostLedger,
    /// (accesses per task, task count), sorted by access count.
    pub access_histogram: Vec<(u64, u64)>,
}

/// Summarize the cost of a completed run from its trace records.
pub fn ledger_report(records: &[crate::solver::TraceRecord]) -> LedgerReport {
    use std::collections::BTreeMap;
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut prev_reads = 0u64;
    let mut totals = crate::solver::CostLedger::default();
    for rec in records {
        let task_reads = rec.dfs_reads_cum - prev_reads;
        prev_reads = rec.dfs_reads_cum;
        *hist.entry(task_reads).or_insert(0) += 1;
        totals.tasks += 1;
        totals.dfs_reads = rec.dfs_reads_cum;
        totals.dfs_writes = rec.dfs_writes_cum;
        totals.multiplications = rec.multiplications_cum;
    }
    LedgerReport { totals, access_histogram: hist.into_iter().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::sched::SchedulerKind;
    use crate::solver::{self, apply_update_task, NormKind};
    use crate::sparse::SparseMatrix;

    fn two_cycle_bonacich() -> FixedPointSystem {
        let g = SparseMatrix::from_triplets(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        FixedPointSystem::new(g, vec![1.0, 1.0]).unwrap()
    }

    fn shared_cols(rec: &crate::solver::TraceRecord) -> (u64, Option<usize>, usize, f64, f64, u64) {
        (rec.task_index, rec.coordinate, rec.r_l0, rec.r_l2, rec.estimate, rec.dfs_reads_cum)
    }

    #[test]
    fn single_worker_matches_sequential_run() {
        let sys = two_cycle_bonacich();
        let rule = TerminationRule::new(NormKind::L2, 1e-8, 10_000).unwrap();
        for atomicity in [Atomicity::TaskAtomic, Atomicity::Step1Atomic] {
            let mut seq_trace = Vec::new();
            let mut sched = Scheduler::new(SchedulerKind::CyclicNonzero, 0, &sys.g, 0).unwrap();
            let seq = solver::run(&sys, 0, &mut sched, &rule, &mut seq_trace, None).unwrap();

            let mut sim_trace = Vec::new();
            let mut sched = Scheduler::new(SchedulerKind::CyclicNonzero, 0, &sys.g, 0).unwrap();
            let cfg = SimConfig { workers: 1, atomicity, interleave_seed: 99, max_tasks: 10_000 };
            let res = simulate(&sys, 0, &mut sched, &rule, &cfg, &mut sim_trace, None).unwrap();

            assert_eq!(res.estimate, seq.estimate);
            assert_eq!(res.ledger, seq.ledger);
            assert_eq!(seq_trace.len(), sim_trace.len());
            for (a, b) in seq_trace.iter().zip(&sim_trace) {
                assert_eq!(shared_cols(a), shared_cols(b));
            }
        }
    }

    #[test]
    fn task_atomic_matches_sequential_for_many_workers() {
        let sys = two_cycle_bonacich();
        let rule = TerminationRule::new(NormKind::L2, 1e-8, 10_000).unwrap();
        let mut seq_trace = Vec::new();
        let mut sched = Scheduler::new(SchedulerKind::UniformCensored, 5, &sys.g, 0).unwrap();
        solver::run(&sys, 0, &mut sched, &rule, &mut seq_trace, None).unwrap();

        let mut sim_trace = Vec::new();
        let mut sched = Scheduler::new(SchedulerKind::UniformCensored, 5, &sys.g, 0).unwrap();
        let cfg =
            SimConfig { workers: 4, atomicity: Atomicity::TaskAtomic, interleave_seed: 7, max_tasks: 10_000 };
        simulate(&sys, 0, &mut sched, &rule, &cfg, &mut sim_trace, None).unwrap();

        assert_eq!(seq_trace.len(), sim_trace.len());
        for (a, b) in seq_trace.iter().zip(&sim_trace) {
            assert_eq!(shared_cols(a), shared_cols(b));
        }
    }

    #[test]
    fn interleaved_runs_converge_across_seeds() {
        let sys = two_cycle_bonacich();
        let x = oracle::dense_solve_fixed_point(&sys).unwrap().x;
        let xnorm = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let rule = TerminationRule::new(NormKind::L2, 1e-8, 100_000).unwrap();
        for seed in 0..100 {
            let mut sched = Scheduler::new(SchedulerKind::CyclicNonzero, 0, &sys.g, 0).unwrap();
            let cfg = SimConfig {
                workers: 4,
                atomicity: Atomicity::Step1Atomic,
                interleave_seed: seed,
                max_tasks: 100_000,
            };
            let res =
                simulate(&sys, 0, &mut sched, &rule, &cfg, &mut solver::NullSink, None).unwrap();
            assert_eq!(res.reason, Termination::Terminated);
            assert!((res.estimate - 2.0).abs() <= 1e-8 * xnorm, "seed {seed}");
        }
    }

    #[test]
    fn ledger_counts_per_task() {
        // row 0 has 3 entries: reads = writes = 4 after one update
        let g = SparseMatrix::from_triplets(
            4,
            &[(0, 1, 0.2), (0, 2, 0.2), (0, 3, 0.2)],
        )
        .unwrap();
        let sys = FixedPointSystem::new(g, vec![1.0; 4]).unwrap();
        let mut state = init_state(&sys, 0).unwrap();
        apply_update_task(&mut state, &sys, 0).unwrap();
        assert_eq!(state.ledger.dfs_reads, 4);
        assert_eq!(state.ledger.dfs_writes, 4);
    }

    #[test]
    fn ledger_report_zero_matrix_run() {
        let sys = FixedPointSystem::new(SparseMatrix::zeros(2), vec![1.0, 1.0]).unwrap();
        let rule = TerminationRule::new(NormKind::L2, 1e-9, 10).unwrap();
        let mut trace = Vec::new();
        let mut sched = Scheduler::new(SchedulerKind::CyclicNonzero, 0, &sys.g, 0).unwrap();
        solver::run(&sys, 0, &mut sched, &rule, &mut trace, None).unwrap();
        let report = ledger_report(&trace);
        assert_eq!(report.totals.tasks, 1);
        assert_eq!(report.totals.dfs_reads, 1);
        assert_eq!(report.totals.dfs_writes, 1);
        assert_eq!(report.access_histogram, vec![(1, 1)]);
    }
}
