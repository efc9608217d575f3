//! The residual update core: state initialization, the three-step
//! coordinate update task, the synchronous full-iteration variant,
//! termination, and the driving loop.
//!
//! Every update of coordinate `u` preserves the invariant
//! `estimate + r·x = x_i`, which ties the residual directly to the
//! estimation error.

use crate::sched::{Draw, Scheduler};
use crate::sparse::{Norms, SparseVector};
use crate::system::FixedPointSystem;
use crate::{Error, Result};

/// Monotone counters for the cloud-model cost of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostLedger {
    pub tasks: u64,
    pub dfs_reads: u64,
    pub dfs_writes: u64,
    pub multiplications: u64,
}

/// The evolving state of a single-component solve for target `i`.
#[derive(Debug, Clone)]
pub struct ResidualState {
    pub r: SparseVector,
    pub estimate: f64,
    pub target: usize,
    pub ledger: CostLedger,
}

impl ResidualState {
    pub fn tasks_done(&self) -> u64 {
        self.ledger.tasks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    pub fn of(&self, norms: &Norms) -> f64 {
        match self {
            NormKind::L1 => norms.l1,
            NormKind::L2 => norms.l2,
            NormKind::Linf => norms.linf,
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::Linf),
            other => Err(Error::InvalidParam(format!("unknown norm '{other}'"))),
        }
    }
}

/// Terminate when the chosen residual norm drops strictly below `epsilon`,
/// or when the task budget is exhausted.
#[derive(Debug, Clone, Copy)]
pub struct TerminationRule {
    pub norm_kind: NormKind,
    pub epsilon: f64,
    pub max_tasks: u64,
}

impl TerminationRule {
    pub fn new(norm_kind: NormKind, epsilon: f64, max_tasks: u64) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::InvalidParam(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(TerminationRule { norm_kind, epsilon, max_tasks })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    Terminated,
    BudgetExhausted,
}

/// One row of the run trace, emitted after every task.
#[derive(Debug, Clone, Copy)]
pub struct TraceRecord {
    pub task_index: u64,
    /// Updated coordinate; `None` for a no-op tick of the padded sampler.
    pub coordinate: Option<usize>,
    pub r_l0: usize,
    pub r_l1: f64,
    pub r_l2: f64,
    pub r_linf: f64,
    pub estimate: f64,
    pub dfs_reads_cum: u64,
    pub dfs_writes_cum: u64,
    pub multiplications_cum: u64,
    /// `|estimate - x_i|` when an oracle solution was supplied.
    pub abs_error: Option<f64>,
    pub worker_id: Option<usize>,
    pub in_flight_count: Option<usize>,
}

/// Consumer of per-task trace records. `quiescent` is called with the full
/// state at every point with no task in flight (in sequential runs, between
/// every pair of tasks), before the termination check.
pub trait TraceSink {
    fn record(&mut self, rec: &TraceRecord);
    fn quiescent(&mut self, _state: &ResidualState) {}
}

/// Discards all records.
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _rec: &TraceRecord) {}
}

impl TraceSink for Vec<TraceRecord> {
    fn record(&mut self, rec: &TraceRecord) {
        self.push(*rec);
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub estimate: f64,
    pub final_norms: Norms,
    pub ledger: CostLedger,
    pub reason: Termination,
}

/// Initialize at `r = e_i`, estimate 0, zeroed ledger.
pub fn init_state(system: &FixedPointSystem, i: usize) -> Result<ResidualState> {
    let r = SparseVector::basis(system.n(), i)?;
    Ok(ResidualState { r, estimate: 0.0, target: i, ledger: CostLedger::default() })
}

/// The three-step coordinate update of `u`, with `ρ` the value of `r_u`
/// read first: set `r_u ← G_uu ρ`, add `ρ z_u` to the estimate, and add
/// `G_uv ρ` to each neighbor `v ≠ u`. A zero-residual coordinate is a
/// recorded no-op: only the task counter moves.
pub fn apply_update_task(
    state: &mut ResidualState,
    system: &FixedPointSystem,
    u: usize,
) -> Result<()> {
    if u >= system.n() {
        return Err(Error::IndexOutOfRange { index: u, dim: system.n() });
    }
    let rho = state.r.get(u);
    if rho == 0.0 {
        state.ledger.tasks += 1;
        return Ok(());
    }
    let row = system.g.row(u);
    state.r.set(u, system.g.get(u, u) * rho)?;
    state.estimate += rho * system.z[u];
    for &(v, g) in row {
        if v != u {
            state.r.add(v, g * rho)?;
        }
    }
    let fanout = row.len() as u64;
    state.ledger.tasks += 1;
    state.ledger.dfs_reads += 1 + fanout;
    state.ledger.dfs_writes += 1 + fanout;
    state.ledger.multiplications += 1 + fanout;
    Ok(())
}

/// A no-op tick of the padded sampler: the task counter advances, nothing
/// else changes.
pub fn apply_tick(state: &mut ResidualState) {
    state.ledger.tasks += 1;
}

/// One full synchronous iteration: `estimate += z·r`, then `r ← Gᵀr`.
/// Accrues one task per nonzero coordinate of the pre-iteration residual,
/// each costing the same as an individual update task.
pub fn synchronous_iteration(state: &mut ResidualState, system: &FixedPointSystem) -> Result<()> {
    let support = state.r.nnz() as u64;
    state.estimate += state.r.dot_dense(&system.z);
    let (next, mults) = system.g.transpose_apply(&state.r)?;
    state.r = next;
    state.ledger.tasks += support;
    state.ledger.dfs_reads += support + mults;
    state.ledger.dfs_writes += support + mults;
    state.ledger.multiplications += support + mults;
    Ok(())
}

/// Terminated iff the chosen norm of `r` is strictly below epsilon;
/// budget-exhausted iff the task count reached the cap.
pub fn check_termination(state: &ResidualState, rule: &TerminationRule) -> Termination {
    let norms = state.r.norms();
    if rule.norm_kind.of(&norms) < rule.epsilon {
        Termination::Terminated
    } else if state.ledger.tasks >= rule.max_tasks {
        Termination::BudgetExhausted
    } else {
        Termination::Continue
    }
}

/// `|estimate + r·x_true − x_true[i]|`, the floating-point gap in the
/// invariant given an oracle solution.
pub fn invariant_gap(state: &ResidualState, x_true: &[f64]) -> f64 {
    (state.estimate + state.r.dot_dense(x_true) - x_true[state.target]).abs()
}

pub(crate) fn make_record(
    state: &ResidualState,
    coordinate: Option<usize>,
    oracle_x: Option<&[f64]>,
) -> TraceRecord {
    let norms = state.r.norms();
    TraceRecord {
        task_index: state.ledger.tasks,
        coordinate,
        r_l0: norms.l0,
        r_l1: norms.l1,
        r_l2: norms.l2,
        r_linf: norms.linf,
        estimate: state.estimate,
        dfs_reads_cum: state.ledger.dfs_reads,
        dfs_writes_cum: state.ledger.dfs_writes,
        multiplications_cum: state.ledger.multiplications,
        abs_error: oracle_x.map(|x| (state.estimate - x[state.target]).abs()),
        worker_id: None,
        in_flight_count: None,
    }
}

/// Sequential solve loop: scheduler draw, update task, termination check,
/// one trace record per task.
pub fn run(
    system: &FixedPointSystem,
    i: usize,
    scheduler: &mut Scheduler,
    rule: &TerminationRule,
    sink: &mut dyn TraceSink,
    oracle_x: Option<&[f64]>,
) -> Result<SolveResult> {
    let mut state = init_state(system, i)?;
    loop {
        sink.quiescent(&state);
        match check_termination(&state, rule) {
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
        let coordinate = match scheduler.next(&state.r, state.ledger.tasks)? {
            Draw::Update(u) => {
                apply_update_task(&mut state, system, u)?;
                Some(u)
            }
            Draw::Tick => {
                apply_tick(&mut state);
                None
            }
        };
        sink.record(&make_record(&state, coordinate, oracle_x));
    }
}
