//! Command-line front end: system construction from files or generator
//! specs, solve/simulate runs with CSV traces, scheduler comparison sweeps,
//! graph generation, and dense reference solves.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::batch::mean_std;
use crate::oracle;
use crate::sched::{Scheduler, SchedulerKind};
use crate::sim::{self, Atomicity, SimConfig};
use crate::solver::{
    self, NormKind, SolveResult, Termination, TerminationRule, TraceRecord, TraceSink,
};
use crate::sparse::SparseMatrix;
use crate::system::{
    self, bonacich_system, default_bonacich_alpha, generate_graph, jacobi_transform,
    load_matrix_market, pagerank_system, richardson_transform, row_normalize, save_matrix_market,
    FixedPointSystem, GraphSpec, LinearSystem,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "local-solve", about = "Single-component solver for x = Gx + z", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the solver (or the asynchrony simulator) and write a trace CSV.
    Solve(SolveArgs),
    /// Sweep schedulers over seeds and summarize cost-to-epsilon.
    Compare(CompareArgs),
    /// Generate a random graph and write it as Matrix Market.
    Gen(GenArgs),
    /// Dense-solve a system and write the solution vector.
    Oracle(OracleArgs),
}

/// Flags describing where the fixed-point system comes from.
#[derive(Args, Debug, Clone, Default)]
struct SystemArgs {
    /// Matrix Market file: G, an adjacency (with --centrality), or A (with --transform).
    #[arg(long)]
    system: Option<PathBuf>,
    /// Generator spec, e.g. "er:n=1000,p=0.0276,seed=7" or "powerlaw:n=500,exponent=1.5,seed=7".
    #[arg(long)]
    graph: Option<String>,
    /// Interpret the matrix as a graph for this centrality.
    #[arg(long, value_parser = ["pagerank", "bonacich"])]
    centrality: Option<String>,
    /// Teleport probability (pagerank) or attenuation (bonacich).
    #[arg(long)]
    alpha: Option<f64>,
    /// Richardson step size; omit to use the optimal value for symmetric A.
    #[arg(long)]
    gamma: Option<f64>,
    /// Transform an Ax = b ingest into fixed-point form.
    #[arg(long, value_parser = ["jacobi", "richardson"])]
    transform: Option<String>,
    /// Right-hand side b (with --transform) or z (raw G ingest).
    #[arg(long)]
    rhs: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Target coordinate i.
    #[arg(long, default_value_t = 0)]
    target_i: usize,
    #[arg(long, default_value = "uniform_censored")]
    scheduler: String,
    /// Scheduler seed; compare uses seed..seed+replications.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value = "l2", value_parser = ["l1", "l2", "linf"])]
    norm: String,
    #[arg(long, default_value_t = 10_000_000)]
    max_tasks: u64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Flat key-value config file; command-line flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Simulated workers; > 1 runs the asynchrony simulator.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "task", value_parser = ["task", "step1"])]
    atomicity: String,
    /// Interleave seed for the simulator.
    #[arg(long, default_value_t = 0)]
    interleave_seed: u64,
    /// Dense-solve the system and add an abs_error trace column.
    #[arg(long, default_value_t = false)]
    oracle: bool,
    /// Trace CSV path; omit to skip the trace.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Schedulers to compare (repeat the flag or comma-separate); at least two.
    #[arg(long = "schedulers", value_delimiter = ',')]
    schedulers: Vec<String>,
    #[arg(long, default_value_t = 1)]
    replications: u64,
    /// Summary CSV path; omit to print to stdout only.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-(scheduler, seed) trace CSVs.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Generator spec, same grammar as --graph.
    #[arg(long)]
    graph: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Report x_i for this coordinate.
    #[arg(long)]
    target_i: Option<usize>,
    /// Solution vector output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse "er:n=1000,p=0.0276,seed=7" / "powerlaw:n=500,exponent=1.5,seed=7".
pub fn parse_graph_spec(s: &str) -> Result<GraphSpec> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidParam(format!("graph spec '{s}' missing ':'")))?;
    let mut params: HashMap<&str, &str> = HashMap::new();
    for part in rest.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidParam(format!("bad graph parameter '{part}'")))?;
        params.insert(k.trim(), v.trim());
    }
    let get = |key: &str| -> Result<&str> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidParam(format!("graph spec missing '{key}'")))
    };
    let num = |key: &str| -> Result<f64> {
        get(key)?
            .parse()
            .map_err(|_| Error::InvalidParam(format!("graph parameter '{key}' is not a number")))
    };
    let seed = match params.get("seed") {
        Some(v) => v
            .parse()
            .map_err(|_| Error::InvalidParam("graph seed is not an integer".into()))?,
        None => 0,
    };
    let n = num("n")? as usize;
    match kind {
        "er" | "erdos_renyi" => Ok(GraphSpec::ErdosRenyi { n, p: num("p")?, seed }),
        "powerlaw" | "power_law_config" => {
            Ok(GraphSpec::PowerLawConfig { n, exponent: num("exponent")?, seed })
        }
        other => Err(Error::InvalidParam(format!("unknown graph kind '{other}'"))),
    }
}

/// Build the fixed-point system from the source flags.
fn build_system(args: &SystemArgs) -> Result<FixedPointSystem> {
    let matrix: SparseMatrix = match (&args.system, &args.graph) {
        (Some(path), None) => load_matrix_market(path)?,
        (None, Some(spec)) => generate_graph(&parse_graph_spec(spec)?)?,
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParam("--system and --graph are exclusive".into()))
        }
        (None, None) => {
            return Err(Error::InvalidParam("one of --system or --graph is required".into()))
        }
    };

    if let Some(transform) = &args.transform {
        let rhs_path = args
            .rhs
            .as_ref()
            .ok_or_else(|| Error::InvalidParam("--transform requires --rhs".into()))?;
        let b = system::load_vector(rhs_path)?;
        let lin = LinearSystem::new(matrix, b)?;
        return match transform.as_str() {
            "jacobi" => jacobi_transform(&lin),
            "richardson" => {
                let gamma = match args.gamma {
                    Some(g) => g,
                    None => system::richardson_optimal_gamma(&lin.a)?,
                };
                richardson_transform(&lin, gamma)
            }
            other => Err(Error::InvalidParam(format!("unknown transform '{other}'"))),
        };
    }

    match args.centrality.as_deref() {
        Some("pagerank") => {
            let alpha = args.alpha.unwrap_or(0.15);
            pagerank_system(&row_normalize(&matrix)?, alpha)
        }
        Some("bonacich") => {
            let alpha = args.alpha.unwrap_or_else(|| default_bonacich_alpha(&matrix));
            bonacich_system(&matrix, alpha)
        }
        Some(other) => Err(Error::InvalidParam(format!("unknown centrality '{other}'"))),
        None => {
            let rhs_path = args.rhs.as_ref().ok_or_else(|| {
                Error::InvalidParam("raw G ingest requires --rhs for z".into())
            })?;
            let z = system::load_vector(rhs_path)?;
            FixedPointSystem::new(matrix, z)
        }
    }
}

/// Flat key = value config with optional [section] grouping lines.
/// Returns the merged key map; sections only organize the file.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno + 1,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn apply_config_system(args: &mut SystemArgs, cfg: &HashMap<String, String>) -> Result<()> {
    if args.system.is_none() {
        args.system = cfg.get("system").map(PathBuf::from);
    }
    if args.graph.is_none() {
        args.graph = cfg.get("graph").cloned();
    }
    if args.centrality.is_none() {
        args.centrality = cfg.get("centrality").cloned();
    }
    if args.transform.is_none() {
        args.transform = cfg.get("transform").cloned();
    }
    if args.rhs.is_none() {
        args.rhs = cfg.get("rhs").map(PathBuf::from);
    }
    if args.alpha.is_none() {
        args.alpha = parse_opt(cfg, "alpha")?;
    }
    if args.gamma.is_none() {
        args.gamma = parse_opt(cfg, "gamma")?;
    }
    Ok(())
}

fn parse_opt<T: FromStr>(cfg: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
    match cfg.get(key) {
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParam(format!("config key '{key}' has bad value '{v}'"))),
        None => Ok(None),
    }
}

fn apply_config_run(
    args: &mut RunArgs,
    cfg: &HashMap<String, String>,
    explicit: &clap::ArgMatches,
) -> Result<()> {
    // defaulted clap values lose to config; explicit flags win
    macro_rules! fill {
        ($field:ident, $key:literal) => {
            if explicit.value_source($key) != Some(clap::parser::ValueSource::CommandLine) {
                if let Some(v) = parse_opt(cfg, $key)? {
                    args.$field = v;
                }
            }
        };
    }
    fill!(target_i, "target_i");
    fill!(scheduler, "scheduler");
    fill!(seed, "seed");
    fill!(epsilon, "epsilon");
    fill!(norm, "norm");
    fill!(max_tasks, "max_tasks");
    Ok(())
}

fn termination_rule(run: &RunArgs) -> Result<TerminationRule> {
    TerminationRule::new(NormKind::from_str(&run.norm)?, run.epsilon, run.max_tasks)
}

fn fmt_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

/// CSV trace writer with the documented column set. `abs_error` is present
/// when an oracle solution was supplied, `worker_id`/`in_flight_count` in
/// simulator mode.
pub struct CsvSink {
    buf: String,
    with_abs_error: bool,
    with_sim_cols: bool,
}

impl CsvSink {
    pub fn new(with_abs_error: bool, with_sim_cols: bool) -> Self {
        let mut buf = String::from(
            "task_index,coordinate,r_l0,r_l1,r_l2,r_linf,estimate,dfs_reads_cum,dfs_writes_cum,multiplications_cum",
        );
        if with_abs_error {
            buf.push_str(",abs_error");
        }
        if with_sim_cols {
            buf.push_str(",worker_id,in_flight_count");
        }
        buf.push('\n');
        CsvSink { buf, with_abs_error, with_sim_cols }
    }

    pub fn into_string(self) -> String {
        self.buf
    }

    pub fn write(self, path: &Path) -> Result<()> {
        fs::write(path, self.buf)?;
        Ok(())
    }
}

impl TraceSink for CsvSink {
    fn record(&mut self, rec: &TraceRecord) {
        let _ = write!(
            self.buf,
            "{},{},{},{},{},{},{},{},{},{}",
            rec.task_index,
            fmt_opt(&rec.coordinate),
            rec.r_l0,
            rec.r_l1,
            rec.r_l2,
            rec.r_linf,
            rec.estimate,
            rec.dfs_reads_cum,
            rec.dfs_writes_cum,
            rec.multiplications_cum,
        );
        if self.with_abs_error {
            let _ = write!(self.buf, ",{}", fmt_opt(&rec.abs_error));
        }
        if self.with_sim_cols {
            let _ =
                write!(self.buf, ",{},{}", fmt_opt(&rec.worker_id), fmt_opt(&rec.in_flight_count));
        }
        self.buf.push('\n');
    }
}

fn print_summary(label: &str, res: &SolveResult, abs_error: Option<f64>) {
    let reason = match res.reason {
        Termination::Terminated => "terminated",
        Termination::BudgetExhausted => "budget_exhausted",
        Termination::Continue => "continue",
    };
    let mut line = format!(
        "{label} reason={reason} tasks={} multiplications={} estimate={} r_l1={} r_l2={} r_linf={}",
        res.ledger.tasks,
        res.ledger.multiplications,
        res.estimate,
        res.final_norms.l1,
        res.final_norms.l2,
        res.final_norms.linf,
    );
    if let Some(err) = abs_error {
        let _ = write!(line, " abs_error={err}");
    }
    println!("{line}");
}

fn exit_code(reason: Termination) -> i32 {
    match reason {
        Termination::BudgetExhausted => EXIT_BUDGET,
        _ => EXIT_OK,
    }
}

fn cmd_solve(mut args: SolveArgs, matches: &clap::ArgMatches) -> Result<i32> {
    if let Some(path) = &args.config {
        let cfg = parse_config(&fs::read_to_string(path)?)?;
        apply_config_system(&mut args.system, &cfg)?;
        apply_config_run(&mut args.run, &cfg, matches)?;
    }
    let sys = build_system(&args.system)?;
    if let Some(w) = &sys.meta.warning {
        eprintln!("warning: {w}");
    }
    let rule = termination_rule(&args.run)?;
    let kind = SchedulerKind::from_str(&args.run.scheduler)?;
    let mut sched = Scheduler::new(kind, args.run.seed, &sys.g, args.run.target_i)?;

    let oracle_x = if args.oracle {
        Some(oracle::dense_solve_fixed_point(&sys)?.x)
    } else {
        None
    };
    let oracle_ref = oracle_x.as_deref();

    let atomicity = Atomicity::from_str(&args.atomicity)?;
    let sim_mode = args.workers > 1 || atomicity == Atomicity::Step1Atomic;
    let mut sink = CsvSink::new(oracle_ref.is_some(), sim_mode);
    let res = if sim_mode {
        let cfg = SimConfig {
            workers: args.workers,
            atomicity,
            interleave_seed: args.interleave_seed,
            max_tasks: args.run.max_tasks,
        };
        sim::simulate(&sys, args.run.target_i, &mut sched, &rule, &cfg, &mut sink, oracle_ref)?
    } else {
        solver::run(&sys, args.run.target_i, &mut sched, &rule, &mut sink, oracle_ref)?
    };
    if let Some(path) = &args.out {
        sink.write(path)?;
    }
    let abs_error = oracle_ref.map(|x| (res.estimate - x[args.run.target_i]).abs());
    print_summary("solve", &res, abs_error);
    Ok(exit_code(res.reason))
}

/// Cost to reach the epsilon ball: tasks and multiplications at termination,
/// or None when the budget ran out first.
fn cost_to_eps(res: &SolveResult) -> Option<(f64, f64)> {
    match res.reason {
        Termination::Terminated => {
            Some((res.ledger.tasks as f64, res.ledger.multiplications as f64))
        }
        _ => None,
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Full-vector stationary iteration x ← Gx + z from x = 0, stopping when the
/// step norm drops below epsilon. Cost model: n tasks per iteration, each
/// costing its row fan-in plus one multiplication.
fn stationary_baseline(
    sys: &FixedPointSystem,
    rule: &TerminationRule,
) -> (u64, u64, Termination) {
    let n = sys.n();
    let per_iter_mults: u64 = (0..n).map(|u| sys.g.row(u).len() as u64 + 1).sum();
    let mut x = vec![0.0; n];
    let mut tasks = 0u64;
    let mut mults = 0u64;
    loop {
        let mut next = sys.z.clone();
        for (u, nu) in next.iter_mut().enumerate() {
            for &(v, g) in sys.g.row(u) {
                *nu += g * x[v];
            }
        }
        tasks += n as u64;
        mults += per_iter_mults;
        let step = crate::sparse::SparseVector::from_dense(
            &next.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>(),
        );
        x = next;
        if rule.norm_kind.of(&step.norms()) < rule.epsilon {
            return (tasks, mults, Termination::Terminated);
        }
        if tasks >= rule.max_tasks {
            return (tasks, mults, Termination::BudgetExhausted);
        }
    }
}

fn synchronous_baseline(
    sys: &FixedPointSystem,
    i: usize,
    rule: &TerminationRule,
) -> Result<SolveResult> {
    let mut state = solver::init_state(sys, i)?;
    loop {
        match solver::check_termination(&state, rule) {
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
        solver::synchronous_iteration(&mut state, sys)?;
    }
}

fn cmd_compare(mut args: CompareArgs, matches: &clap::ArgMatches) -> Result<i32> {
    if let Some(path) = &args.config {
        let cfg = parse_config(&fs::read_to_string(path)?)?;
        apply_config_system(&mut args.system, &cfg)?;
        apply_config_run(&mut args.run, &cfg, matches)?;
        if args.schedulers.is_empty() {
            if let Some(v) = cfg.get("schedulers") {
                args.schedulers = v.split(',').map(|s| s.trim().to_string()).collect();
            }
        }
        if matches.value_source("replications") != Some(clap::parser::ValueSource::CommandLine) {
            if let Some(v) = parse_opt(&cfg, "replications")? {
                args.replications = v;
            }
        }
    }
    if args.schedulers.len() < 2 {
        return Err(Error::InvalidParam("compare needs at least two --schedulers".into()));
    }
    if args.replications < 1 {
        return Err(Error::InvalidParam("compare needs at least one replication".into()));
    }
    let kinds: Vec<SchedulerKind> = args
        .schedulers
        .iter()
        .map(|s| SchedulerKind::from_str(s))
        .collect::<Result<_>>()?;

    let sys = build_system(&args.system)?;
    if let Some(w) = &sys.meta.warning {
        eprintln!("warning: {w}");
    }
    let rule = termination_rule(&args.run)?;
    let i = args.run.target_i;
    if let Some(dir) = &args.trace_dir {
        fs::create_dir_all(dir)?;
    }

    let mut csv = String::from(
        "scheduler,runs,terminated_runs,median_tasks_to_eps,median_multiplications_to_eps,mean_tasks,std_tasks\n",
    );
    let mut budget_hit = false;
    for kind in &kinds {
        let mut tasks_to_eps = Vec::new();
        let mut mults_to_eps = Vec::new();
        let mut all_tasks = Vec::new();
        let mut terminated = 0u64;
        for rep in 0..args.replications {
            let seed = args.run.seed.wrapping_add(rep);
            let mut sched = Scheduler::new(*kind, seed, &sys.g, i)?;
            let res = if let Some(dir) = &args.trace_dir {
                let mut sink = CsvSink::new(false, false);
                let res = solver::run(&sys, i, &mut sched, &rule, &mut sink, None)?;
                sink.write(&dir.join(format!("{}_seed{}.csv", kind.name(), seed)))?;
                res
            } else {
                solver::run(&sys, i, &mut sched, &rule, &mut solver::NullSink, None)?
            };
            all_tasks.push(res.ledger.tasks as f64);
            if let Some((t, m)) = cost_to_eps(&res) {
                terminated += 1;
                tasks_to_eps.push(t);
                mults_to_eps.push(m);
            } else {
                budget_hit = true;
            }
        }
        let (mean, std) = mean_std(&all_tasks);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            kind.name(),
            args.replications,
            terminated,
            median(&mut tasks_to_eps),
            median(&mut mults_to_eps),
            mean,
            std,
        );
    }

    let sync = synchronous_baseline(&sys, i, &rule)?;
    let sync_cost = cost_to_eps(&sync);
    budget_hit |= sync_cost.is_none();
    let _ = writeln!(
        csv,
        "synchronous,1,{},{},{},{},0",
        u64::from(sync_cost.is_some()),
        fmt_opt(&sync_cost.map(|c| c.0)),
        fmt_opt(&sync_cost.map(|c| c.1)),
        sync.ledger.tasks,
    );
    let (st_tasks, st_mults, st_reason) = stationary_baseline(&sys, &rule);
    let st_done = st_reason == Termination::Terminated;
    budget_hit |= !st_done;
    let _ = writeln!(
        csv,
        "stationary_full_vector,1,{},{},{},{},0",
        u64::from(st_done),
        if st_done { st_tasks.to_string() } else { String::new() },
        if st_done { st_mults.to_string() } else { String::new() },
        st_tasks,
    );

    print!("{csv}");
    if let Some(path) = &args.out {
        fs::write(path, &csv)?;
    }
    Ok(if budget_hit { EXIT_BUDGET } else { EXIT_OK })
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let spec = parse_graph_spec(&args.graph)?;
    let adj = generate_graph(&spec)?;
    save_matrix_market(&adj, &args.out)?;
    let n = adj.n();
    let edges = adj.nnz() / 2;
    let max_degree = (0..n).map(|u| adj.row(u).len()).max().unwrap_or(0);
    let d_avg = if n > 0 { adj.nnz() as f64 / n as f64 } else { 0.0 };
    println!("n={n} edges={edges} max_degree={max_degree} d_avg={d_avg}");
    Ok(EXIT_OK)
}

fn cmd_oracle(args: OracleArgs) -> Result<i32> {
    let sys = build_system(&args.system)?;
    let sol = oracle::dense_solve_fixed_point(&sys)?;
    if let Some(path) = &args.out {
        system::save_vector(&sol.x, path)?;
    }
    let mut line = format!("n={} residual_norm={}", sol.x.len(), sol.residual_norm);
    if let Some(i) = args.target_i {
        if i >= sol.x.len() {
            return Err(Error::IndexOutOfRange { index: i, dim: sol.x.len() });
        }
        let _ = write!(line, " x_{i}={}", sol.x[i]);
    }
    println!("{line}");
    Ok(EXIT_OK)
}

/// Parse argv and run; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::{CommandFactory, FromArgMatches};
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_ERROR;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => {
            cmd_solve(a, matches.subcommand_matches("solve").expect("solve matches"))
        }
        Command::Compare(a) => {
            cmd_compare(a, matches.subcommand_matches("compare").expect("compare matches"))
        }
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
