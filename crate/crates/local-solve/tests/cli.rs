use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_local-solve"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("local-solve-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_is_deterministic_and_reports_stats() {
    let dir = tmpdir("gen");
    let a = dir.join("a.mtx");
    let b = dir.join("b.mtx");
    for path in [&a, &b] {
        let out = bin()
            .args(["gen", "--graph", "er:n=50,p=0.2,seed=7", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        assert!(text.contains("n=50"), "missing stats line: {text}");
        assert!(text.contains("max_degree="));
        assert!(text.contains("d_avg="));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_writes_trace_and_exits_zero() {
    let dir = tmpdir("solve");
    let trace = dir.join("trace.csv");
    let out = bin()
        .args([
            "solve",
            "--graph",
            "er:n=30,p=0.2,seed=3",
            "--centrality",
            "bonacich",
            "--scheduler",
            "greedy_max",
            "--epsilon",
            "1e-6",
            "--oracle",
            "--out",
        ])
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("reason=terminated"));
    assert!(text.contains("abs_error="));

    let csv = fs::read_to_string(&trace).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "task_index,coordinate,r_l0,r_l1,r_l2,r_linf,estimate,dfs_reads_cum,dfs_writes_cum,multiplications_cum,abs_error"
    );
    assert!(csv.lines().count() > 1);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_budget_exhaustion_exits_two() {
    let out = bin()
        .args([
            "solve",
            "--graph",
            "er:n=20,p=0.3,seed=1",
            "--centrality",
            "bonacich",
            "--max-tasks",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("reason=budget_exhausted"));
}

#[test]
fn solve_sim_mode_adds_worker_columns() {
    let dir = tmpdir("sim");
    let trace = dir.join("trace.csv");
    let out = bin()
        .args([
            "solve",
            "--graph",
            "er:n=20,p=0.3,seed=1",
            "--centrality",
            "bonacich",
            "--workers",
            "4",
            "--atomicity",
            "step1",
            "--epsilon",
            "1e-5",
            "--out",
        ])
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&trace).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",worker_id,in_flight_count"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_input_exits_one() {
    let out = bin()
        .args(["solve", "--graph", "er:n=10,p=2.0,seed=1", "--centrality", "bonacich"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let out = bin().args(["solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_emits_scheduler_and_baseline_rows() {
    let dir = tmpdir("compare");
    let summary = dir.join("summary.csv");
    let out = bin()
        .args([
            "compare",
            "--graph",
            "er:n=40,p=0.15,seed=2",
            "--centrality",
            "bonacich",
            "--schedulers",
            "uniform_censored,greedy_max,proportional_square",
            "--replications",
            "3",
            "--epsilon",
            "1e-4",
            "--out",
        ])
        .arg(&summary)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&summary).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "scheduler,runs,terminated_runs,median_tasks_to_eps,median_multiplications_to_eps,mean_tasks,std_tasks");
    // 3 scheduler rows + synchronous + full-vector baseline
    assert_eq!(lines.len(), 6);
    assert!(lines[4].starts_with("synchronous,"));
    assert!(lines[5].starts_with("stationary_full_vector,"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn compare_rejects_single_scheduler() {
    let out = bin()
        .args([
            "compare",
            "--graph",
            "er:n=10,p=0.3,seed=1",
            "--centrality",
            "bonacich",
            "--schedulers",
            "greedy_max",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_solves_to_vector_file() {
    let dir = tmpdir("oracle");
    let vec_path = dir.join("x.vec");
    let out = bin()
        .args([
            "oracle",
            "--graph",
            "er:n=12,p=0.4,seed=6",
            "--centrality",
            "bonacich",
            "--target-i",
            "0",
            "--out",
        ])
        .arg(&vec_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("x_0="));
    let contents = fs::read_to_string(&vec_path).unwrap();
    assert_eq!(contents.lines().next().unwrap(), "12");
    assert_eq!(contents.lines().count(), 13);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tmpdir("config");
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        "[system]\ngraph = er:n=25,p=0.25,seed=4\ncentrality = bonacich\n\n[run]\nscheduler = greedy_max\nepsilon = 1e-3\nmax_tasks = 100000\n",
    )
    .unwrap();
    let out = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let base = stdout(&out);

    // flag overrides the config epsilon: tighter run does at least as many tasks
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .args(["--epsilon", "1e-8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let tight = stdout(&out);
    let tasks = |s: &str| -> u64 {
        s.split("tasks=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!(tasks(&tight) > tasks(&base));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_runs_from_matrix_and_rhs_files() {
    let dir = tmpdir("files");
    let mtx = dir.join("g.mtx");
    let rhs = dir.join("z.vec");
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 0.5\n2 1 0.5\n",
    )
    .unwrap();
    fs::write(&rhs, "2\n1\n1\n").unwrap();
    let out = bin()
        .args(["solve", "--system"])
        .arg(&mtx)
        .args(["--rhs"])
        .arg(&rhs)
        .args(["--scheduler", "cyclic_nonzero", "--epsilon", "1e-10", "--oracle"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    // 2-cycle with G entries 0.5 and z = 1: x_0 = 2
    let est: f64 = text.split("estimate=").nth(1).unwrap().split_whitespace().next().unwrap()
        .parse()
        .unwrap();
    assert!((est - 2.0).abs() < 1e-9, "estimate {est}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn jacobi_transform_via_cli() {
    let dir = tmpdir("jacobi");
    let mtx = dir.join("a.mtx");
    let rhs = dir.join("b.vec");
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 1\n2 1 1\n2 2 2\n",
    )
    .unwrap();
    fs::write(&rhs, "2\n3\n3\n").unwrap();
    let out = bin()
        .args(["oracle", "--system"])
        .arg(&mtx)
        .args(["--rhs"])
        .arg(&rhs)
        .args(["--transform", "jacobi", "--target-i", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // A = [[2,1],[1,2]], b = [3,3] -> x = [1,1]
    let text = stdout(&out);
    let x0: f64 = text.split("x_0=").nth(1).unwrap().split_whitespace().next().unwrap()
        .parse()
        .unwrap();
    assert!((x0 - 1.0).abs() < 1e-10);
    fs::remove_dir_all(&dir).ok();
}
