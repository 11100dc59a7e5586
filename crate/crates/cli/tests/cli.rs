use std::os::unix::fs::PermissionsExt;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fairmdp");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("FAIRMDP_LP_SOLVER")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}\t")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .to_string()
}

fn gen(dir: &Path, seed: &str) -> String {
    let path = dir.join(format!("inst-{seed}.txt"));
    let p = path.to_str().unwrap().to_string();
    let o = run(&[
        "gen",
        "--seed",
        seed,
        "--states",
        "6",
        "--actions",
        "3",
        "--out",
        &p,
    ]);
    assert!(o.status.success());
    p
}

#[test]
fn greedy_lorenz_example2_has_size_one_and_checks() {
    let args = [
        "--in",
        "builtin:example2:30",
        "--space",
        "lorenz",
        "--method",
        "greedy",
        "--epsilon",
        "0.2",
    ];
    let o = run(&[&["cover"][..], &args].concat());
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "size"), "1");
    let c = run(&[&["check"][..], &args].concat());
    assert_eq!(
        c.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&c.stderr)
    );
}

#[test]
fn pareto_grid_example1_within_bound_and_table_checks() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("cover.tsv");
    let t = table.to_str().unwrap();
    let o = run(&[
        "cover",
        "--in",
        "builtin:example1:20",
        "--space",
        "pareto",
        "--method",
        "grid",
        "--epsilon",
        "0.1",
        "--table",
        t,
    ]);
    assert!(o.status.success());
    let size: usize = field(&stdout(&o), "size").parse().unwrap();
    assert!(size <= 146);
    let ok = run(&[
        "check",
        "--in",
        "builtin:example1:20",
        "--space",
        "pareto",
        "--epsilon",
        "0.1",
        "--cover",
        t,
    ]);
    assert_eq!(ok.status.code(), Some(0));
    // The same points are too coarse for a tighter ε.
    let bad = run(&[
        "check",
        "--in",
        "builtin:example1:20",
        "--space",
        "pareto",
        "--epsilon",
        "0.01",
        "--cover",
        t,
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn runs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "5");
    let first = std::fs::read(&a).unwrap();
    let b = gen(dir.path(), "5");
    assert_eq!(first, std::fs::read(&b).unwrap());
    let plot = dir.path().join("plot.tsv");
    let p = plot.to_str().unwrap();
    let args = [
        "cover",
        "--in",
        &a,
        "--space",
        "lorenz",
        "--epsilon",
        "0.1",
        "--plot",
        p,
    ];
    let o1 = run(&args);
    let plot1 = std::fs::read(&plot).unwrap();
    let o2 = run(&args);
    assert!(o1.status.success());
    assert_eq!(o1.stdout, o2.stdout);
    assert_eq!(plot1, std::fs::read(&plot).unwrap());
}

#[test]
fn plot_points_are_the_cover_and_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.tsv");
    let p = plot.to_str().unwrap();
    let o = run(&[
        "cover",
        "--in",
        "builtin:example1:4",
        "--space",
        "lorenz",
        "--epsilon",
        "0.1",
        "--plot",
        p,
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&plot).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("series\tz1\tz2\tL1\tL2"));
    let frontier: Vec<&str> = text.lines().filter(|l| l.starts_with("frontier")).collect();
    assert_eq!(
        frontier,
        vec!["frontier\t7\t8\t7\t15", "frontier\t8\t7\t7\t15"]
    );
    let size: usize = field(&stdout(&o), "size").parse().unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("cover")).count(),
        size
    );
}

#[test]
fn deterministic_mode_reports_policies_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "9");
    let o = run(&[
        "cover",
        "--in",
        &inst,
        "--space",
        "lorenz",
        "--epsilon",
        "0.1",
        "--deterministic",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out
        .lines()
        .skip_while(|l| !l.starts_with("index"))
        .skip(1)
        .collect();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .all(|r| r.split('\t').nth(4).unwrap().starts_with("det:")));
    let c = run(&[
        "check",
        "--in",
        &inst,
        "--space",
        "lorenz",
        "--epsilon",
        "0.1",
        "--deterministic",
    ]);
    assert_eq!(c.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "2");
    let r = run(&[
        "cover",
        "--in",
        &inst,
        "--space",
        "lorenz",
        "--epsilon",
        "0.1",
        "--deterministic",
        "--max-binaries",
        "4",
    ]);
    assert_eq!(r.status.code(), Some(3));
    assert_eq!(
        run(&[
            "cover",
            "--in",
            "builtin:nope:3",
            "--space",
            "lorenz",
            "--epsilon",
            "0.1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["cover", "--space", "lorenz"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "cover",
            "--in",
            "builtin:example2:5",
            "--space",
            "pareto",
            "--method",
            "two-phase",
            "--epsilon",
            "0.1"
        ])
        .status
        .code(),
        Some(2)
    );
    let broken = dir.path().join("broken.txt");
    std::fs::write(&broken, "momdp 1\nstates 2\n").unwrap();
    let o = run(&["stats", "--in", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let big = run(&[
        "check",
        "--in",
        &inst,
        "--space",
        "lorenz",
        "--epsilon",
        "0.1",
        "--limit",
        "10",
    ]);
    assert_eq!(big.status.code(), Some(3));
}

#[test]
fn stats_reports_grid_bounds() {
    let o = run(&["stats", "--in", "builtin:example1:20", "--epsilon", "0.1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "points"), "1048576");
    let bound: u64 = field(&out, "pareto_cover_bound").parse().unwrap();
    assert!(bound >= 146);
}

#[test]
fn external_solver_adapter_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "4");
    let script = dir.path().join("solver.sh");
    std::fs::write(&script, format!("#!/bin/sh\nexec '{BIN}' solve-lp\n")).unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let args = [
        "cover",
        "--in",
        &inst,
        "--space",
        "lorenz",
        "--epsilon",
        "0.2",
    ];
    let builtin = run(&args);
    let external = Command::new(BIN)
        .args(args)
        .env("FAIRMDP_LP_SOLVER", &script)
        .output()
        .unwrap();
    assert!(
        external.status.success(),
        "{}",
        String::from_utf8_lossy(&external.stderr)
    );
    assert_eq!(
        field(&stdout(&builtin), "size"),
        field(&stdout(&external), "size")
    );
    let missing = Command::new(BIN)
        .args(args)
        .env("FAIRMDP_LP_SOLVER", dir.path().join("absent"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn solve_lp_reads_text_models() {
    use std::io::Write;
    let mut child = Command::new(BIN)
        .arg("solve-lp")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let lp =
        "lp v1\nobjective max\nvar x 0 4\nvar y 0 inf\nobj 0 1\nobj 1 1\ncon le 6 0 1 1 2\nend\n";
    child
        .stdin
        .take()
        .unwrap()
        .write_all(lp.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("solution v1\nstatus optimal\n"), "{text}");
}
