use std::path::PathBuf;
use std::process::{Command, Output};

fn ccl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccl")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ccl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let a = ccl(&["gen", "--kind", "steiner", "--n", "14", "--seed", "9"]);
    let b = ccl(&["gen", "--kind", "steiner", "--n", "14", "--seed", "9"]);
    let c = ccl(&["gen", "--kind", "steiner", "--n", "14", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).lines().any(|l| l.starts_with('Z')));
}

#[test]
fn gen_pads_plain_graphs_and_says_so() {
    let o = ccl(&["gen", "--n", "10", "--seed", "1"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("padded from n=10 to n'=16"));
    assert!(text.lines().any(|l| l.starts_with("U 16 ")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("padded"));
}

#[test]
fn run_apsp_writes_versioned_json() {
    let input = scratch("path.txt");
    std::fs::write(&input, "U 16 5\n1 2 3\n2 3 4\n").unwrap();
    let out = scratch("path.json");
    let o = ccl(&["run", "apsp", "--input", input.to_str().unwrap(), "--seed", "1", "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["distances"][0][2], 7);
}

#[test]
fn steiner_without_terminals_is_a_usage_error() {
    let input = scratch("noz.txt");
    std::fs::write(&input, "U 4 5\n1 2 1\n2 3 1\n3 4 1\n").unwrap();
    let o = ccl(&["run", "steiner", "--input", input.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Z"));
}

#[test]
fn missing_seed_is_a_usage_error() {
    assert_eq!(ccl(&["gen", "--n", "16"]).status.code(), Some(1));
}

#[test]
fn infeasible_dmst_exits_two() {
    let input = scratch("infeasible.txt");
    std::fs::write(&input, "D 3 5\n1 2 1\n3 2 1\nR 1\n").unwrap();
    let o = ccl(&["run", "dmst", "--input", input.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn compare_verdicts() {
    let a = ccl(&["compare", "apsp", "--n", "16", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(stdout_json(&a)["verdict"], "matrices identical");

    let s = ccl(&["compare", "steiner", "--n", "12", "--terminals", "4", "--seed", "4"]);
    assert!(s.status.success());
    let v = stdout_json(&s);
    assert_eq!(v["ok"], true);
    assert!(v["verdict"].as_str().unwrap().starts_with("ratio "));

    let d = ccl(&["compare", "dmst", "--n", "12", "--seed", "4", "--model", "measured"]);
    assert!(d.status.success());
    assert_eq!(stdout_json(&d)["verdict"], "weight equal");
}

#[test]
fn injected_search_failures_surface_as_violations() {
    let o = ccl(&["compare", "apsp", "--n", "16", "--density", "0.6", "--seed", "2", "--failure-rate", "1.0"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["ok"], false);
}

#[test]
fn analyze_outputs() {
    let c = ccl(&["analyze", "crossovers", "--format", "csv"]);
    let text = String::from_utf8_lossy(&c.stdout);
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().nth(1).unwrap().starts_with("h,trivial,1.27"));

    let f = ccl(&["analyze", "formulas", "--n", "4096"]);
    assert!(String::from_utf8_lossy(&f.stdout).starts_with("n,f,h,g,trivial"));

    let m = ccl(&["analyze", "memory", "--wmax", "8", "--format", "json"]);
    let v = stdout_json(&m);
    assert_eq!(v["wmax"], 8.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_ccl"))
            .args(["sweep", "dmst", "--n", "9", "--trials", "6", "--seed", "3"])
            .env("CCL_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let two = run("2");
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    let text = String::from_utf8_lossy(&one.stdout);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.contains(",ok,")));
}
