use std::fs;
use std::process::{Command, Output};

use rcx::Graph;
use serde_json::Value;

fn rcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcx")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn result(o: &Output) -> Value {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    assert_eq!(v["provenance"]["tool"], "rcx");
    v["result"].clone()
}

fn data_lines(s: &str) -> Vec<&str> {
    s.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn gen_writes_a_loadable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let p = path.to_str().unwrap();
    stdout(&rcx(&["gen", "--n", "10", "--delta", "3", "--seed", "4", "--out", p]));
    let g = Graph::from_json_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((g.n(), g.delta(), g.num_edges()), (10, 3, 15));
    assert!(g.is_regular());
    let r = result(&rcx(&["exact", "--graph", p, "--q", "2", "--beta", "0"]));
    assert!((r["log_z"].as_f64().unwrap() - 10.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn check_certifies_k6() {
    let r = result(&rcx(&["check", "--graph", "complete:6", "--delta-small", "0.2"]));
    assert_eq!(r["verdict"], "PASS");
}

#[test]
fn count_at_zero_coupling_is_n_ln_q() {
    let r = result(&rcx(&["count", "--graph", "complete:6", "--q", "100", "--beta", "0"]));
    assert!((r["log_ztilde"].as_f64().unwrap() - 6.0 * 100f64.ln()).abs() < 1e-9);
}

#[test]
fn count_matches_exact_on_k6() {
    let approx = result(&rcx(&["count", "--graph", "complete:6", "--q", "1e4", "--beta", "1.5", "--m", "6"]));
    let exact = result(&rcx(&["exact", "--graph", "complete:6", "--q", "1e4", "--beta", "1.5"]));
    let d = approx["log_ztilde"].as_f64().unwrap() - exact["log_z"].as_f64().unwrap();
    assert!(d.abs() / 6.0 < 0.02, "{d}");
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(rcx(&["count", "--graph", "complete:6", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(rcx(&["count", "--graph", "nonsense", "--q", "3", "--beta", "1"]).status.code(), Some(2));
}

#[test]
fn cap_exits_3() {
    let o = rcx(&["exact", "--graph", "rr:20:5:1", "--q", "3", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_is_deterministic_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let args = ["sweep", "--graph", "complete:6", "--q", "1e3,1e4", "--beta-grid", "0:3:3", "--m", "4", "--force", "--out", p];
    stdout(&rcx(&args));
    let first = fs::read_to_string(&path).unwrap();
    let rows = data_lines(&first);
    assert_eq!(rows[0].split(',').next(), Some("point"));
    assert_eq!(rows.len(), 7);
    assert!(rows[1..].iter().all(|r| r.ends_with(",ok")));

    fs::remove_file(&path).unwrap();
    stdout(&rcx(&args));
    assert_eq!(fs::read_to_string(&path).unwrap(), first);

    // a completed row is reused verbatim, an unfinished one is recomputed
    let mut cells: Vec<String> = rows[2].split(',').map(String::from).collect();
    cells[5] = "123.5".into();
    let kept = cells.join(",");
    let mut broken: Vec<String> = rows[3].split(',').map(String::from).collect();
    broken[11] = "error: interrupted".into();
    let edited = first.replace(rows[2], &kept).replace(rows[3], &broken.join(","));
    fs::write(&path, edited).unwrap();
    stdout(&rcx(&args));
    let resumed = fs::read_to_string(&path).unwrap();
    let again = data_lines(&resumed);
    assert_eq!(again[2], kept);
    assert_eq!(again[3], rows[3]);
}

#[test]
fn sample_is_reproducible_from_the_seed() {
    let args = ["sample", "--graph", "cycle:4", "--q", "3", "--beta", "1", "--eps", "0.4", "--m", "5", "--force", "--samples", "20"];
    let a = stdout(&rcx(&[&args[..], &["--seed", "9"]].concat()));
    let b = stdout(&rcx(&[&args[..], &["--seed", "9"]].concat()));
    assert_eq!(a, b);
    let lines = data_lines(&a);
    assert_eq!(lines.len(), 20);
    assert!(lines.iter().all(|l| u64::from_str_radix(l, 16).is_ok_and(|m| m < 16)));
}

#[test]
fn dynamics_emits_a_trajectory() {
    let o = rcx(&["dynamics", "--graph", "cycle:5", "--q", "3", "--beta", "1", "--kernel", "rc-glauber", "--steps", "10", "--start", "empty"]);
    let s = stdout(&o);
    let lines = data_lines(&s);
    assert_eq!(lines[0], "trial,step,edges,phase");
    assert!(lines.len() >= 11);
}

#[test]
fn phase_solves_the_critical_point() {
    let r = result(&rcx(&["phase", "--q", "1e8", "--delta", "5", "--solve-bc"]));
    let bc = r["beta_c"]["beta_c"].as_f64().unwrap();
    assert!((bc - 7.368288).abs() < 1e-5, "{bc}");
}

#[test]
fn expansion_agrees_with_brute_force() {
    let r = result(&rcx(&["polymers", "--graph", "cycle:4", "--model", "dis", "--m", "4"]));
    assert_eq!(r["count"], 13);
    assert_eq!(r["by_size"], serde_json::json!([0, 4, 4, 4, 1]));
    let e = result(&rcx(&["expansion", "--graph", "cycle:4", "--model", "dis", "--q", "1000", "--beta", "1", "--m", "8"]));
    let d = e["value"].as_f64().unwrap() - e["log_xi_brute_arena"].as_f64().unwrap();
    assert!(d.abs() < 1e-9, "{d}");
}
