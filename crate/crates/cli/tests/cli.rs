use std::path::Path;
use std::process::Command;

use orbitbound_cli::{dispatch, Outcome};
use serde_json::Value;

fn run(args: &[&str]) -> Outcome {
    dispatch(std::iter::once("orbitbound").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SL23: &str = r#"{"p": 3, "dim": 2, "generators": [[1, 1, 0, 1], [0, 2, 1, 0]]}"#;

#[test]
fn zsig_find_reports() {
    let o = run(&["zsig", "find", "2", "6"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["summary"], "no Zsigmondy prime");
    let o = run(&["zsig", "find", "2", "12", "--format", "plain"]);
    assert!(o.stdout.starts_with("(2, 12): Zsigmondy primes 13^1"), "{}", o.stdout);
    let o = run(&["zsig", "find", "2", "12", "--format", "csv"]);
    assert_eq!(o.stdout, "prime,multiplicity\n13,1\n");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["zsig", "find", "1", "6"][..],
        &["zsig", "find", "two", "6"],
        &["zsig", "scan", "--table", "nope"],
        &["zsig", "scan", "--table", "cor34", "--m-max", "1"],
        &["simple-order", "Q_3(5)"],
        &["simple-order", "A_1(6)"],
        &["out-order", "D_3(4)"],
        &["audit", "--family", "Z9"],
        &["orbits", "--gens", "/nonexistent/gens.json"],
        &["verify", "--p-set", "4"],
        &["bogus"],
    ] {
        let o = run(args);
        assert_eq!(o.code, 1, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let o = run(&["zsig", "scan", "--table", "nope"]);
    assert!(o.stderr.contains("known tables"), "{}", o.stderr);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
}

#[test]
fn scan_exit_codes() {
    let o = run(&["zsig", "scan", "--table", "feit_thm31", "--base-max", "30", "--m-max", "20"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["confirmed"], true);
    let o = run(&["zsig", "scan", "--table", "larger_thm32", "--base-max", "10", "--m-max", "6"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("assertion failed"));
    let unexpected = &json(&o)["unexpected"];
    assert!(unexpected.as_array().unwrap().iter().any(|c| c["base"] == 4 && c["m"] == 2));
}

#[test]
fn scan_csv_rows() {
    let o = run(&[
        "zsig", "scan", "--table", "cor34", "--base-max", "5", "--m-max", "4", "--prime-powers", "--format", "csv",
    ]);
    assert_eq!(o.code, 0);
    assert_eq!(
        o.stdout,
        "table,base,m,listed\ncor34,2,2,true\ncor34,2,4,true\ncor34,3,2,true\ncor34,3,4,true\ncor34,5,2,true\n"
    );
}

#[test]
fn golden_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("feit.txt");
    let g = golden.to_str().unwrap();
    let base = ["zsig", "scan", "--table", "feit_thm31", "--base-max", "20", "--m-max", "12"];
    let o = run(&[&base[..], &["--golden-out", g]].concat());
    assert_eq!(o.code, 0);
    let text = std::fs::read_to_string(&golden).unwrap();
    assert!(text.starts_with("feit_thm31 2 2\n"));
    let o = run(&[&base[..], &["--check-golden", g]].concat());
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["golden"]["matches"], true);
    std::fs::write(&golden, "feit_thm31 2 2\n").unwrap();
    let o = run(&[&base[..], &["--check-golden", g]].concat());
    assert_eq!(o.code, 2);
    assert_eq!(json(&o)["golden"]["matches"], false);
}

#[test]
fn group_records() {
    let o = run(&["simple-order", "A_1(4)"]);
    let v = json(&o);
    assert_eq!((v["order"].as_str(), v["order_factored"].as_str()), (Some("60"), Some("2^2 * 3 * 5")));
    let v = json(&run(&["out-order", "A_2(4)"]));
    assert_eq!((v["out_order"].as_u64(), v["out_abelian"].as_bool(), v["kk_bound"].as_u64()), (Some(12), Some(false), Some(6)));
    for name in ["M24", "Alt(6)", "Tits", "2A_3(3)", "G2(8)", "2B2(8)"] {
        assert_eq!(run(&["simple-order", name]).code, 0, "{name}");
    }
    let v = json(&run(&["simple-order", "A_1(2)"]));
    assert_eq!(v["simple"], false);
}

#[test]
fn audit_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("audit.json");
    let o = run(&["audit", "--family", "A,B", "--n-max", "3", "--q-max", "16", "--check-paper", "--report", report.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let summary = json(&o);
    assert_eq!(summary["all_valid"], true);
    let full: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let families: Vec<&str> = full["window"]["families"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(families, ["A", "B"]);
    assert_eq!(full["printed_check"]["discrepancies"].as_array().unwrap().len(), 3);
}

#[test]
fn audit_jobs_do_not_change_output() {
    let a = run(&["audit", "--n-max", "4", "--q-max", "64", "--jobs", "1"]);
    let b = run(&["audit", "--n-max", "4", "--q-max", "64", "--jobs", "2"]);
    let c = run(&["--jobs", "3", "audit", "--n-max", "4", "--q-max", "64"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(run(&["--jobs", "0", "zsig", "find", "2", "6"]).code, 1);
}

#[test]
fn orbits_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let sl = write(dir.path(), "sl.json", SL23);
    let o = run(&["orbits", "--gens", &sl, "--check-bound", "--json"]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    assert_eq!(v["orbits"]["orbit_sizes"], serde_json::json!([1, 8]));
    assert_eq!(v["bound"]["tight"], false);
    let o = run(&["orbits", "--gens", &sl, "--format", "csv"]);
    assert_eq!(o.stdout, "size,count\n1,1\n8,1\n");

    let uni = write(dir.path(), "uni.json", r#"{"p": 3, "dim": 2, "generators": [[1, 1, 0, 1]]}"#);
    let o = run(&["orbits", "--gens", &uni]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["orbits"]["admissibility"], "rejected");
    let o = run(&["orbits", "--gens", &uni, "--check-bound"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("completely reducible"));

    let singular = write(dir.path(), "s.json", r#"{"p": 5, "dim": 2, "generators": [[1, 2, 2, 4]]}"#);
    assert_eq!(run(&["orbits", "--gens", &singular]).code, 1);
    let malformed = write(dir.path(), "m.json", r#"{"p": 5}"#);
    assert_eq!(run(&["orbits", "--gens", &malformed]).code, 1);
    assert_eq!(run(&["orbits", "--gens", &sl, "--cap", "5"]).code, 1);
}

#[test]
fn verify_small_corpus() {
    let o = run(&["verify", "--seed", "3", "--count", "5", "--p-set", "2,3", "--dim-max", "2"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["generated"], 5);
    assert_eq!(v["passed"], 5);
    assert_eq!(v["fixtures"].as_array().unwrap().len(), 5);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn config_file_handling() {
    let dir = tempfile::tempdir().unwrap();
    let plain = write(dir.path(), "plain.conf", "# defaults\nformat = plain\n");
    let o = run(&["--config", &plain, "zsig", "find", "2", "6"]);
    assert!(o.stdout.starts_with("(2, 6): no Zsigmondy prime"), "{}", o.stdout);
    let o = run(&["--config", &plain, "--format", "json", "zsig", "find", "2", "6"]);
    assert_eq!(json(&o)["summary"], "no Zsigmondy prime");

    let bad = write(dir.path(), "bad.conf", "colour = red\n");
    let o = run(&["--config", &bad, "zsig", "find", "2", "6"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("unknown key"));
    assert_eq!(run(&["--config", "/nonexistent.conf", "zsig", "find", "2", "6"]).code, 1);

    let sl = write(dir.path(), "sl.json", SL23);
    let capped = write(dir.path(), "cap.conf", "group_cap = 5\n");
    assert_eq!(run(&["--config", &capped, "orbits", "--gens", &sl]).code, 1);
    assert_eq!(run(&["--config", &capped, "orbits", "--gens", &sl, "--cap", "100"]).code, 0);

    let out = dir.path().join("out.json");
    let conf = write(dir.path(), "out.conf", &format!("output = {}\n", out.display()));
    let o = run(&["--config", &conf, "zsig", "find", "2", "6"]);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("no Zsigmondy prime"));
}

#[test]
fn output_and_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["--output", out.to_str().unwrap(), "simple-order", "M11"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, ""));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["order"], "7920");
    assert!(v.get("generated_at").is_none());
    let o = run(&["--timestamps", "simple-order", "M11"]);
    assert!(json(&o)["generated_at"].is_u64());
}

#[test]
fn binary_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let sl = write(dir.path(), "sl.json", SL23);
    let bin = env!("CARGO_BIN_EXE_orbitbound");
    let status = |envs: &[(&str, &str)], extra: &[&str]| {
        let mut cmd = Command::new(bin);
        cmd.args(["orbits", "--gens", &sl]).args(extra);
        cmd.env_remove("ORBITBOUND_GROUP_CAP").env_remove("ORBITBOUND_VECTOR_CAP");
        for (k, v) in envs {
            cmd.env(k, v);
        }
        cmd.output().unwrap()
    };
    let ok = status(&[], &[]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"orbit_sizes\""));
    assert_eq!(status(&[("ORBITBOUND_GROUP_CAP", "5")], &[]).status.code(), Some(1));
    assert_eq!(status(&[("ORBITBOUND_GROUP_CAP", "5")], &["--cap", "24"]).status.code(), Some(0));
    assert_eq!(status(&[("ORBITBOUND_VECTOR_CAP", "4")], &[]).status.code(), Some(1));
    assert_eq!(status(&[("ORBITBOUND_GROUP_CAP", "lots")], &[]).status.code(), Some(1));

    let conf = write(dir.path(), "cap.conf", "group_cap = 100\n");
    let env_wins = Command::new(bin)
        .args(["--config", &conf, "orbits", "--gens", &sl])
        .env("ORBITBOUND_GROUP_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(env_wins.status.code(), Some(1));

    let find = Command::new(bin).args(["zsig", "find", "2", "6"]).output().unwrap();
    assert_eq!(find.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&find.stdout), run(&["zsig", "find", "2", "6"]).stdout);
}
