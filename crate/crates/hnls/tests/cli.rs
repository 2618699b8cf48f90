mod common;

use common::{hnls, write_config, SMALL_SIMULATE};

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", SMALL_SIMULATE);
    let out = dir.path().join("out");
    let o = hnls(&["simulate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["observables.csv", "record.json", "final.hnls", "checkpoint_0000000020.hnls"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let record: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("record.json")).unwrap()).unwrap();
    // no growth tracking, so no verdict
    assert!(record["verdict"].is_null());
    let csv = std::fs::read_to_string(out.join("observables.csv")).unwrap();
    assert!(csv.starts_with(&format!("# config_hash={}\n", record["config_hash"].as_str().unwrap())));
}

#[test]
fn failed_growth_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Too few records for a fit: the run completes but cannot pass.
    let text = SMALL_SIMULATE.replace("checkpoint_every = 4", "track_growth = true");
    let cfg = write_config(dir.path(), "run.conf", &text);
    let out = dir.path().join("out");
    let o = hnls(&["simulate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("record.json")).unwrap()).unwrap();
    assert_eq!(record["verdict"], "FAIL");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = write_config(dir.path(), "bad.conf", "dt = 1e-3\nbogus = 1\n");
    let o = hnls(&["simulate", "--config", s(&bad), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key `bogus`"));

    let other = write_config(dir.path(), "other.conf", "experiment = xsb\n");
    let o = hnls(&["simulate", "--config", s(&other), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));

    let o = hnls(&["simulate", "--config", s(&dir.path().join("missing.conf"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn resume_is_only_for_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "x.conf", "experiment = xsb\nn_max = 4\nrecord_every = 1\ndt = 1e-2\nt_final = 0.5\nnonlinearity = linear\n");
    let o = hnls(&["xsb", "--config", s(&cfg), "--out", s(&dir.path().join("o")), "--resume", "whatever.hnls"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_flag_changes_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", SMALL_SIMULATE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(hnls(&["simulate", "--config", s(&cfg), "--out", s(&a)]).status.code(), Some(0));
    assert_eq!(hnls(&["simulate", "--config", s(&cfg), "--out", s(&b), "--seed", "10"]).status.code(), Some(0));
    let first = |p: &std::path::Path| std::fs::read_to_string(p.join("observables.csv")).unwrap().lines().next().unwrap().to_string();
    assert_ne!(first(&a), first(&b));
}

#[test]
fn every_subcommand_is_wired() {
    let o = hnls(&["--help"]);
    let help = String::from_utf8_lossy(&o.stdout);
    for cmd in ["simulate", "bilinear", "virial", "elliptic", "energy-check", "equivalence", "xsb"] {
        assert!(help.contains(cmd), "{cmd} missing from help");
    }
}
