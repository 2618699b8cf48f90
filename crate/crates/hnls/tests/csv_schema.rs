//! The CSV files the plotting tool reads: header names, the hash line and
//! the empty-cell convention.

use hnls::config::{ExperimentKind, RunConfig};
use hnls::experiments::run;
use hnls::output::{read_table, Table, OBSERVABLE_COLUMNS, RATIO_COLUMNS, RESIDUAL_COLUMNS};

fn table(dir: &std::path::Path, name: &str) -> Table {
    read_table(&std::fs::read(dir.join(name)).unwrap()).unwrap()
}

fn record_hash(dir: &std::path::Path) -> u64 {
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("record.json")).unwrap()).unwrap();
    u64::from_str_radix(v["config_hash"].as_str().unwrap().trim_start_matches("0x"), 16).unwrap()
}

#[test]
fn observables_schema() {
    assert_eq!(
        OBSERVABLE_COLUMNS.join(","),
        "t,mass,hamiltonian,h1,h2,h4,d2k_norm,moment2k,E_mod,S_term,R_term,residual"
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("experiment = simulate\nn_max = 6\ndt = 1e-2\nt_final = 0.2\nrecord_every = 5\n", None).unwrap();
    run(ExperimentKind::Simulate, &cfg, dir.path(), None).unwrap();
    let t = table(dir.path(), "observables.csv");
    assert_eq!(t.header, OBSERVABLE_COLUMNS);
    assert_eq!(t.hash, record_hash(dir.path()));
    // energies are not tracked here: empty, never zero
    assert!(t.column("E_mod").unwrap().iter().all(|v| v.is_none()));
    assert!(t.rows.iter().all(|r| r[t.header.iter().position(|h| h == "E_mod").unwrap()].is_empty()));
    assert!(t.column("mass").unwrap().iter().all(|v| v.is_some()));
}

#[test]
fn ratio_and_residual_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("experiment = bilinear\nt_final = 0.3\nn_max = 14\ntrials = 2\nblocks_n = 1, 2\n", None).unwrap();
    run(ExperimentKind::Bilinear, &cfg, dir.path(), None).unwrap();
    let t = table(dir.path(), "ratios.csv");
    assert_eq!(t.header, RATIO_COLUMNS);
    assert_eq!(t.hash, record_hash(dir.path()));
    assert_eq!(t.rows.len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("experiment = energy-check\nn_max = 6\ndt = 1e-2\nt_final = 0.2\nrecord_every = 1\nk = 0\n", None).unwrap();
    run(ExperimentKind::EnergyCheck, &cfg, dir.path(), None).unwrap();
    let t = table(dir.path(), "residual.csv");
    assert_eq!(t.header, RESIDUAL_COLUMNS);
    assert_eq!(t.hash, record_hash(dir.path()));
    let ratio = t.column("refinement_ratio").unwrap();
    assert_eq!(ratio[0], None);
    assert!(ratio[1].is_some());
    let obs = table(dir.path(), "observables.csv");
    assert!(obs.column("E_mod").unwrap().iter().all(|v| v.is_some()));
}

#[test]
fn reader_rejects_files_without_the_hash_line() {
    assert!(read_table(b"t,mass\n0,1\n").is_err());
    assert!(read_table(b"").is_err());
}
