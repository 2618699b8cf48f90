#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn hnls(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hnls")).args(args).output().unwrap()
}

/// A short nonlinear run, small enough for debug builds.
pub const SMALL_SIMULATE: &str = "\
experiment = simulate
dt = 1e-2
t_final = 1
n_max = 8
record_every = 5
data = random-smooth
data.decay = 2
data.max_degree = 2
amplitude = 0.5
seed = 9
checkpoint_every = 4
track_energy = true
";
