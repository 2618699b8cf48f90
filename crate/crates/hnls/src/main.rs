use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hnls::config::{ExperimentKind, RunConfig};
use hnls::experiments::run;
use hnls::record::Verdict;

#[derive(Parser)]
#[command(name = "hnls", version, about = "Hermite-spectral NLS experiments in a harmonic trap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nonlinear evolution with observables, checkpoints and growth tracking
    Simulate(Common),
    /// Bilinear ratio sweep over dyadic blocks
    Bilinear(Common),
    /// Interaction virial identities under step refinement
    Virial(Common),
    /// Elliptic constant and the H² integration-by-parts identity
    Elliptic(Common),
    /// Modified-energy identity under step refinement
    EnergyCheck(Common),
    /// Harmonic against classical Sobolev norms
    Equivalence(Common),
    /// Discrete X^{s,b} norm of a trajectory
    Xsb(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Continue from a checkpoint written by the same config
    #[arg(long)]
    resume: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::Simulate(c) => (ExperimentKind::Simulate, c),
            Command::Bilinear(c) => (ExperimentKind::Bilinear, c),
            Command::Virial(c) => (ExperimentKind::Virial, c),
            Command::Elliptic(c) => (ExperimentKind::Elliptic, c),
            Command::EnergyCheck(c) => (ExperimentKind::EnergyCheck, c),
            Command::Equivalence(c) => (ExperimentKind::Equivalence, c),
            Command::Xsb(c) => (ExperimentKind::Xsb, c),
        }
    }
}

fn execute(kind: ExperimentKind, args: Common) -> Result<bool, String> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut cfg = RunConfig::parse(&text, Some(kind)).map_err(|e| format!("{}: {e}", args.config.display()))?;
    if cfg.experiment != kind {
        return Err(format!("config is for `{}`, not `{kind}`", cfg.experiment));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let record = run(kind, &cfg, &args.out, args.resume.as_deref()).map_err(|e| e.to_string())?;
    for c in &record.checks {
        println!("{} {}: {:e} (limit {:e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    for f in &record.failures {
        println!("FAIL {f}");
    }
    if let Some(reason) = &record.truncated {
        println!("truncated: {reason}");
    }
    if let (Some(p), Some(b)) = (record.exponent, record.bound_exponent) {
        println!("growth exponent {p:.4} ± {:.4} (bound {b:.4})", record.exponent_stderr.unwrap_or(f64::NAN));
    }
    if let Some(v) = record.verdict {
        println!("verdict {}", if v == Verdict::Pass { "PASS" } else { "FAIL" });
    }
    println!("config hash {}, outputs in {}", record.config_hash, args.out.display());
    Ok(record.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (kind, args) = Cli::parse().command.split();
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
