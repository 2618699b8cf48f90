//! Nonlinear runs: observables, checkpoints, modified-energy tracking and
//! the growth verdict.

use std::path::{Path, PathBuf};

use hnls_core::dynamics::{evolve_from, Control, Nonlinearity, Observables};
use hnls_core::energies::{EnergyEvaluator, EnergyReport, MAX_STAMP_SPACING};
use hnls_core::hermite::SpectralField;
use hnls_core::spectral::{bracket_power_even, neg_laplacian_power, norm_hs};

use crate::checkpoint::{self, CheckpointHeader, VERSION};
use crate::config::{ExperimentKind, RunConfig};
use crate::fit::{fit_power, MIN_SAMPLES};
use crate::output::{write_table, Cell, OBSERVABLE_COLUMNS};
use crate::record::{RunError, RunRecord, Verdict};

/// Slack on the fitted exponent before the growth verdict fails.
pub const EXPONENT_TOLERANCE: f64 = 0.1;
/// Relative slack of the pointwise check against the fitted bound curve.
pub const POINTWISE_TOLERANCE: f64 = 0.1;

/// Exponent `2(2k−1)/3` of the `ℋ^{2k}` growth bound.
pub fn bound_exponent(k: usize) -> f64 {
    2.0 * (2.0 * k as f64 - 1.0) / 3.0
}

/// One recorded stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct StampRow {
    pub t: f64,
    pub obs: Observables,
    /// `‖u‖_{ℋ^{2k}}`
    pub h2k: f64,
    /// `‖(−Δ)^k u‖`
    pub d2k: f64,
    /// `‖⟨x⟩^{2k} u‖`
    pub moment2k: f64,
    pub energy: Option<EnergyReport>,
}

impl StampRow {
    pub fn new(t: f64, obs: Observables, u: &SpectralField, k: usize, energy: Option<EnergyReport>) -> StampRow {
        StampRow {
            t,
            obs,
            h2k: norm_hs(u, 2.0 * k as f64),
            d2k: neg_laplacian_power(u, k).norm(),
            moment2k: bracket_power_even(u, k).norm(),
            energy,
        }
    }
}

/// Pointwise residual `(E_{j+1} − E_{j−1})/(2h) − R_j` where energies exist
/// and stamps are fine enough to difference.
pub fn energy_residuals(rows: &[StampRow]) -> Vec<Option<f64>> {
    let mut out = vec![None; rows.len()];
    if rows.len() < 3 {
        return out;
    }
    let h = rows[1].t - rows[0].t;
    if !(h > 0.0 && h <= MAX_STAMP_SPACING * (1.0 + 1e-12)) {
        return out;
    }
    for j in 1..rows.len() - 1 {
        if let (Some(a), Some(b), Some(c)) = (rows[j - 1].energy, rows[j].energy, rows[j + 1].energy) {
            out[j] = Some((c.e - a.e) / (2.0 * h) - b.r);
        }
    }
    out
}

pub fn observable_rows(rows: &[StampRow]) -> Vec<Vec<Cell>> {
    let residual = energy_residuals(rows);
    rows.iter()
        .zip(residual)
        .map(|(r, res)| {
            vec![
                r.t.into(),
                r.obs.mass.into(),
                r.obs.hamiltonian.into(),
                r.obs.h1.into(),
                r.obs.h2.into(),
                r.obs.h4.into(),
                r.d2k.into(),
                r.moment2k.into(),
                r.energy.map(|e| e.e).into(),
                r.energy.map(|e| e.s).into(),
                r.energy.map(|e| e.r).into(),
                res.into(),
            ]
        })
        .collect()
}

/// Fitted exponent over the second half of the run plus the pointwise check
/// against `C⟨t⟩^{2(2k−1)/3}`, `C` fitted over the whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthAssessment {
    pub exponent: f64,
    pub stderr: f64,
    pub bound_exponent: f64,
    pub constant: f64,
    pub exponent_ok: bool,
    pub pointwise_ok: bool,
}

pub fn assess_growth(times: &[f64], values: &[f64], k: usize) -> Result<GrowthAssessment, RunError> {
    let t_end = times.last().copied().unwrap_or(0.0);
    let (late_t, late_y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t > 0.0 && **t >= 0.5 * t_end)
        .map(|(t, y)| (*t, *y))
        .unzip();
    let late = fit_power(&late_t, &late_y)?;
    let bracket: Vec<f64> = times.iter().map(|t| (1.0 + t * t).sqrt()).collect();
    let whole = fit_power(&bracket, values)?;
    let p_bound = bound_exponent(k);
    let constant = whole.log_constant.exp();
    let pointwise_ok = bracket
        .iter()
        .zip(values)
        .all(|(b, y)| *y <= constant * b.powf(p_bound) * (1.0 + POINTWISE_TOLERANCE));
    Ok(GrowthAssessment {
        exponent: late.exponent,
        stderr: late.stderr,
        bound_exponent: p_bound,
        constant,
        exponent_ok: late.exponent <= p_bound + EXPONENT_TOLERANCE,
        pointwise_ok,
    })
}

fn header(cfg: &RunConfig, t: f64) -> CheckpointHeader {
    CheckpointHeader {
        version: VERSION,
        n_max: cfg.n_max,
        sign: cfg.nonlinearity.as_sigma_i32(),
        t,
        dt: cfg.dt,
        config_hash: cfg.hash(),
    }
}

/// Initial state and step index, either fresh or from a checkpoint written
/// by a run of the same configuration.
fn starting_point(cfg: &RunConfig, resume: Option<&Path>) -> Result<(SpectralField, u64), RunError> {
    let Some(path) = resume else {
        return Ok((cfg.initial_data().build(cfg.n_max, cfg.amplitude)?, 0));
    };
    let ck = checkpoint::load(path)?;
    if ck.header.config_hash != cfg.hash() {
        return Err(RunError::Resume(format!(
            "checkpoint was written for config {:#018x}, this config is {:#018x}",
            ck.header.config_hash,
            cfg.hash()
        )));
    }
    let step = (ck.header.t / cfg.dt).round();
    if (step * cfg.dt - ck.header.t).abs() > 1e-9 * cfg.dt.max(ck.header.t) {
        return Err(RunError::Resume(format!("checkpoint time {} is not a step of dt={}", ck.header.t, cfg.dt)));
    }
    Ok((ck.field, step as u64))
}

/// Runs a nonlinear evolution and writes `observables.csv`, checkpoints and
/// `record.json` into `out`.
pub fn simulate(cfg: &RunConfig, out: &Path, resume: Option<&Path>) -> Result<RunRecord, RunError> {
    std::fs::create_dir_all(out)?;
    let hash = cfg.hash();
    let evo = cfg.evolution();
    let (u0, start) = starting_point(cfg, resume)?;
    let energy = if cfg.track_energy {
        Some(EnergyEvaluator::new(cfg.n_max)?)
    } else {
        None
    };
    if cfg.track_growth && cfg.nonlinearity == Nonlinearity::Focusing {
        log::warn!("growth tracking on a focusing run: the energy does not control ℋ¹");
    }

    let mut rows: Vec<StampRow> = Vec::new();
    let mut checkpoints: Vec<String> = Vec::new();
    let mut truncated = None;
    let mut last: Option<(f64, SpectralField)> = None;
    let mut failure: Option<RunError> = None;
    let every = cfg.record_every as u64;
    evolve_from(&u0, start, &evo, |i, u, traj| {
        let t = i as f64 * cfg.dt;
        let obs = *traj.observables.last().expect("hook follows a record");
        let report = match &energy {
            Some(ev) => Some(ev.report(u, cfg.k, cfg.nonlinearity)?),
            None => None,
        };
        rows.push(StampRow::new(t, obs, u, cfg.k, report));
        last = Some((t, u.clone()));
        let index = i / every;
        if cfg.checkpoint_every > 0 && i != start && index % cfg.checkpoint_every as u64 == 0 {
            let name = format!("checkpoint_{i:010}.hnls");
            if let Err(e) = checkpoint::save(&out.join(&name), u, &header(cfg, t)) {
                failure = Some(e.into());
                return Ok(Control::Stop);
            }
            checkpoints.push(name);
        }
        if cfg.track_growth {
            if let Some(w) = traj.warnings.first() {
                truncated = Some(format!(
                    "spectral tail fraction {:.3e} exceeded the resolution threshold at t={}",
                    w.fraction, w.t
                ));
                return Ok(Control::Stop);
            }
        }
        Ok(Control::Continue)
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let mut record = RunRecord::new(ExperimentKind::Simulate, hash);
    if let Some((t, u)) = &last {
        checkpoint::save(&out.join("final.hnls"), u, &header(cfg, *t))?;
        checkpoints.push("final.hnls".into());
    }
    write_table(&out.join("observables.csv"), hash, &OBSERVABLE_COLUMNS, &observable_rows(&rows))?;
    record.csv.push("observables.csv".into());
    record.checkpoints = checkpoints;
    record.t_start = rows.first().map(|r| r.t);
    record.t_end = rows.last().map(|r| r.t);
    record.truncated = truncated;
    if let (Some(a), Some(b)) = (rows.first(), rows.last()) {
        record
            .summary
            .insert("mass_drift_rel".into(), ((b.obs.mass - a.obs.mass) / a.obs.mass).abs());
        record
            .summary
            .insert("hamiltonian_drift".into(), (b.obs.hamiltonian - a.obs.hamiltonian).abs());
    }

    if cfg.track_growth {
        let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let values: Vec<f64> = rows.iter().map(|r| r.h2k).collect();
        record.bound_exponent = Some(bound_exponent(cfg.k));
        if rows.len() < 2 * MIN_SAMPLES {
            record.failures.push(format!(
                "{} records are too few for the growth fit (need {})",
                rows.len(),
                2 * MIN_SAMPLES
            ));
            record.verdict = Some(Verdict::Fail);
        } else {
            let g = assess_growth(&times, &values, cfg.k)?;
            record.exponent = Some(g.exponent);
            record.exponent_stderr = Some(g.stderr);
            record.summary.insert("bound_constant".into(), g.constant);
            record.pointwise_verdict = Some(Verdict::from_bool(g.pointwise_ok));
            let ok = g.exponent_ok && g.pointwise_ok && record.truncated.is_none();
            record.verdict = Some(Verdict::from_bool(ok));
        }
    }
    record.write(out)?;
    Ok(record)
}

/// The growth experiment: [`simulate`] with growth tracking forced on.
pub fn run_growth(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let mut cfg = cfg.clone();
    cfg.track_growth = true;
    simulate(&cfg, out, None)
}

/// Path of the final checkpoint a run writes into `out`.
pub fn final_checkpoint(out: &Path) -> PathBuf {
    out.join("final.hnls")
}
