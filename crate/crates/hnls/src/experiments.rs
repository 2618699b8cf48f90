//! Experiment runners behind the CLI subcommands.

use std::f64::consts::PI;
use std::path::Path;

use hnls_core::data::{derive_seed, random_smooth};
use hnls_core::dynamics::evolve;
use hnls_core::energies::identity_residual;
use hnls_core::estimates::{
    bilinear_ratio, elliptic_constant, h2_identity, localized_pair, virial_residuals, xsb_discrete, Kernel,
    VirialResiduals, WeightRhoM,
};
use hnls_core::hermite::{Axis, SpectralField};
use hnls_core::spectral::{classical_norms, BoxSpec};
use num_complex::Complex64;

use crate::config::{ExperimentKind, RunConfig};
use crate::output::{write_table, Cell, OBSERVABLE_COLUMNS, RATIO_COLUMNS, RESIDUAL_COLUMNS};
use crate::record::{Check, RunError, RunRecord};
use crate::simulate::{observable_rows, simulate, StampRow};
use crate::sweep::sweep;

/// Largest pointwise residual accepted for the virial identities at the configured step.
pub const VIRIAL_TOLERANCE: f64 = 1e-6;
/// Accepted range of the residual ratio under step halving (second order).
pub const SECOND_ORDER_RANGE: (f64, f64) = (3.2, 4.8);
/// Normalized modified-energy residual accepted at the configured step.
pub const ENERGY_TOLERANCE: f64 = 1e-4;
/// Minimum shrink factor of the energy residual under step halving.
pub const ENERGY_SHRINK: f64 = 3.0;
/// Relative tolerance of the quadrature identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;
/// Reported bound for the equivalence ratios and the elliptic constant.
pub const CONSTANT_BOUND: f64 = 10.0;
/// Largest slope of log(max ratio) against log N.
pub const SLOPE_TOLERANCE: f64 = 0.1;

/// Runs `kind` with `cfg`, writing outputs into `out`.
pub fn run(kind: ExperimentKind, cfg: &RunConfig, out: &Path, resume: Option<&Path>) -> Result<RunRecord, RunError> {
    if resume.is_some() && kind != ExperimentKind::Simulate {
        return Err(RunError::Resume(format!("`{kind}` runs cannot be resumed")));
    }
    std::fs::create_dir_all(out)?;
    let record = match kind {
        ExperimentKind::Simulate => return simulate(cfg, out, resume),
        ExperimentKind::Bilinear => bilinear(cfg, out)?,
        ExperimentKind::Virial => virial(cfg, out)?,
        ExperimentKind::Elliptic => elliptic(cfg, out)?,
        ExperimentKind::EnergyCheck => energy_check(cfg, out)?,
        ExperimentKind::Equivalence => equivalence(cfg, out)?,
        ExperimentKind::Xsb => xsb(cfg, out)?,
    };
    record.write(out)?;
    Ok(record)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    sxy / sxx
}

fn residual_row(check: &str, case: &str, dt: f64, residual: f64, ratio: Option<f64>) -> Vec<Cell> {
    vec![check.into(), case.into(), dt.into(), residual.into(), ratio.into()]
}

fn bilinear(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let hash = cfg.hash();
    let mut record = RunRecord::new(ExperimentKind::Bilinear, hash);
    let cells: Vec<(u64, u64)> = cfg
        .blocks_n
        .iter()
        .flat_map(|&n| cfg.blocks_m.iter().map(move |&m| (n, m)))
        .collect();
    let results = sweep(&cells, |&(n, m)| bilinear_ratio(n, m, cfg.t_final, cfg.trials, cfg.seed, cfg.n_max));
    let mut rows = Vec::new();
    for ((n, m), r) in &results {
        let mut row: Vec<Cell> = vec![Cell::Int(*n as i64), Cell::Int(*m as i64), Cell::Int(cfg.trials as i64)];
        match r {
            Ok(cell) => {
                row.extend([cell.max.into(), cell.median.into()]);
                row.extend([cfg.t_final.into(), Cell::Text(cfg.seed.to_string()), Cell::Int(cfg.n_max as i64)]);
                row.push("ok".into());
            }
            Err(e) => {
                record.failures.push(format!("N={n}, M={m}: {e}"));
                row.extend([Cell::Num(None), Cell::Num(None)]);
                row.extend([cfg.t_final.into(), Cell::Text(cfg.seed.to_string()), Cell::Int(cfg.n_max as i64)]);
                row.push(Cell::Text(format!("error: {e}")));
            }
        }
        rows.push(row);
    }
    write_table(&out.join("ratios.csv"), hash, &RATIO_COLUMNS, &rows)?;
    record.csv.push("ratios.csv".into());

    for &m in &cfg.blocks_m {
        let ok: Vec<(f64, f64)> = results
            .iter()
            .filter_map(|((n, mm), r)| match r {
                Ok(c) if *mm == m => Some((*n as f64, c.max)),
                _ => None,
            })
            .collect();
        if ok.len() >= 2 {
            let (x, y): (Vec<f64>, Vec<f64>) = ok.into_iter().unzip();
            record
                .checks
                .push(Check::at_most(format!("slope of log max ratio vs log N, M={m}"), log_slope(&x, &y), SLOPE_TOLERANCE));
        }
    }
    if let Some((_, Ok(c))) = results.iter().find(|((n, m), _)| *n == 1 && *m == 1) {
        let exact = cfg.t_final / (2.0 * PI);
        record
            .checks
            .push(Check::at_most("N=M=1 against T/(2π)", (c.max - exact).abs(), 1e-8));
    }
    Ok(record)
}

fn virial(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let hash = cfg.hash();
    let mut record = RunRecord::new(ExperimentKind::Virial, hash);
    let cells: Vec<(usize, usize)> = (0..cfg.virial_pairs)
        .flat_map(|p| (0..cfg.virial_weight.len()).map(move |w| (p, w)))
        .collect();
    let results = sweep(&cells, |&(p, w)| -> Result<(VirialResiduals, VirialResiduals), RunError> {
        let (u, v) = localized_pair(cfg.virial_eps, derive_seed(cfg.seed, &[p as u64]));
        let kernel = Kernel::Rho(WeightRhoM::new(cfg.virial_weight[w])?);
        let coarse = virial_residuals(&u, &v, &kernel, cfg.t_final, cfg.dt, Axis::X1)?;
        let fine = virial_residuals(&u, &v, &kernel, cfg.t_final, 0.5 * cfg.dt, Axis::X1)?;
        Ok((coarse, fine))
    });
    let mut residual_rows = Vec::new();
    let mut detail_rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi: f64 = 0.0;
    let mut hessian: f64 = 0.0;
    let mut first_ratio: f64 = 0.0;
    for ((p, w), r) in &results {
        let m = cfg.virial_weight[*w];
        let case = format!("pair{p}-M{m}");
        let (coarse, fine) = match r {
            Ok(x) => x,
            Err(e) => {
                record.failures.push(format!("{case}: {e}"));
                continue;
            }
        };
        for (name, c, f) in [
            ("virial-first", coarse.max_first, fine.max_first),
            ("virial-second", coarse.max_second, fine.max_second),
        ] {
            residual_rows.push(residual_row(name, &case, cfg.dt, c, None));
            residual_rows.push(residual_row(name, &case, 0.5 * cfg.dt, f, Some(c / f)));
            worst = worst.max(c);
            ratio_lo = ratio_lo.min(c / f);
            ratio_hi = ratio_hi.max(c / f);
        }
        hessian = hessian.max(coarse.hessian_constant);
        first_ratio = first_ratio.max(coarse.first_derivative_ratio);
        detail_rows.push(vec![
            Cell::Int(*p as i64),
            m.into(),
            cfg.dt.into(),
            coarse.max_first.into(),
            coarse.max_second.into(),
            Cell::Text(coarse.refinement_ok.to_string()),
            coarse.hessian_constant.into(),
            coarse.first_derivative_ratio.into(),
        ]);
    }
    write_table(&out.join("residual.csv"), hash, &RESIDUAL_COLUMNS, &residual_rows)?;
    write_table(
        &out.join("virial.csv"),
        hash,
        &[
            "pair",
            "M",
            "dt",
            "max_first",
            "max_second",
            "refinement_ok",
            "hessian_constant",
            "first_derivative_ratio",
        ],
        &detail_rows,
    )?;
    record.csv.extend(["residual.csv".into(), "virial.csv".into()]);
    record.summary.insert("hessian_constant_max".into(), hessian);
    record.summary.insert("first_derivative_ratio_max".into(), first_ratio);
    record.checks.push(Check::at_most("largest virial residual", worst, VIRIAL_TOLERANCE));
    record
        .checks
        .push(Check::at_least("smallest refinement ratio", ratio_lo, SECOND_ORDER_RANGE.0));
    record
        .checks
        .push(Check::at_most("largest refinement ratio", ratio_hi, SECOND_ORDER_RANGE.1));
    record
        .checks
        .push(Check::at_most("|I'| against its mass-momentum bound", first_ratio, 1.0));
    Ok(record)
}

/// Test functions for the elliptic sweep: the ground state, a fixed mix of
/// low modes and a seeded smooth random field.
pub fn elliptic_fields(seed: u64) -> Vec<(&'static str, SpectralField)> {
    let mut mixed = SpectralField::zeros(3);
    mixed.set(1, 0, Complex64::new(1.0, 0.0));
    mixed.set(0, 2, Complex64::new(0.5, 0.0));
    mixed.set(2, 1, Complex64::new(0.0, 0.7));
    vec![
        ("ground", SpectralField::ground_state(0)),
        ("mixed", mixed),
        ("random", random_smooth(6, 6, 1.0, 1.0, derive_seed(seed, &[0xe1]))),
    ]
}

/// Real fields with Gaussian coefficients, for the integration-by-parts identity.
pub fn random_real_field(n_max: usize, seed: u64) -> SpectralField {
    let u = random_smooth(n_max, n_max, 1.0, 1.0, seed);
    SpectralField::from_fn(n_max, |a, b| Complex64::new(u.get(a, b).re, 0.0))
}

fn elliptic(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let hash = cfg.hash();
    let mut record = RunRecord::new(ExperimentKind::Elliptic, hash);
    let points: Vec<(f64, f64)> = (0..5)
        .flat_map(|i| (0..5).map(move |j| (-1.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64)))
        .collect();
    let mut rows = Vec::new();
    let mut overall: f64 = 0.0;
    for (name, phi) in elliptic_fields(cfg.seed) {
        let mut per_lambda = Vec::new();
        for &lambda in &cfg.lambdas {
            let mut worst: f64 = 0.0;
            for &x in &points {
                let (value, status) = match elliptic_constant(&phi, lambda, x) {
                    Ok(c) => (Some(c), "ok".to_string()),
                    Err(e) => (None, format!("error: {e}")),
                };
                if let Some(c) = value {
                    worst = worst.max(c);
                }
                rows.push(vec![
                    name.into(),
                    lambda.into(),
                    x.0.into(),
                    x.1.into(),
                    value.into(),
                    Cell::Text(status),
                ]);
            }
            per_lambda.push((lambda, worst));
            overall = overall.max(worst);
        }
        record.summary.insert(format!("max_constant_{name}"), per_lambda.iter().fold(0.0, |m, p| m.max(p.1)));
        if per_lambda.len() >= 2 {
            let (_, a) = per_lambda[per_lambda.len() - 2];
            let (_, b) = per_lambda[per_lambda.len() - 1];
            record
                .checks
                .push(Check::at_most(format!("{name}: growth of the maximum at the finest scale"), b - a, 1e-6 * a.max(1e-300)));
        }
    }
    record.checks.push(Check::at_most("largest elliptic constant", overall, CONSTANT_BOUND));

    let results = sweep(&(0..cfg.fields).collect::<Vec<_>>(), |&i| {
        h2_identity(&random_real_field(6, derive_seed(cfg.seed, &[0x42, i as u64])))
    });
    let mut worst: f64 = 0.0;
    let mut residual_rows = Vec::new();
    for (i, r) in results {
        match r {
            Ok((l, rr)) => {
                let rel = (l - rr).abs() / rr.abs();
                worst = worst.max(rel);
                residual_rows.push(residual_row("h2-identity", &format!("field{i}"), 0.0, rel, None));
            }
            Err(e) => record.failures.push(format!("field {i}: {e}")),
        }
    }
    write_table(&out.join("elliptic.csv"), hash, &["phi", "lambda", "x1", "x2", "constant", "status"], &rows)?;
    write_table(&out.join("residual.csv"), hash, &RESIDUAL_COLUMNS, &residual_rows)?;
    record.csv.extend(["elliptic.csv".into(), "residual.csv".into()]);
    record
        .checks
        .push(Check::at_most("H² identity relative error", worst, IDENTITY_TOLERANCE));
    Ok(record)
}

fn energy_check(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let hash = cfg.hash();
    let mut record = RunRecord::new(ExperimentKind::EnergyCheck, hash);
    let u0 = cfg.initial_data().build(cfg.n_max, cfg.amplitude)?;
    let mut evo = cfg.evolution();
    evo.keep_snapshots = true;
    let coarse_traj = evolve(&u0, &evo)?;
    let coarse = identity_residual(&coarse_traj, cfg.k, cfg.nonlinearity)?;
    // Stamps stay `record_every` steps apart, so the stamp spacing halves with
    // the step and the trapezoid error shrinks with the splitting error.
    evo.dt *= 0.5;
    let fine = identity_residual(&evolve(&u0, &evo)?, cfg.k, cfg.nonlinearity)?;

    let rows: Vec<StampRow> = coarse_traj
        .times
        .iter()
        .zip(&coarse_traj.observables)
        .zip(&coarse_traj.snapshots)
        .zip(&coarse.reports)
        .map(|(((t, o), u), e)| StampRow::new(*t, *o, u, cfg.k, Some(*e)))
        .collect();
    write_table(&out.join("observables.csv"), hash, &OBSERVABLE_COLUMNS, &observable_rows(&rows))?;

    let (a, b) = (coarse.normalized_integrated(), fine.normalized_integrated());
    let case = format!("k={}", cfg.k);
    let residual_rows = vec![
        residual_row("energy", &case, cfg.dt, a, None),
        residual_row("energy", &case, 0.5 * cfg.dt, b, Some(a / b)),
    ];
    write_table(&out.join("residual.csv"), hash, &RESIDUAL_COLUMNS, &residual_rows)?;
    record.csv.extend(["observables.csv".into(), "residual.csv".into()]);
    record.t_start = coarse_traj.times.first().copied();
    record.t_end = coarse_traj.times.last().copied();
    record.checks.push(Check::at_most("normalized integrated residual", a, ENERGY_TOLERANCE));
    record.checks.push(Check::at_least("residual shrink under dt/2", a / b, ENERGY_SHRINK));
    Ok(record)
}

fn equivalence(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let hash = cfg.hash();
    let mut record = RunRecord::new(ExperimentKind::Equivalence, hash);
    let degree = cfg.n_max.min(12);
    let results = sweep(&(0..cfg.fields).collect::<Vec<_>>(), |&i| -> Result<Vec<Vec<Cell>>, RunError> {
        let u = random_smooth(degree, degree, 1.0, 1.0, derive_seed(cfg.seed, &[0xe9, i as u64]));
        let bx = BoxSpec::for_degree(degree);
        let mut rows = Vec::new();
        let mut svals = cfg.s.clone();
        if !svals.contains(&1.0) {
            svals.push(1.0);
        }
        for s in svals {
            let r = classical_norms(&u, s, bx)?;
            let identity = if s == 1.0 {
                Some((r.harmonic.powi(2) - r.fourier.powi(2) - r.pure_moment.powi(2)).abs() / r.harmonic.powi(2))
            } else {
                None
            };
            rows.push(vec![
                Cell::Int(i as i64),
                s.into(),
                r.harmonic.into(),
                r.fourier.into(),
                r.moment.into(),
                r.ratio_low.into(),
                r.ratio_high.into(),
                identity.into(),
            ]);
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for (i, r) in results {
        match r {
            Ok(mut rs) => rows.append(&mut rs),
            Err(e) => record.failures.push(format!("field {i}: {e}")),
        }
    }
    let col = |j: usize| -> f64 {
        rows.iter()
            .filter_map(|r| match &r[j] {
                Cell::Num(Some(x)) => Some(*x),
                _ => None,
            })
            .fold(0.0, f64::max)
    };
    let (low, high, ident) = (col(5), col(6), col(7));
    write_table(
        &out.join("equivalence.csv"),
        hash,
        &["field", "s", "harmonic", "fourier", "moment", "ratio_low", "ratio_high", "identity_error"],
        &rows,
    )?;
    record.csv.push("equivalence.csv".into());
    record.checks.push(Check::at_most("largest harmonic/classical ratio", low, CONSTANT_BOUND));
    record.checks.push(Check::at_most("largest classical/harmonic ratio", high, CONSTANT_BOUND));
    record
        .checks
        .push(Check::at_most("(Av,v) identity relative error", ident, IDENTITY_TOLERANCE));
    if !record.failures.is_empty() {
        record.checks.push(Check::at_most("failed fields", record.failures.len() as f64, 0.0));
    }
    Ok(record)
}

fn xsb(cfg: &RunConfig, out: &Path) -> Result<RunRecord, RunError> {
    let hash = cfg.hash();
    let mut record = RunRecord::new(ExperimentKind::Xsb, hash);
    let u0 = cfg.initial_data().build(cfg.n_max, cfg.amplitude)?;
    let mut evo = cfg.evolution();
    evo.keep_snapshots = true;
    let traj = evolve(&u0, &evo)?;
    let value = xsb_discrete(&traj, cfg.xsb_s, cfg.xsb_b)?;
    write_table(
        &out.join("xsb.csv"),
        hash,
        &["s", "b", "value", "T", "stamps"],
        &[vec![
            cfg.xsb_s.into(),
            cfg.xsb_b.into(),
            value.into(),
            cfg.t_final.into(),
            Cell::Int(traj.len() as i64),
        ]],
    )?;
    record.csv.push("xsb.csv".into());
    record.t_start = traj.times.first().copied();
    record.t_end = traj.times.last().copied();
    record.summary.insert("xsb".into(), value);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert!((log_slope(&x, &y) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn real_fields_are_real() {
        let f = random_real_field(4, 9);
        assert!(f.iter().all(|(_, _, c)| c.im == 0.0));
        assert!(f.norm_sq() > 0.0);
    }
}
