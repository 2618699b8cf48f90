//! Space-time `L²` norm of products of linear solutions localized to
//! dyadic blocks, against the `M/N` scaling.

use super::gram::{degree_range, eval_series, simpson, Component, GramGrid};
use crate::data::{derive_seed, random_block};
use crate::hermite::SpectralField;
use crate::spectral::DyadicBlock;
use crate::{Error, Result};

/// Largest Simpson step allowed for data reaching the block of label `n`.
pub fn time_step_bound(label: u64) -> f64 {
    std::f64::consts::PI / (64.0 * (label * label) as f64)
}

/// `∫₀ᵀ ‖u(t) v(t)‖²_{L²} dt` along the exact linear flow.
///
/// The spatial integral of every time-frequency component is exact; the
/// time integral is composite Simpson with step at most
/// `π/(64 N²)`, `N` the label of the highest block either field reaches.
pub fn bilinear_integral(u0: &SpectralField, v0: &SpectralField, t_final: f64) -> Result<f64> {
    if !(t_final >= 0.0) {
        return Err(Error::Parameter(format!("horizon must be nonnegative, got {t_final}")));
    }
    let (Some((_, nu)), Some((_, nv))) = (degree_range(u0), degree_range(v0)) else {
        return Ok(0.0);
    };
    let grid = GramGrid::new(nu + nv + 1)?;
    let a = grid.density(u0, &[Component::Identity]);
    let b = grid.density(v0, &[Component::Identity]);
    let (offset, g) = grid.coefficients(&a, &b);
    let label = DyadicBlock::containing(nu.max(nv)).label();
    Ok(simpson(|t| eval_series(offset, &g, t), t_final, time_step_bound(label)))
}

/// One (N, M) cell of the ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub n: u64,
    pub m: u64,
    pub trials: usize,
    pub max: f64,
    pub median: f64,
    /// Per-trial ratios, in trial order.
    pub ratios: Vec<f64>,
}

/// Cells plus the metadata that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub t_final: f64,
    pub seed: u64,
    pub n_max: usize,
    pub rows: Vec<RatioRow>,
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// The data of one trial: unit-mass Gaussian blocks `u_N`, `v_M`.
pub fn trial_data(n: u64, m: u64, n_max: usize, seed: u64, trial: usize) -> Result<(SpectralField, SpectralField)> {
    let ts = derive_seed(seed, &[n, m, trial as u64]);
    let u = random_block(n, n_max, derive_seed(ts, &[0]))?;
    let v = random_block(m, n_max, derive_seed(ts, &[1]))?;
    Ok((u, v))
}

/// `∫₀ᵀ ‖u_N v_M‖² dt / (M/N)` over `trials` random pairs.
pub fn bilinear_ratio(n: u64, m: u64, t_final: f64, trials: usize, seed: u64, n_max: usize) -> Result<RatioRow> {
    if trials == 0 {
        return Err(Error::Parameter("at least one trial is required".into()));
    }
    let scale = m as f64 / n as f64;
    let mut ratios = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (u, v) = trial_data(n, m, n_max, seed, trial)?;
        ratios.push(bilinear_integral(&u, &v, t_final)? / scale);
    }
    Ok(RatioRow {
        n,
        m,
        trials,
        max: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        median: median(&ratios),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ground_states_give_closed_form() {
        let g = SpectralField::ground_state(0);
        let v = bilinear_integral(&g, &g, 2.0).unwrap();
        assert!((v - 2.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn zero_horizon_gives_zero() {
        let g = SpectralField::ground_state(3);
        assert_eq!(bilinear_integral(&g, &g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn unresolvable_block_names_the_limit() {
        match bilinear_ratio(16, 1, 1.0, 1, 0, 32) {
            Err(Error::Unresolvable { max_resolvable, .. }) => assert_eq!(max_resolvable, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn median_of_even_count_averages() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
    }
}
