//! `L⁴_t L⁴_x` norms of linear solutions and of their gradients.

use super::bilinear::time_step_bound;
use super::gram::{degree_range, eval_series, simpson, Component, GramGrid};
use crate::hermite::{Axis, SpectralField};
use crate::spectral::DyadicBlock;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzReport {
    /// `‖u‖_{L⁴((0,T);L⁴)}` or `‖∇u‖_{L⁴((0,T);L⁴)}`.
    pub norm: f64,
    /// `norm / ‖u₀‖`, or `norm / (M ‖u₀‖)` for the gradient.
    pub ratio: f64,
}

/// The gradient variant needs the block label `M` of the data for its ratio.
pub fn strichartz_l4(u0: &SpectralField, t_final: f64, gradient: bool, label: Option<u64>) -> Result<StrichartzReport> {
    if !(t_final >= 0.0) {
        return Err(Error::Parameter(format!("horizon must be nonnegative, got {t_final}")));
    }
    let scale = if gradient {
        let m = label.ok_or_else(|| Error::Parameter("gradient ratio needs the block label of the data".into()))?;
        DyadicBlock::new(m)?;
        m as f64
    } else {
        1.0
    };
    let mass = u0.norm_sq().sqrt();
    let Some((_, n)) = degree_range(u0) else {
        return Ok(StrichartzReport { norm: 0.0, ratio: 0.0 });
    };
    let (q, ops): (usize, &[Component]) = if gradient {
        (2 * (n + 1) + 1, &[Component::D(Axis::X1), Component::D(Axis::X2)])
    } else {
        (2 * n + 1, &[Component::Identity])
    };
    let grid = GramGrid::new(q)?;
    let a = grid.density(u0, ops);
    let (offset, g) = grid.coefficients(&a, &a);
    let h = time_step_bound(DyadicBlock::containing(n).label());
    let fourth = simpson(|t| eval_series(offset, &g, t), t_final, h).max(0.0);
    let norm = fourth.powf(0.25);
    Ok(StrichartzReport {
        norm,
        ratio: norm / (scale * mass),
    })
}
