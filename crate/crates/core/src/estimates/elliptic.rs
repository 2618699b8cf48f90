//! Local elliptic control of point values, and the `ℋ²` integration-by-parts
//! identity behind it.

use super::legendre::gauss_legendre;
use crate::hermite::ladder::{d_dx, laplacian};
use crate::hermite::{Axis, Grid, SpectralField, WeightScale};
use crate::spectral::{apply_a, eigenvalue};
use crate::{Error, Result};

const RADIAL_NODES: usize = 24;
const ANGULAR_NODES: usize = 64;

/// `∫_{|y−x|<r} (f(y), g(y))` for two point-evaluable integrands, by
/// Gauss–Legendre in the radius and the trapezoid rule in the angle.
fn ball_integrals<F: Fn(f64, f64) -> (f64, f64)>(center: (f64, f64), radius: f64, f: F) -> (f64, f64) {
    let (nodes, weights) = gauss_legendre(RADIAL_NODES);
    let dtheta = 2.0 * std::f64::consts::PI / ANGULAR_NODES as f64;
    let mut acc = (0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        let r = 0.5 * radius * (x + 1.0);
        let wr = 0.5 * radius * w * r * dtheta;
        for k in 0..ANGULAR_NODES {
            let th = k as f64 * dtheta;
            let (a, b) = f(center.0 + r * th.cos(), center.1 + r * th.sin());
            acc.0 += wr * a;
            acc.1 += wr * b;
        }
    }
    acc
}

/// `|φ(x)|² / (λ⁻² ∫_B |Aφ|² + λ² ∫_B |φ|²)` over the ball `B` of radius
/// `1/λ` about `x`: the constant the local elliptic bound needs at this point.
pub fn elliptic_constant(phi: &SpectralField, lambda: f64, x: (f64, f64)) -> Result<f64> {
    if !(lambda >= 1.0) {
        return Err(Error::Parameter(format!("scale λ must be at least 1, got {lambda}")));
    }
    let a_phi = apply_a(phi);
    let (ia, ip) = ball_integrals(x, 1.0 / lambda, |y1, y2| {
        (a_phi.eval_at(y1, y2).norm_sqr(), phi.eval_at(y1, y2).norm_sqr())
    });
    let den = ia / (lambda * lambda) + lambda * lambda * ip;
    if !(den >= 1e-300) {
        return Err(Error::Underflow(den));
    }
    Ok(phi.eval_at(x.0, x.1).norm_sqr() / den)
}

/// Both sides of `∫ |Δf|² + |y|⁴|f|² + 2|y|²|∇f|² = ‖Af‖² + 4‖f‖²`: the left
/// by quadrature on physical samples, the right from the spectrum.
pub fn h2_identity(f: &SpectralField) -> Result<(f64, f64)> {
    let n = f.n_max();
    let grid = Grid::new(n + 8, WeightScale::One, n + 3)?;
    let lap = grid.to_physical(&laplacian(f))?;
    let val = grid.to_physical(f)?;
    let d1 = grid.to_physical(&d_dx(f, Axis::X1))?;
    let d2 = grid.to_physical(&d_dx(f, Axis::X2))?;
    let r2 = |x1: f64, x2: f64| x1 * x1 + x2 * x2;
    let lhs = lap.integrate(|v, _, _| v.norm_sqr())
        + val.integrate(|v, x1, x2| r2(x1, x2).powi(2) * v.norm_sqr())
        + 2.0 * d1.integrate(|v, x1, x2| r2(x1, x2) * v.norm_sqr())
        + 2.0 * d2.integrate(|v, x1, x2| r2(x1, x2) * v.norm_sqr());
    let rhs = f
        .iter()
        .map(|(k1, k2, c)| {
            let l = eigenvalue(k1 + k2) as f64;
            (l * l + 4.0) * c.norm_sqr()
        })
        .sum();
    Ok((lhs, rhs))
}
