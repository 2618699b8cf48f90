//! Exact sparse actions of `x_i` and `∂_{x_i}` on Hermite coefficients:
//!
//! `x ψ_k = √((k+1)/2) ψ_{k+1} + √(k/2) ψ_{k−1}`,
//! `∂ψ_k = −√((k+1)/2) ψ_{k+1} + √(k/2) ψ_{k−1}`.
//!
//! Each raises the degree of the triangle by one.

use num_complex::Complex64;

use super::field::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X1, Axis::X2];
}

fn ladder(u: &SpectralField, axis: Axis, up_sign: f64) -> SpectralField {
    let mut out = SpectralField::zeros(u.n_max() + 1);
    for (k1, k2, c) in u.iter() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k = match axis {
            Axis::X1 => k1,
            Axis::X2 => k2,
        };
        let up = c * (up_sign * ((k as f64 + 1.0) / 2.0).sqrt());
        match axis {
            Axis::X1 => out.add_at(k1 + 1, k2, up),
            Axis::X2 => out.add_at(k1, k2 + 1, up),
        }
        if k > 0 {
            let down = c * (k as f64 / 2.0).sqrt();
            match axis {
                Axis::X1 => out.add_at(k1 - 1, k2, down),
                Axis::X2 => out.add_at(k1, k2 - 1, down),
            }
        }
    }
    out
}

/// `x_i · u`.
pub fn mul_x(u: &SpectralField, axis: Axis) -> SpectralField {
    ladder(u, axis, 1.0)
}

/// `∂_{x_i} u`.
pub fn d_dx(u: &SpectralField, axis: Axis) -> SpectralField {
    ladder(u, axis, -1.0)
}

/// `Δu`, degree n_max + 2.
pub fn laplacian(u: &SpectralField) -> SpectralField {
    let a = d_dx(&d_dx(u, Axis::X1), Axis::X1);
    let b = d_dx(&d_dx(u, Axis::X2), Axis::X2);
    &a + &b
}

/// `|x|² u`, degree n_max + 2.
pub fn mul_r2(u: &SpectralField) -> SpectralField {
    let a = mul_x(&mul_x(u, Axis::X1), Axis::X1);
    let b = mul_x(&mul_x(u, Axis::X2), Axis::X2);
    &a + &b
}

/// `⟨x⟩² u = (1 + |x|²) u`, degree n_max + 2.
pub fn mul_bracket_sq(u: &SpectralField) -> SpectralField {
    &mul_r2(u) + u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::apply_a;

    fn sample(n: usize) -> SpectralField {
        SpectralField::from_fn(n, |k1, k2| {
            Complex64::new((k1 as f64 * 0.7 - k2 as f64).sin(), (k1 + 2 * k2) as f64 * 0.1)
        })
    }

    #[test]
    fn harmonic_operator_from_ladders_is_diagonal() {
        let u = sample(6);
        let via_ladders = &mul_r2(&u) - &laplacian(&u);
        let diff = via_ladders.max_abs_diff(&apply_a(&u));
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn ground_state_gradient() {
        // ∂_1 φ0 = −x1 φ0 = −(1/√2) ψ1⊗ψ0
        let g = d_dx(&SpectralField::ground_state(0), Axis::X1);
        assert!((g.get(1, 0).re + 0.5f64.sqrt()).abs() < 1e-15);
        assert!((g.norm_sq() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn canonical_commutator() {
        // [∂, x] = 1
        let u = sample(5);
        let a = d_dx(&mul_x(&u, Axis::X2), Axis::X2);
        let b = mul_x(&d_dx(&u, Axis::X2), Axis::X2);
        assert!((&a - &b).max_abs_diff(&u) < 1e-12);
    }
}
