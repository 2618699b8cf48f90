//! Time-frequency decomposition of quartic integrals along the linear flow.
//!
//! For `u(t) = Σ_n e^{it(2n+2)} U_n` the density `Σ_c |∂_c u|²` splits as
//! `Σ_d e^{2itd} A_d` with `A_d = Σ_c Σ_{n−n'=d} ∂_c U_n · conj(∂_c U_{n'})`,
//! so `∫ A(t) B(t) dx = Σ_s g_s e^{2its}` with `g_s = Σ_{d+e=s} ∫ A_d B_e`.
//! The spatial integrals are exact on a scale-2 tensor grid.

use ndarray::Array2;
use num_complex::Complex64;

use super::marginal::effective_degree;
use crate::hermite::ladder::d_dx;
use crate::hermite::{gauss_hermite_rule, hermite_functions, Axis, SpectralField, WeightScale};
use crate::spectral::project_pi_n;
use crate::Result;

/// Frequency components `A_d` on a fixed grid, indexed by `d + offset`.
pub(crate) struct PairDensity {
    offset: usize,
    parts: Vec<Array2<Complex64>>,
}

/// Spatial operator applied to each degree slice before squaring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Component {
    Identity,
    D(Axis),
}

impl Component {
    fn apply(&self, f: &SpectralField) -> SpectralField {
        match self {
            Component::Identity => f.clone(),
            Component::D(axis) => d_dx(f, *axis),
        }
    }
}

/// Lowest and highest degree carrying a nonzero coefficient.
pub(crate) fn degree_range(u: &SpectralField) -> Option<(usize, usize)> {
    let zero = Complex64::new(0.0, 0.0);
    let lo = u.iter().filter(|&(_, _, c)| c != zero).map(|(a, b, _)| a + b).min()?;
    Some((lo, effective_degree(u)))
}

/// Shared scale-2 tensor grid.
pub(crate) struct GramGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GramGrid {
    pub(crate) fn new(q: usize) -> Result<GramGrid> {
        let rule = gauss_hermite_rule(q.max(1), WeightScale::Two)?;
        Ok(GramGrid {
            nodes: rule.nodes().to_vec(),
            weights: rule.weights().to_vec(),
        })
    }

    fn q(&self) -> usize {
        self.nodes.len()
    }

    fn synthesize(&self, psi: &[Vec<f64>], f: &SpectralField) -> Array2<Complex64> {
        let q = self.q();
        let mut s = Array2::<Complex64>::zeros((q, q));
        for (k1, k2, c) in f.iter() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..q {
                let a = c * psi[j][k1];
                for l in 0..q {
                    s[(j, l)] += a * psi[l][k2];
                }
            }
        }
        s
    }

    /// `A_d` for the components `op(Π_n u)`, one per entry of `ops`.
    pub(crate) fn density(&self, u: &SpectralField, ops: &[Component]) -> PairDensity {
        let q = self.q();
        let Some((lo, hi)) = degree_range(u) else {
            return PairDensity {
                offset: 0,
                parts: vec![Array2::zeros((q, q))],
            };
        };
        let width = hi - lo + 1;
        let psi: Vec<Vec<f64>> = self.nodes.iter().map(|&x| hermite_functions(x, hi + 2)).collect();
        let mut parts = vec![Array2::<Complex64>::zeros((q, q)); 2 * width - 1];
        for op in ops {
            let slices: Vec<Array2<Complex64>> = (lo..=hi)
                .map(|n| self.synthesize(&psi, &op.apply(&project_pi_n(u, n))))
                .collect();
            for (i, a) in slices.iter().enumerate() {
                for (k, b) in slices.iter().enumerate() {
                    let target = &mut parts[i + width - 1 - k];
                    ndarray::Zip::from(target).and(a).and(b).for_each(|t, &x, &y| *t += x * y.conj());
                }
            }
        }
        PairDensity {
            offset: width - 1,
            parts,
        }
    }

    /// `g_s` for `∫ A(t) B(t)`, indexed by `s + offset` with the returned offset.
    pub(crate) fn coefficients(&self, a: &PairDensity, b: &PairDensity) -> (usize, Vec<Complex64>) {
        let q = self.q();
        let mut out = vec![Complex64::new(0.0, 0.0); a.parts.len() + b.parts.len() - 1];
        for (i, ad) in a.parts.iter().enumerate() {
            for (k, be) in b.parts.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..q {
                    let mut row = Complex64::new(0.0, 0.0);
                    for l in 0..q {
                        row += self.weights[l] * ad[(j, l)] * be[(j, l)];
                    }
                    acc += self.weights[j] * row;
                }
                out[i + k] += acc;
            }
        }
        (a.offset + b.offset, out)
    }
}

/// `f(t) = Re Σ_s g_s e^{2its}`.
pub(crate) fn eval_series(offset: usize, g: &[Complex64], t: f64) -> f64 {
    g.iter()
        .enumerate()
        .map(|(i, c)| {
            let s = i as f64 - offset as f64;
            (c * Complex64::from_polar(1.0, 2.0 * s * t)).re
        })
        .sum()
}

/// Composite Simpson on `[0, T]` with step at most `h_max`.
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, t_final: f64, h_max: f64) -> f64 {
    if t_final <= 0.0 {
        return 0.0;
    }
    let mut m = (t_final / h_max).ceil().max(2.0) as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let h = t_final / m as f64;
    let mut acc = f(0.0) + f(t_final);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let got = simpson(|t| t * t * t - t, 2.0, 0.7);
        assert!((got - (4.0 - 2.0)).abs() < 1e-13);
    }

    #[test]
    fn ground_state_quartic() {
        let g = SpectralField::ground_state(0);
        let grid = GramGrid::new(3).unwrap();
        let a = grid.density(&g, &[Component::Identity]);
        let (off, c) = grid.coefficients(&a, &a);
        assert_eq!(off, 0);
        assert!((c[0].re - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-14);
    }
}
