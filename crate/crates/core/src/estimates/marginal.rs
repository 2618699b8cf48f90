//! One-dimensional marginals `x₁ ↦ ∫ f ḡ dx₂` of products of Hermite
//! expansions, and the correlation integrals `∫∫ a(x) κ(x−y) b(y) dx dy`
//! built from them.

use ndarray::Array2;
use num_complex::Complex64;

use super::legendre::composite;
use crate::hermite::{gauss_hermite_rule, hermite_functions, Axis, SpectralField, WeightScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Part {
    Re,
    Im,
}

/// `Σ_{a,b} R_ab ψ_a(x) ψ_b(x)` with R real symmetric.
#[derive(Debug, Clone)]
pub(crate) struct Marginal {
    mat: Array2<f64>,
}

/// Highest total degree carrying a nonzero coefficient.
pub(crate) fn effective_degree(u: &SpectralField) -> usize {
    u.iter()
        .filter(|&(_, _, c)| c != Complex64::new(0.0, 0.0))
        .map(|(k1, k2, _)| k1 + k2)
        .max()
        .unwrap_or(0)
}

pub(crate) fn oriented(u: &SpectralField, axis: Axis) -> SpectralField {
    let trimmed = u.resized(effective_degree(u));
    match axis {
        Axis::X1 => trimmed,
        Axis::X2 => trimmed.transposed(),
    }
}

impl Marginal {
    /// `Part(∫ f ḡ dx₂)` as a function of x₁.
    pub(crate) fn of(f: &SpectralField, g: &SpectralField, part: Part) -> Marginal {
        let k = f.n_max().max(g.n_max()) + 1;
        let mut mat = Array2::<f64>::zeros((k, k));
        for a in 0..k {
            for b in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..k {
                    acc += f.get(a, c) * g.get(b, c).conj();
                }
                mat[(a, b)] = match part {
                    Part::Re => acc.re,
                    Part::Im => acc.im,
                };
            }
        }
        let sym = (&mat + &mat.t()) * 0.5;
        Marginal { mat: sym }
    }

    pub(crate) fn scaled_add(&self, a: f64, other: &Marginal, b: f64) -> Marginal {
        let k = self.size().max(other.size());
        let mut mat = Array2::<f64>::zeros((k, k));
        for ((i, j), v) in mat.indexed_iter_mut() {
            *v = a * self.mat.get((i, j)).copied().unwrap_or(0.0)
                + b * other.mat.get((i, j)).copied().unwrap_or(0.0);
        }
        Marginal { mat }
    }

    pub(crate) fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.mat.iter().all(|&v| v == 0.0)
    }

    #[cfg(test)]
    fn eval(&self, x: f64) -> f64 {
        let k = self.size();
        let psi = hermite_functions(x, k);
        let mut acc = 0.0;
        for a in 0..k {
            let mut row = 0.0;
            for b in 0..k {
                row += self.mat[(a, b)] * psi[b];
            }
            acc += psi[a] * row;
        }
        acc
    }
}

/// Shared evaluation points for correlation integrals
/// `∫∫ a(x) κ(x−y) b(y) dx dy = ∫ κ(z) C(z) dz`, with
/// `C(z) = ∫ a(s + z/2) b(s − z/2) ds`. The s-integral is exact on a scale-2
/// Gauss–Hermite rule (the integrand is a polynomial times `e^{−2s²−z²/2}`);
/// the z-integral uses composite Gauss–Legendre panels split at the kernel
/// breakpoints.
#[derive(Debug, Clone)]
pub(crate) struct Correlator {
    z: Vec<(f64, f64)>,
    s_weights: Vec<f64>,
    k_max: usize,
    psi_plus: Array2<f64>,
    psi_minus: Array2<f64>,
}

/// A marginal evaluated at `s_j ± z/2` for every (z, j).
#[derive(Debug, Clone)]
pub(crate) struct Sampled {
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl Correlator {
    pub(crate) fn new(k_max: usize, breaks: &[f64]) -> Correlator {
        let q = 2 * k_max + 2;
        let rule = gauss_hermite_rule(q, WeightScale::Two).expect("small Gauss–Hermite rule");
        let reach = (2.0 * k_max as f64 + 1.0).sqrt() + 7.0;
        let mut cuts = breaks.to_vec();
        cuts.push(0.0);
        let z = composite(-2.0 * reach, 2.0 * reach, &cuts, 1.0, 16);
        let p = z.len() * q;
        let mut psi_plus = Array2::<f64>::zeros((p, k_max));
        let mut psi_minus = Array2::<f64>::zeros((p, k_max));
        for (iz, &(zz, _)) in z.iter().enumerate() {
            for (j, &s) in rule.nodes().iter().enumerate() {
                let row = iz * q + j;
                for (k, v) in hermite_functions(s + 0.5 * zz, k_max).into_iter().enumerate() {
                    psi_plus[(row, k)] = v;
                }
                for (k, v) in hermite_functions(s - 0.5 * zz, k_max).into_iter().enumerate() {
                    psi_minus[(row, k)] = v;
                }
            }
        }
        Correlator {
            z,
            s_weights: rule.weights().to_vec(),
            k_max,
            psi_plus,
            psi_minus,
        }
    }

    pub(crate) fn sample(&self, m: &Marginal) -> Sampled {
        let k = m.size();
        assert!(k <= self.k_max, "marginal larger than correlator basis");
        let eval = |psi: &Array2<f64>| -> Vec<f64> {
            let ps = psi.slice(ndarray::s![.., ..k]);
            let t = ps.dot(&m.mat);
            (&t * &ps).sum_axis(ndarray::Axis(1)).to_vec()
        };
        Sampled {
            plus: eval(&self.psi_plus),
            minus: eval(&self.psi_minus),
        }
    }

    pub(crate) fn integrate<K: Fn(f64) -> f64>(&self, a: &Sampled, b: &Sampled, kernel: K) -> f64 {
        let q = self.s_weights.len();
        let mut total = 0.0;
        for (iz, &(z, wz)) in self.z.iter().enumerate() {
            let k = kernel(z);
            if k == 0.0 {
                continue;
            }
            let base = iz * q;
            let mut c = 0.0;
            for j in 0..q {
                c += self.s_weights[j] * a.plus[base + j] * b.minus[base + j];
            }
            total += wz * k * c;
        }
        total
    }
}

/// One-off `∫∫ a(x) κ(x−y) b(y) dx dy`.
#[cfg(test)]
fn correlate<K: Fn(f64) -> f64>(a: &Marginal, b: &Marginal, kernel: K, breaks: &[f64]) -> f64 {
    if a.is_zero() || b.is_zero() {
        return 0.0;
    }
    let c = Correlator::new(a.size().max(b.size()), breaks);
    c.integrate(&c.sample(a), &c.sample(b), kernel)
}
