//! Gauss–Hermite rules with modified weights.
//!
//! Nodes come from the eigenvalues of the symmetric Jacobi matrix
//! (Golub–Welsch), are polished by Newton steps on the normalized Hermite
//! function ψ_Q, and the weights are taken from the Christoffel function
//! `1 / Σ_{k<Q} ψ_k(x_j)²`. That formula yields the *modified* weight
//! `w̃_j = w_j e^{x_j²}` directly and stays accurate to full relative precision
//! at the extreme nodes, where `w_j` itself underflows.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Gaussian weight `e^{-scale·x²}` a rule is exact against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScale {
    One,
    Two,
}

impl WeightScale {
    pub fn factor(self) -> f64 {
        match self {
            WeightScale::One => 1.0,
            WeightScale::Two => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scale: WeightScale,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Modified weights: `∫ f dx ≈ Σ_j w̃_j f(x_j)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scale(&self) -> WeightScale {
        self.scale
    }

    /// `∫ f(x) dx` for a function sampled at the nodes.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

const NEWTON_ITERS: usize = 8;

/// Builds the `q`-point Gauss–Hermite rule for weight `e^{-scale·x²}`.
pub fn gauss_hermite_rule(q: usize, scale: WeightScale) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(Error::Quadrature {
            q,
            reason: "rule needs at least one node".into(),
        });
    }
    let mut nodes = jacobi_eigenvalues(q)?;
    for x in nodes.iter_mut() {
        *x = polish_node(*x, q).ok_or_else(|| Error::Quadrature {
            q,
            reason: format!("Newton refinement diverged near x={x}"),
        })?;
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    symmetrize(&mut nodes);
    for w in nodes.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Quadrature {
                q,
                reason: "nodes failed to separate".into(),
            });
        }
    }

    let mut weights = Vec::with_capacity(q);
    for &x in &nodes {
        let mut sum = 0.0;
        hermite_functions_at(x, q, |_, psi| sum += psi * psi);
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::Quadrature {
                q,
                reason: format!("Christoffel sum underflowed at x={x}"),
            });
        }
        weights.push(1.0 / sum);
    }
    // mirror weights so the rule is exactly symmetric
    for j in 0..q / 2 {
        let avg = 0.5 * (weights[j] + weights[q - 1 - j]);
        weights[j] = avg;
        weights[q - 1 - j] = avg;
    }

    if scale == WeightScale::Two {
        let r = std::f64::consts::SQRT_2;
        nodes.iter_mut().for_each(|x| *x /= r);
        weights.iter_mut().for_each(|w| *w /= r);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        scale,
    })
}

fn jacobi_eigenvalues(q: usize) -> Result<Vec<f64>> {
    let mut jac = DMatrix::<f64>::zeros(q, q);
    for k in 1..q {
        let b = (k as f64 / 2.0).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = jac.symmetric_eigenvalues();
    let out: Vec<f64> = eig.iter().copied().collect();
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Quadrature {
            q,
            reason: "Jacobi eigenvalue iteration failed".into(),
        });
    }
    Ok(out)
}

/// Newton on ψ_q, using ψ_q' = √(2q) ψ_{q-1} − x ψ_q.
fn polish_node(mut x: f64, q: usize) -> Option<f64> {
    for _ in 0..NEWTON_ITERS {
        let (prev, last) = last_two(x, q)?;
        let deriv = (2.0 * q as f64).sqrt() * prev - x * last;
        if deriv == 0.0 {
            return None;
        }
        let step = last / deriv;
        x -= step;
        if !x.is_finite() {
            return None;
        }
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    Some(x)
}

/// (ψ_{q-1}(x), ψ_q(x)).
fn last_two(x: f64, q: usize) -> Option<(f64, f64)> {
    let mut prev = 0.0;
    let mut last = 0.0;
    hermite_functions_at(x, q + 1, |k, psi| {
        if k + 1 == q {
            prev = psi;
        } else if k == q {
            last = psi;
        }
    });
    if prev == 0.0 && last == 0.0 {
        // ψ_0 underflowed
        return None;
    }
    Some((prev, last))
}

fn symmetrize(nodes: &mut [f64]) {
    let q = nodes.len();
    for j in 0..q / 2 {
        let a = 0.5 * (nodes[q - 1 - j] - nodes[j]);
        nodes[j] = -a;
        nodes[q - 1 - j] = a;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
}

/// Streams ψ_0(x), …, ψ_{count-1}(x) through `sink` using the normalized
/// three-term recurrence.
pub(crate) fn hermite_functions_at<F: FnMut(usize, f64)>(x: f64, count: usize, mut sink: F) {
    if count == 0 {
        return;
    }
    let mut p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    sink(0, p0);
    if count == 1 {
        return;
    }
    let mut p1 = std::f64::consts::SQRT_2 * x * p0;
    sink(1, p1);
    for k in 2..count {
        let kf = k as f64;
        let p2 = (2.0 / kf).sqrt() * x * p1 - ((kf - 1.0) / kf).sqrt() * p0;
        sink(k, p2);
        p0 = p1;
        p1 = p2;
    }
}
