use std::sync::Arc;

use ndarray::Array2;

use super::quadrature::{hermite_functions_at, QuadratureRule};
use crate::error::{Error, Result};

/// ψ_k(x_j) for k < K on the nodes of a rule, plus the same table premultiplied
/// by the modified weights (the analysis operator).
#[derive(Debug, Clone)]
pub struct BasisTable {
    rule: Arc<QuadratureRule>,
    values: Array2<f64>,
    weighted: Array2<f64>,
}

impl BasisTable {
    /// Number of basis functions K.
    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    /// K × Q matrix of ψ_k(x_j).
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// K × Q matrix of w̃_j ψ_k(x_j).
    pub fn weighted(&self) -> &Array2<f64> {
        &self.weighted
    }
}

/// Evaluates ψ_0 … ψ_{K-1} on the nodes of `rule`.
pub fn eval_basis(k: usize, rule: Arc<QuadratureRule>) -> Result<BasisTable> {
    if k == 0 {
        return Err(Error::Dimension("basis size K must be at least 1".into()));
    }
    let q = rule.len();
    let mut values = Array2::<f64>::zeros((k, q));
    for (j, &x) in rule.nodes().iter().enumerate() {
        let mut bad = None;
        hermite_functions_at(x, k, |kk, psi| {
            if bad.is_none() && (!psi.is_finite() || (kk == 0 && psi < f64::MIN_POSITIVE)) {
                bad = Some(kk);
            }
            values[(kk, j)] = psi;
        });
        if let Some(kk) = bad {
            return Err(Error::BasisRange { k: kk, j, x });
        }
    }
    let mut weighted = values.clone();
    for (j, &w) in rule.weights().iter().enumerate() {
        weighted.column_mut(j).mapv_inplace(|v| v * w);
    }
    Ok(BasisTable {
        rule,
        values,
        weighted,
    })
}

/// ψ_0(x) … ψ_{count-1}(x) at an arbitrary point.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    hermite_functions_at(x, count, |k, v| out[k] = v);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::quadrature::{gauss_hermite_rule, WeightScale};
    use std::f64::consts::PI;

    fn table(k: usize, q: usize) -> BasisTable {
        eval_basis(k, Arc::new(gauss_hermite_rule(q, WeightScale::One).unwrap())).unwrap()
    }

    #[test]
    fn seed_values() {
        let p = hermite_functions(0.0, 4);
        assert!((p[0] - PI.powf(-0.25)).abs() < 1e-16);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn psi3_psi5_orthogonal_q16() {
        let t = table(8, 16);
        let s: f64 = (0..16)
            .map(|j| t.weighted()[(3, j)] * t.values()[(5, j)])
            .sum();
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn discrete_orthonormality_k128() {
        let t = table(128, 128);
        let gram = t.weighted().dot(&t.values().t());
        for a in 0..128 {
            for b in 0..128 {
                let target = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (gram[(a, b)] - target).abs() <= 1e-10,
                    "({a},{b}) = {}",
                    gram[(a, b)]
                );
            }
        }
    }

    #[test]
    fn recurrence_consistency_at_nodes() {
        let t = table(40, 48);
        let rule = t.rule().clone();
        for (j, &x) in rule.nodes().iter().enumerate() {
            for k in 2..40 {
                let kf = k as f64;
                let rhs = x * (2.0 / kf).sqrt() * t.values()[(k - 1, j)]
                    - ((kf - 1.0) / kf).sqrt() * t.values()[(k - 2, j)];
                let lhs = t.values()[(k, j)];
                assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300) + 1e-300);
            }
        }
    }

    #[test]
    fn eigenfunction_equation_by_finite_differences() {
        // (−d²/dx² + x²) ψ_k = (2k+1) ψ_k at a few interior points
        let h = 1e-3;
        for &x in &[-1.3, 0.2, 0.9] {
            let m = hermite_functions(x - h, 7);
            let c = hermite_functions(x, 7);
            let p = hermite_functions(x + h, 7);
            for k in 0..7 {
                let d2 = (p[k] - 2.0 * c[k] + m[k]) / (h * h);
                let lhs = -d2 + x * x * c[k];
                assert!((lhs - (2.0 * k as f64 + 1.0) * c[k]).abs() < 1e-5);
            }
        }
    }
}
