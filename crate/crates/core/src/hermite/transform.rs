use std::sync::Arc;

use ndarray::{s, Array2, Zip};
use num_complex::Complex64;

use super::basis::{eval_basis, BasisTable};
use super::field::{PhysicalField, SpectralField};
use super::quadrature::{gauss_hermite_rule, WeightScale};
use crate::error::{Error, Result};

/// Synthesis: `values(x_j, x_l) = Σ c[k1,k2] ψ_{k1}(x_j) ψ_{k2}(x_l)`.
///
/// Two tensorized passes, `C·Ψ` then `Ψᵀ·(CΨ)`, for real and imaginary parts.
pub fn to_physical(u: &SpectralField, basis: &BasisTable) -> Result<PhysicalField> {
    let k = u.n_max() + 1;
    if basis.size() < k {
        return Err(Error::Dimension(format!(
            "basis of size {} cannot synthesize a field of degree {}",
            basis.size(),
            u.n_max()
        )));
    }
    let psi = basis.values().slice(s![..k, ..]);
    let (cr, ci) = dense_parts(u);
    let tr = cr.dot(&psi);
    let ti = ci.dot(&psi);
    let vr = psi.t().dot(&tr);
    let vi = psi.t().dot(&ti);
    let mut values = Array2::<Complex64>::zeros(vr.dim());
    Zip::from(&mut values)
        .and(&vr)
        .and(&vi)
        .for_each(|v, &re, &im| *v = Complex64::new(re, im));
    Ok(PhysicalField::new_unchecked(values, basis.rule().clone()))
}

/// Analysis onto the triangle of degree `n_max`:
/// `c[k1,k2] = Σ_{j,l} w̃_j w̃_l f(x_j,x_l) ψ_{k1}(x_j) ψ_{k2}(x_l)`.
pub fn to_spectral(f: &PhysicalField, basis: &BasisTable, n_max: usize) -> Result<SpectralField> {
    let k = n_max + 1;
    if basis.size() < k {
        return Err(Error::Dimension(format!(
            "basis of size {} cannot resolve degree {n_max}",
            basis.size()
        )));
    }
    if !Arc::ptr_eq(f.rule(), basis.rule()) && **f.rule() != **basis.rule() {
        return Err(Error::Dimension(
            "physical field was sampled on a different rule than the basis".into(),
        ));
    }
    let phi = basis.weighted().slice(s![..k, ..]);
    let fr = f.values().mapv(|c| c.re);
    let fi = f.values().mapv(|c| c.im);
    let gr = phi.dot(&fr).dot(&phi.t());
    let gi = phi.dot(&fi).dot(&phi.t());
    Ok(SpectralField::from_fn(n_max, |k1, k2| {
        Complex64::new(gr[(k1, k2)], gi[(k1, k2)])
    }))
}

/// Synthesis at arbitrary 1D nodes (tensor grid `nodes × nodes`), without
/// a quadrature rule attached.
pub fn synthesize_on_nodes(u: &SpectralField, nodes: &[f64]) -> Array2<Complex64> {
    let k = u.n_max() + 1;
    let mut psi = Array2::<f64>::zeros((k, nodes.len()));
    for (j, &x) in nodes.iter().enumerate() {
        for (kk, v) in super::basis::hermite_functions(x, k).into_iter().enumerate() {
            psi[(kk, j)] = v;
        }
    }
    let (cr, ci) = dense_parts(u);
    let vr = psi.t().dot(&cr.dot(&psi));
    let vi = psi.t().dot(&ci.dot(&psi));
    let mut values = Array2::<Complex64>::zeros(vr.dim());
    Zip::from(&mut values)
        .and(&vr)
        .and(&vi)
        .for_each(|v, &re, &im| *v = Complex64::new(re, im));
    values
}

fn dense_parts(u: &SpectralField) -> (Array2<f64>, Array2<f64>) {
    let k = u.n_max() + 1;
    let mut cr = Array2::<f64>::zeros((k, k));
    let mut ci = Array2::<f64>::zeros((k, k));
    for (k1, k2, c) in u.iter() {
        cr[(k1, k2)] = c.re;
        ci[(k1, k2)] = c.im;
    }
    (cr, ci)
}

/// A quadrature rule together with the basis evaluated on it.
#[derive(Debug, Clone)]
pub struct Grid {
    basis: BasisTable,
}

impl Grid {
    /// `q` nodes per axis, basis of size `k`.
    pub fn new(q: usize, scale: WeightScale, k: usize) -> Result<Self> {
        let rule = Arc::new(gauss_hermite_rule(q, scale)?);
        Ok(Grid {
            basis: eval_basis(k, rule)?,
        })
    }

    pub fn q(&self) -> usize {
        self.basis.rule().len()
    }

    pub fn basis(&self) -> &BasisTable {
        &self.basis
    }

    pub fn nodes(&self) -> &[f64] {
        self.basis.rule().nodes()
    }

    pub fn weights(&self) -> &[f64] {
        self.basis.rule().weights()
    }

    pub fn to_physical(&self, u: &SpectralField) -> Result<PhysicalField> {
        to_physical(u, &self.basis)
    }

    pub fn to_spectral(&self, f: &PhysicalField, n_max: usize) -> Result<SpectralField> {
        to_spectral(f, &self.basis, n_max)
    }

    /// `∫∫ g` for raw samples laid out like a [`PhysicalField`].
    pub fn integrate_values<G: Fn(usize, usize) -> f64>(&self, g: G) -> f64 {
        let w = self.weights();
        let q = w.len();
        let mut acc = 0.0;
        for j in 0..q {
            let mut row = 0.0;
            for l in 0..q {
                row += w[l] * g(j, l);
            }
            acc += w[j] * row;
        }
        acc
    }
}
