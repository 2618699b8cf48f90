use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use super::basis::hermite_functions;
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};

/// Complex Hermite coefficients `c[k1,k2]` on the triangle `k1 + k2 ≤ n_max`,
/// stored in lexicographic `(k1, k2)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n_max: usize,
    coeffs: Vec<Complex64>,
}

/// Number of coefficients in the triangle of degree `n_max`.
pub fn triangle_len(n_max: usize) -> usize {
    (n_max + 1) * (n_max + 2) / 2
}

impl SpectralField {
    pub fn zeros(n_max: usize) -> Self {
        SpectralField {
            n_max,
            coeffs: vec![Complex64::new(0.0, 0.0); triangle_len(n_max)],
        }
    }

    pub fn from_coeffs(n_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != triangle_len(n_max) {
            return Err(Error::Dimension(format!(
                "{} coefficients supplied for n_max={n_max} (expected {})",
                coeffs.len(),
                triangle_len(n_max)
            )));
        }
        Ok(SpectralField { n_max, coeffs })
    }

    /// Builds a field from a closure over `(k1, k2)`.
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n_max: usize, mut f: F) -> Self {
        let mut coeffs = Vec::with_capacity(triangle_len(n_max));
        for k1 in 0..=n_max {
            for k2 in 0..=n_max - k1 {
                coeffs.push(f(k1, k2));
            }
        }
        SpectralField { n_max, coeffs }
    }

    /// The normalized ground state ψ_0 ⊗ ψ_0.
    pub fn ground_state(n_max: usize) -> Self {
        Self::mode(0, 0, n_max)
    }

    /// A single normalized eigenmode ψ_{k1} ⊗ ψ_{k2}.
    pub fn mode(k1: usize, k2: usize, n_max: usize) -> Self {
        let mut u = Self::zeros(n_max.max(k1 + k2));
        u.set(k1, k2, Complex64::new(1.0, 0.0));
        u
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn index(&self, k1: usize, k2: usize) -> usize {
        debug_assert!(k1 + k2 <= self.n_max);
        k1 * (self.n_max + 1) - k1 * k1.saturating_sub(1) / 2 + k2
    }

    /// Coefficient at `(k1, k2)`; zero outside the triangle.
    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        if k1 + k2 > self.n_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[self.index(k1, k2)]
        }
    }

    pub fn set(&mut self, k1: usize, k2: usize, c: Complex64) {
        let i = self.index(k1, k2);
        self.coeffs[i] = c;
    }

    pub fn add_at(&mut self, k1: usize, k2: usize, c: Complex64) {
        let i = self.index(k1, k2);
        self.coeffs[i] += c;
    }

    /// Iterates `(k1, k2, c)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n = self.n_max;
        (0..=n)
            .flat_map(move |k1| (0..=n - k1).map(move |k2| (k1, k2)))
            .zip(self.coeffs.iter())
            .map(|((k1, k2), &c)| (k1, k2, c))
    }

    /// Multiplies every coefficient of total degree n by `f(n)`.
    pub fn map_degree<F: Fn(usize) -> Complex64>(&self, f: F) -> Self {
        let n = self.n_max;
        let factors: Vec<Complex64> = (0..=n).map(&f).collect();
        let mut out = self.clone();
        let mut i = 0;
        for k1 in 0..=n {
            for k2 in 0..=n - k1 {
                out.coeffs[i] *= factors[k1 + k2];
                i += 1;
            }
        }
        out
    }

    /// Same coefficients re-housed in a triangle of degree `n_max`
    /// (truncating or zero-padding).
    pub fn resized(&self, n_max: usize) -> Self {
        Self::from_fn(n_max, |k1, k2| self.get(k1, k2))
    }

    /// Swaps the roles of the two coordinates.
    pub fn transposed(&self) -> Self {
        Self::from_fn(self.n_max, |k1, k2| self.get(k2, k1))
    }

    pub fn conj(&self) -> Self {
        SpectralField {
            n_max: self.n_max,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        SpectralField {
            n_max: self.n_max,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `Σ |c|²`, the squared L² norm by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩ = ∫ self · conj(other)`.
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        let n = self.n_max.min(other.n_max);
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in 0..=n {
            for k2 in 0..=n - k1 {
                acc += self.get(k1, k2) * other.get(k1, k2).conj();
            }
        }
        acc
    }

    /// Max coefficient distance, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        let n = self.n_max.max(other.n_max);
        let mut m: f64 = 0.0;
        for k1 in 0..=n {
            for k2 in 0..=n - k1 {
                m = m.max((self.get(k1, k2) - other.get(k1, k2)).norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Squared norm carried by modes with total degree `> n_cut`.
    pub fn tail_norm_sq(&self, n_cut: usize) -> f64 {
        self.iter()
            .filter(|&(k1, k2, _)| k1 + k2 > n_cut)
            .map(|(_, _, c)| c.norm_sqr())
            .sum()
    }

    /// Point evaluation `Σ c ψ_{k1}(x) ψ_{k2}(y)`.
    pub fn eval_at(&self, x: f64, y: f64) -> Complex64 {
        let px = hermite_functions(x, self.n_max + 1);
        let py = hermite_functions(y, self.n_max + 1);
        self.iter()
            .map(|(k1, k2, c)| c * (px[k1] * py[k2]))
            .sum()
    }
}

fn combine(a: &SpectralField, b: &SpectralField, sign: f64) -> SpectralField {
    let n = a.n_max.max(b.n_max);
    SpectralField::from_fn(n, |k1, k2| a.get(k1, k2) + b.get(k1, k2) * sign)
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        combine(self, rhs, -1.0)
    }
}

impl Mul<Complex64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: Complex64) -> SpectralField {
        self.scale(rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Samples on the tensor grid `(x_j, x_l)` of a quadrature rule; row index j
/// runs over the first coordinate.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    values: Array2<Complex64>,
    rule: Arc<QuadratureRule>,
}

impl PhysicalField {
    pub fn new(values: Array2<Complex64>, rule: Arc<QuadratureRule>) -> Result<Self> {
        let q = rule.len();
        if values.dim() != (q, q) {
            return Err(Error::Dimension(format!(
                "values {:?} do not match a {q}×{q} grid",
                values.dim()
            )));
        }
        if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Parameter("physical field has non-finite entries".into()));
        }
        Ok(PhysicalField { values, rule })
    }

    pub(crate) fn new_unchecked(values: Array2<Complex64>, rule: Arc<QuadratureRule>) -> Self {
        PhysicalField { values, rule }
    }

    /// Samples a function of `(x1, x2)` on the grid.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(rule: Arc<QuadratureRule>, f: F) -> Self {
        let nodes = rule.nodes();
        let values = Array2::from_shape_fn((nodes.len(), nodes.len()), |(j, l)| f(nodes[j], nodes[l]));
        PhysicalField { values, rule }
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.values
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    /// `∫∫ g(values, x1, x2)` with the tensor rule.
    pub fn integrate<G: Fn(Complex64, f64, f64) -> f64>(&self, g: G) -> f64 {
        let nodes = self.rule.nodes();
        let w = self.rule.weights();
        let mut acc = 0.0;
        for ((j, l), &v) in self.values.indexed_iter() {
            acc += w[j] * w[l] * g(v, nodes[j], nodes[l]);
        }
        acc
    }

    pub fn linear_combination(&self, a: Complex64, other: &PhysicalField, b: Complex64) -> Result<PhysicalField> {
        if !Arc::ptr_eq(&self.rule, &other.rule) && *self.rule != *other.rule {
            return Err(Error::Dimension("fields live on different grids".into()));
        }
        let values = &self.values * a + &other.values * b;
        Ok(PhysicalField {
            values,
            rule: self.rule.clone(),
        })
    }
}
