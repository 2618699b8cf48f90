//! Interaction functional `I(t) = ∫∫ |u(x)|² ρ(x₁−y₁) |v(y)|² dx dy` and its
//! first two time derivatives along the linear flow.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use super::marginal::{oriented, Correlator, Marginal, Part, Sampled};
use super::weight::WeightRhoM;
use crate::data::{complex_gaussian, derive_seed};
use crate::dynamics::propagate_linear;
use crate::hermite::ladder::d_dx;
use crate::hermite::{Axis, SpectralField};
use crate::spectral::norm_hs;
use crate::{Error, Result};

/// Weight ρ as a function of the coordinate difference along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Constant(f64),
    /// ρ(z) = z.
    Odd,
    Rho(WeightRhoM),
}

impl Kernel {
    pub fn value(&self, z: f64) -> f64 {
        match self {
            Kernel::Constant(c) => *c,
            Kernel::Odd => z,
            Kernel::Rho(w) => w.value(z),
        }
    }

    pub fn first(&self, z: f64) -> f64 {
        match self {
            Kernel::Constant(_) => 0.0,
            Kernel::Odd => 1.0,
            Kernel::Rho(w) => w.first(z),
        }
    }

    pub fn second(&self, z: f64) -> f64 {
        match self {
            Kernel::Rho(w) => w.second(z),
            _ => 0.0,
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            Kernel::Rho(w) => vec![-w.breakpoint(), w.breakpoint()],
            _ => Vec::new(),
        }
    }
}

/// `I` for the given pair. The weight depends on one coordinate only, so
/// the four-dimensional integral reduces to a pair of marginals.
pub fn interaction_i(u: &SpectralField, v: &SpectralField, kernel: &Kernel, axis: Axis) -> f64 {
    let u = oriented(u, axis);
    let v = oriented(v, axis);
    let mu = Marginal::of(&u, &u, Part::Re);
    let mv = Marginal::of(&v, &v, Part::Re);
    if mu.is_zero() || mv.is_zero() {
        return 0.0;
    }
    let c = Correlator::new(mu.size().max(mv.size()), &kernel.breaks());
    c.integrate(&c.sample(&mu), &c.sample(&mv), |z| kernel.value(z))
}

struct FieldMarginals {
    mass: Sampled,
    current: Sampled,
    kinetic: Sampled,
    curvature: Sampled,
    real_flux: Sampled,
}

impl FieldMarginals {
    fn new(c: &Correlator, u: &SpectralField) -> Self {
        let du = d_dx(u, Axis::X1);
        let d2u = d_dx(&du, Axis::X1);
        let kinetic = Marginal::of(&du, &du, Part::Re);
        // ∂₁²|u|² = 2 Re(∂₁²u ū) + 2|∂₁u|².
        let curvature = Marginal::of(&d2u, u, Part::Re).scaled_add(2.0, &kinetic, 2.0);
        FieldMarginals {
            mass: c.sample(&Marginal::of(u, u, Part::Re)),
            current: c.sample(&Marginal::of(u, &du, Part::Im)),
            kinetic: c.sample(&kinetic),
            curvature: c.sample(&curvature),
            real_flux: c.sample(&Marginal::of(&du, u, Part::Re)),
        }
    }
}

/// `I`, its time derivatives in momentum form, and the Hessian density
/// `∫∫ ρ''(x₁−y₁) |v̄(y)∂₁u(x) + u(x)∂₁v̄(y)|²` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionState {
    pub value: f64,
    pub first: f64,
    pub second: f64,
    pub hessian: f64,
}

fn state(c: &Correlator, u: &FieldMarginals, v: &FieldMarginals, kernel: &Kernel) -> InteractionState {
    let k0 = |z: f64| kernel.value(z);
    let k1 = |z: f64| kernel.first(z);
    let k2 = |z: f64| kernel.second(z);
    let kz = |z: f64| z * kernel.first(z);
    let b = |a: &Sampled, bb: &Sampled, k: &dyn Fn(f64) -> f64| c.integrate(a, bb, k);
    let value = b(&u.mass, &v.mass, &k0);
    let first = 2.0 * (b(&u.current, &v.mass, &k1) - b(&u.mass, &v.current, &k1));
    let second = 4.0 * b(&u.kinetic, &v.mass, &k2) + 4.0 * b(&u.mass, &v.kinetic, &k2)
        - b(&u.curvature, &v.mass, &k2)
        - b(&u.mass, &v.curvature, &k2)
        - 8.0 * b(&u.current, &v.current, &k2)
        - 4.0 * b(&u.mass, &v.mass, &kz);
    let hessian = b(&u.kinetic, &v.mass, &k2)
        + b(&u.mass, &v.kinetic, &k2)
        + 2.0 * b(&u.real_flux, &v.real_flux, &k2)
        - 2.0 * b(&u.current, &v.current, &k2);
    InteractionState {
        value,
        first,
        second,
        hessian,
    }
}

/// Residuals of the first and second virial identities along the exact
/// linear flow, on stamps `j·dt`.
#[derive(Debug, Clone)]
pub struct VirialResiduals {
    pub times: Vec<f64>,
    pub states: Vec<InteractionState>,
    /// Central difference of I minus the momentum form of I'. NaN at the ends.
    pub first: Vec<f64>,
    /// Central difference of the momentum form of I' minus the assembled I''.
    pub second: Vec<f64>,
    pub max_first: f64,
    pub max_second: f64,
    /// Same maxima with stencil width 2·dt.
    pub coarse_first: f64,
    pub coarse_second: f64,
    /// Both residuals shrink when the stencil is refined.
    pub refinement_ok: bool,
    /// `∫₀ᵀ Hessian dt / (‖v‖²‖u‖‖u‖_{ℋ¹} + ‖u‖²‖v‖‖v‖_{ℋ¹})`.
    pub hessian_constant: f64,
    /// `max_t |I'| / (2(‖v‖²‖u‖‖∂₁u‖ + ‖u‖²‖v‖‖∂₁v‖))`, at most 1 when |ρ'| ≤ 1.
    pub first_derivative_ratio: f64,
}

/// Below this both stencils are at round-off and refinement says nothing.
const RESIDUAL_FLOOR: f64 = 1e-12;

pub fn virial_residuals(
    u0: &SpectralField,
    v0: &SpectralField,
    kernel: &Kernel,
    t_final: f64,
    dt: f64,
    axis: Axis,
) -> Result<VirialResiduals> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::Parameter(format!("need dt > 0 and T ≥ 0, got dt={dt}, T={t_final}")));
    }
    let steps = (t_final / dt).round() as usize;
    if steps < 4 {
        return Err(Error::TooFewSamples { have: steps + 1, need: 5 });
    }
    let u0 = oriented(u0, axis);
    let v0 = oriented(v0, axis);
    let k_max = u0.n_max().max(v0.n_max()) + 3;
    let corr = Correlator::new(k_max, &kernel.breaks());

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut ratio: f64 = 0.0;
    for j in 0..=steps {
        let t = j as f64 * dt;
        let u = propagate_linear(&u0, t);
        let v = propagate_linear(&v0, t);
        let st = state(&corr, &FieldMarginals::new(&corr, &u), &FieldMarginals::new(&corr, &v), kernel);
        let du = d_dx(&u, Axis::X1).norm_sq().sqrt();
        let dv = d_dx(&v, Axis::X1).norm_sq().sqrt();
        let (nu, nv) = (u.norm_sq(), v.norm_sq());
        let bound = 2.0 * (nv * nu.sqrt() * du + nu * nv.sqrt() * dv);
        if bound > 0.0 {
            ratio = ratio.max(st.first.abs() / bound);
        }
        times.push(t);
        states.push(st);
    }

    let i: Vec<f64> = states.iter().map(|s| s.value).collect();
    let d: Vec<f64> = states.iter().map(|s| s.first).collect();
    // The second identity differences the (already checked) first derivative:
    // a second difference of I would amplify its roundoff by 1/h² and swamp
    // the O(h²) truncation error at h ~ 1e−3.
    let stencil = |h: usize| {
        let hh = h as f64 * dt;
        let mut first = vec![f64::NAN; i.len()];
        let mut second = vec![f64::NAN; i.len()];
        for j in h..i.len() - h {
            first[j] = (i[j + h] - i[j - h]) / (2.0 * hh) - states[j].first;
            second[j] = (d[j + h] - d[j - h]) / (2.0 * hh) - states[j].second;
        }
        (first, second)
    };
    let max_abs = |s: &[f64]| s.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
    let (first, second) = stencil(1);
    let (cf, cs) = stencil(2);
    let (max_first, max_second) = (max_abs(&first), max_abs(&second));
    let (coarse_first, coarse_second) = (max_abs(&cf), max_abs(&cs));
    let shrinks = |fine: f64, coarse: f64| coarse <= RESIDUAL_FLOOR || fine < coarse;
    let refinement_ok = shrinks(max_first, coarse_first) && shrinks(max_second, coarse_second);

    let h: Vec<f64> = states.iter().map(|s| s.hessian).collect();
    let integral: f64 = h.windows(2).map(|w| 0.5 * dt * (w[0] + w[1])).sum();
    let (nu, nv) = (u0.norm_sq(), v0.norm_sq());
    let rhs = nv * nu.sqrt() * norm_hs(&u0, 1.0) + nu * nv.sqrt() * norm_hs(&v0, 1.0);
    let hessian_constant = if rhs > 0.0 { integral / rhs } else { 0.0 };

    Ok(VirialResiduals {
        times,
        states,
        first,
        second,
        max_first,
        max_second,
        coarse_first,
        coarse_second,
        refinement_ok,
        hessian_constant,
        first_derivative_ratio: ratio,
    })
}

/// A pair of unit-mass fields close to the ground state: `φ₀` plus a random
/// perturbation of size `eps` on degrees 1 and 2. Keeps the functional's
/// third time derivative moderate so central differences at `dt = 1e−3`
/// resolve the identities well below 1e−6.
pub fn localized_pair(eps: f64, seed: u64) -> (SpectralField, SpectralField) {
    let make = |part: u64| {
        let mut rng = SplitMix64::seed_from_u64(derive_seed(seed, &[part]));
        let mut u = SpectralField::ground_state(2);
        for n in 1..=2 {
            for k1 in 0..=n {
                let c: Complex64 = complex_gaussian(&mut rng);
                u.add_at(k1, n - k1, c * eps);
            }
        }
        let norm = u.norm_sq().sqrt();
        &u * (1.0 / norm)
    };
    (make(0), make(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kernel_has_no_derivatives() {
        let (u, v) = localized_pair(0.3, 4);
        let r = virial_residuals(&u, &v, &Kernel::Constant(1.0), 0.01, 1e-3, Axis::X1).unwrap();
        for s in &r.states {
            assert!((s.value - 1.0).abs() < 1e-12);
            assert_eq!(s.first, 0.0);
        }
        assert!(r.max_first < 1e-9);
    }

    #[test]
    fn zero_partner_gives_zero() {
        let (u, _) = localized_pair(0.1, 1);
        let v = SpectralField::zeros(2);
        let w = Kernel::Rho(WeightRhoM::new(2.0).unwrap());
        let r = virial_residuals(&u, &v, &w, 0.01, 1e-3, Axis::X2).unwrap();
        assert_eq!(r.max_first, 0.0);
        assert_eq!(r.max_second, 0.0);
    }

    #[test]
    fn odd_kernel_on_ground_states_vanishes() {
        let g = SpectralField::ground_state(0);
        assert!(interaction_i(&g, &g, &Kernel::Odd, Axis::X1).abs() < 1e-14);
    }

    #[test]
    fn too_short_horizon_is_rejected() {
        let g = SpectralField::ground_state(0);
        let r = virial_residuals(&g, &g, &Kernel::Odd, 0.002, 1e-3, Axis::X1);
        assert!(matches!(r, Err(Error::TooFewSamples { .. })));
    }
}
