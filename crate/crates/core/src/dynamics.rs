//! Time integration of `u_t = i(A u + σ|u|²u)`.
//!
//! The linear flow is diagonal in the Hermite basis; the nonlinear flow
//! `u ↦ u·e^{iσt|u|²}` is exact pointwise. Strang splitting composes the two,
//! with the pointwise flow applied on the scale-2 grid and projected back.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::{Grid, PhysicalField, SpectralField, WeightScale};
use crate::spectral::{bracket_power_even, eigenvalue, norm_hs};

/// Sign of the cubic term in `i u_t + A u + σ u|u|² = 0`.
///
/// With this sign convention `σ = +1` makes the quartic part of the
/// Hamiltonian `½‖u‖²_{ℋ¹} + σ/4 ‖u‖⁴_{L⁴}` positive, i.e. defocusing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nonlinearity {
    Defocusing,
    Focusing,
    Linear,
}

impl Nonlinearity {
    pub fn sigma(self) -> f64 {
        match self {
            Nonlinearity::Defocusing => 1.0,
            Nonlinearity::Focusing => -1.0,
            Nonlinearity::Linear => 0.0,
        }
    }

    pub fn from_sigma(s: i32) -> Option<Self> {
        match s {
            1 => Some(Nonlinearity::Defocusing),
            -1 => Some(Nonlinearity::Focusing),
            0 => Some(Nonlinearity::Linear),
            _ => None,
        }
    }

    pub fn as_sigma_i32(self) -> i32 {
        self.sigma() as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Integrator {
    #[default]
    Strang,
    /// Triple-jump composition of Strang steps (fourth order).
    Yoshida4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub nonlinearity: Nonlinearity,
    pub dt: f64,
    pub t_final: f64,
    pub n_max: usize,
    pub q_nl: usize,
    pub record_every: usize,
    pub integrator: Integrator,
    /// Keep a copy of the state at every recorded stamp.
    pub keep_snapshots: bool,
}

impl EvolutionConfig {
    /// Reference resolution: n_max = 32, Q_nl = 67, dt = 1e−3.
    pub fn reference(nonlinearity: Nonlinearity, t_final: f64) -> Self {
        EvolutionConfig {
            nonlinearity,
            dt: 1e-3,
            t_final,
            n_max: 32,
            q_nl: min_nonlinear_q(32),
            record_every: 100,
            integrator: Integrator::Strang,
            keep_snapshots: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("T must be nonnegative, got {}", self.t_final)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        let required = min_nonlinear_q(self.n_max);
        if self.q_nl < required {
            return Err(Error::GridTooSmall {
                got: self.q_nl,
                required,
            });
        }
        Ok(())
    }

    /// Number of steps, `round(T / dt)`.
    pub fn steps(&self) -> u64 {
        (self.t_final / self.dt).round() as u64
    }
}

/// Smallest scale-2 grid integrating cubic products of degree-`n_max` fields
/// exactly.
pub fn min_nonlinear_q(n_max: usize) -> usize {
    2 * (n_max + 1) + 1
}

/// `e^{itA} u`.
pub fn propagate_linear(u: &SpectralField, t: f64) -> SpectralField {
    u.map_degree(|n| Complex64::from_polar(1.0, t * eigenvalue(n) as f64))
}

/// The scale-2 grid on which cubic terms are formed and projected.
#[derive(Debug, Clone)]
pub struct CubicGrid {
    grid: Grid,
    n_max: usize,
}

impl CubicGrid {
    pub fn new(n_max: usize, q_nl: usize) -> Result<Self> {
        let required = min_nonlinear_q(n_max);
        if q_nl < required {
            return Err(Error::GridTooSmall { got: q_nl, required });
        }
        Ok(CubicGrid {
            grid: Grid::new(q_nl, WeightScale::Two, n_max + 1)?,
            n_max,
        })
    }

    /// Minimal exact grid for `n_max`.
    pub fn for_degree(n_max: usize) -> Result<Self> {
        Self::new(n_max, min_nonlinear_q(n_max))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn to_physical(&self, u: &SpectralField) -> Result<PhysicalField> {
        self.check(u)?;
        self.grid.to_physical(u)
    }

    pub fn to_spectral(&self, f: &PhysicalField) -> Result<SpectralField> {
        self.grid.to_spectral(f, self.n_max)
    }

    fn check(&self, u: &SpectralField) -> Result<()> {
        if u.n_max() > self.n_max {
            return Err(Error::GridTooSmall {
                got: self.grid.q(),
                required: min_nonlinear_q(u.n_max()),
            });
        }
        Ok(())
    }

    /// Projection of `σ u|u|²` onto the triangle.
    pub fn cubic(&self, u: &SpectralField, nl: Nonlinearity) -> Result<SpectralField> {
        let mut f = self.to_physical(u)?;
        let sigma = nl.sigma();
        f.values_mut().mapv_inplace(|v| v * (sigma * v.norm_sqr()));
        self.to_spectral(&f)
    }

    /// Projection of the exact pointwise flow `u·e^{iσt|u|²}`.
    pub fn nonlinear_flow(&self, u: &SpectralField, t: f64, nl: Nonlinearity) -> Result<SpectralField> {
        if nl == Nonlinearity::Linear {
            return Ok(u.clone());
        }
        // Only the increment u(e^{iθ|u|²} − 1) goes through the quadrature
        // projection. The scale-2 rule does not reproduce a plain round trip
        // of the top modes, and re-projecting all of u every step lets that
        // defect compound over long runs.
        let mut f = self.to_physical(u)?;
        let theta = nl.sigma() * t;
        f.values_mut().mapv_inplace(|v| {
            let phi = theta * v.norm_sqr();
            let half = (0.5 * phi).sin();
            v * Complex64::new(-2.0 * half * half, phi.sin())
        });
        Ok(u + &self.to_spectral(&f)?)
    }

    /// `‖u‖⁴_{L⁴}`, exact on this grid.
    pub fn l4_pow4(&self, u: &SpectralField) -> Result<f64> {
        let f = self.to_physical(u)?;
        Ok(f.integrate(|v, _, _| v.norm_sqr().powi(2)))
    }

    /// One Strang step: half linear, full nonlinear, half linear.
    pub fn strang_step(&self, u: &SpectralField, dt: f64, nl: Nonlinearity) -> Result<SpectralField> {
        let half = propagate_linear(u, 0.5 * dt);
        let mid = self.nonlinear_flow(&half, dt, nl)?;
        Ok(propagate_linear(&mid, 0.5 * dt))
    }

    pub fn step(&self, u: &SpectralField, dt: f64, nl: Nonlinearity, integrator: Integrator) -> Result<SpectralField> {
        match integrator {
            Integrator::Strang => self.strang_step(u, dt, nl),
            Integrator::Yoshida4 => {
                let cbrt2 = 2f64.cbrt();
                let w1 = 1.0 / (2.0 - cbrt2);
                let w0 = -cbrt2 / (2.0 - cbrt2);
                let a = self.strang_step(u, w1 * dt, nl)?;
                let b = self.strang_step(&a, w0 * dt, nl)?;
                self.strang_step(&b, w1 * dt, nl)
            }
        }
    }
}

/// Projection of `σ u|u|²` on the minimal exact grid for `u`.
pub fn nonlinear_cubic(u: &SpectralField, nl: Nonlinearity) -> Result<SpectralField> {
    CubicGrid::for_degree(u.n_max())?.cubic(u, nl)
}

/// One Strang step on the minimal exact grid.
pub fn strang_step(u: &SpectralField, dt: f64, nl: Nonlinearity) -> Result<SpectralField> {
    CubicGrid::for_degree(u.n_max())?.strang_step(u, dt, nl)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observables {
    pub mass: f64,
    pub hamiltonian: f64,
    pub h1: f64,
    pub h2: f64,
    pub h4: f64,
    /// ‖⟨x⟩² u‖
    pub moment2: f64,
    /// ‖⟨x⟩⁴ u‖
    pub moment4: f64,
}

/// Mass, Hamiltonian `½‖u‖²_{ℋ¹} + σ/4 ‖u‖⁴_{L⁴}`, harmonic norms and moments.
pub fn observables_on(grid: &CubicGrid, u: &SpectralField, nl: Nonlinearity) -> Result<Observables> {
    let h1 = norm_hs(u, 1.0);
    let quartic = if nl == Nonlinearity::Linear {
        0.0
    } else {
        grid.l4_pow4(u)?
    };
    Ok(Observables {
        mass: u.norm_sq(),
        hamiltonian: 0.5 * h1 * h1 + 0.25 * nl.sigma() * quartic,
        h1,
        h2: norm_hs(u, 2.0),
        h4: norm_hs(u, 4.0),
        moment2: bracket_power_even(u, 1).norm(),
        moment4: bracket_power_even(u, 2).norm(),
    })
}

pub fn observables(u: &SpectralField, nl: Nonlinearity) -> Result<Observables> {
    observables_on(&CubicGrid::for_degree(u.n_max())?, u, nl)
}

/// `‖Π_{n > 0.9 n_max} u‖ / ‖u‖`.
pub fn tail_fraction(u: &SpectralField) -> f64 {
    let total = u.norm_sq();
    if total == 0.0 {
        return 0.0;
    }
    let cut = (0.9 * u.n_max() as f64).floor() as usize;
    (u.tail_norm_sq(cut) / total).sqrt()
}

/// Tail fraction above which the truncation is considered exhausted.
pub const TAIL_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailWarning {
    pub t: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub spacing: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
    pub observables: Vec<Observables>,
    pub warnings: Vec<TailWarning>,
    pub nonlinearity: Nonlinearity,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// What an [`evolve_from`] observer wants after a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Repeated steps from `u0`, recording every `record_every` steps. Stamps are
/// `i·dt` so runs are reproducible independently of accumulated rounding.
pub fn evolve(u0: &SpectralField, cfg: &EvolutionConfig) -> Result<Trajectory> {
    evolve_from(u0, 0, cfg, |_, _, _| Ok(Control::Continue))
}

/// [`evolve`] starting at step `start` (time `start·dt`), with `hook` called
/// after every record. Records fall on multiples of `record_every` counted
/// from step 0, so a resumed run stamps exactly like an uninterrupted one.
pub fn evolve_from<F>(u0: &SpectralField, start: u64, cfg: &EvolutionConfig, mut hook: F) -> Result<Trajectory>
where
    F: FnMut(u64, &SpectralField, &Trajectory) -> Result<Control>,
{
    cfg.validate()?;
    let steps = cfg.steps();
    if start > steps {
        return Err(Error::Parameter(format!(
            "start step {start} lies beyond the final step {steps}"
        )));
    }
    let u0 = u0.resized(cfg.n_max);
    let grid = CubicGrid::new(cfg.n_max, cfg.q_nl)?;
    let mut traj = Trajectory {
        spacing: cfg.record_every as f64 * cfg.dt,
        times: Vec::new(),
        snapshots: Vec::new(),
        observables: Vec::new(),
        warnings: Vec::new(),
        nonlinearity: cfg.nonlinearity,
    };
    let mut u = u0;
    let record = |i: u64, u: &SpectralField, traj: &mut Trajectory| -> Result<()> {
        let t = i as f64 * cfg.dt;
        traj.times.push(t);
        traj.observables.push(observables_on(&grid, u, cfg.nonlinearity)?);
        if cfg.keep_snapshots {
            traj.snapshots.push(u.clone());
        }
        let fraction = tail_fraction(u);
        if fraction > TAIL_WARNING {
            log::warn!("spectral tail fraction {fraction:.3e} at t={t}");
            traj.warnings.push(TailWarning { t, fraction });
        }
        Ok(())
    };
    let every = cfg.record_every as u64;
    if start % every == 0 {
        record(start, &u, &mut traj)?;
        if hook(start, &u, &traj)? == Control::Stop {
            return Ok(traj);
        }
    }
    for i in start + 1..=steps {
        let next = grid.step(&u, cfg.dt, cfg.nonlinearity, cfg.integrator)?;
        if !next.is_finite() {
            return Err(Error::NonFinite {
                last_valid_t: (i - 1) as f64 * cfg.dt,
            });
        }
        u = next;
        if i % every == 0 {
            record(i, &u, &mut traj)?;
            if hook(i, &u, &traj)? == Control::Stop {
                break;
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn smooth(n: usize) -> SpectralField {
        SpectralField::from_fn(n, |k1, k2| {
            let d = (k1 + k2) as f64;
            Complex64::new((0.3 * k1 as f64).cos(), (0.7 * k2 as f64).sin()) * (-d).exp()
        })
    }

    #[test]
    fn linear_propagator_is_pi_periodic() {
        let u = smooth(10);
        assert!(propagate_linear(&u, PI).max_abs_diff(&u) < 1e-13);
        assert_eq!(propagate_linear(&u, 0.0), u);
    }

    #[test]
    fn ground_state_cubic_coefficient() {
        let g = SpectralField::ground_state(4);
        let c = nonlinear_cubic(&g, Nonlinearity::Defocusing).unwrap();
        assert!((c.get(0, 0).re - 1.0 / (2.0 * PI)).abs() < 1e-14);
        let f = nonlinear_cubic(&g, Nonlinearity::Focusing).unwrap();
        assert!((f.get(0, 0).re + 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(matches!(
            CubicGrid::new(8, 18),
            Err(Error::GridTooSmall { required: 19, .. })
        ));
    }

    #[test]
    fn linear_mode_step_is_propagator() {
        let u = smooth(6);
        let s = strang_step(&u, 0.01, Nonlinearity::Linear).unwrap();
        assert!(s.max_abs_diff(&propagate_linear(&u, 0.01)) < 1e-15);
    }

    #[test]
    fn ground_state_hamiltonian() {
        let g = SpectralField::ground_state(2);
        let o = observables(&g, Nonlinearity::Defocusing).unwrap();
        assert!((o.hamiltonian - (1.0 + 1.0 / (8.0 * PI))).abs() < 1e-14);
        assert!((o.mass - 1.0).abs() < 1e-15);
        let f = observables(&g, Nonlinearity::Focusing).unwrap();
        assert!((f.hamiltonian - (1.0 - 1.0 / (8.0 * PI))).abs() < 1e-14);
    }

    #[test]
    fn zero_state_stays_zero() {
        let mut cfg = EvolutionConfig::reference(Nonlinearity::Defocusing, 0.05);
        cfg.n_max = 8;
        cfg.q_nl = min_nonlinear_q(8);
        cfg.record_every = 10;
        let t = evolve(&SpectralField::zeros(8), &cfg).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.snapshots.iter().all(|s| s.norm_sq() == 0.0));
    }
}
