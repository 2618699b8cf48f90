//! Time derivatives of solutions expressed through the equation, and the
//! modified energies `E_k = ½‖A ∂_t^k u‖² + S_{2k+2}(u)` with fluxes
//! `R_{2k+2}(u)` satisfying `dE_k/dt = R_{2k+2}` for k ∈ {0, 1}.
//!
//! For the Galerkin system `u_t = i(Au + σP(|u|²u))` one has
//! `d/dt ½‖A∂_t^k u‖² = −σ Re⟨A ∂_t^{k+1}u, M_k⟩` with `M_0 = |u|²u`,
//! `M_1 = 2|u|²u_t + u²ū_t`. Integrating by parts in x turns the right side
//! into `−σ d/dt G_k + σ F_k`, where `F_k` collects the terms in which the
//! time derivative lands on an undifferentiated-in-x factor. Hence
//! `S = σ G_k`, `R = σ F_k`. Every integrand is a product of four factors.

use std::collections::HashMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::dynamics::{CubicGrid, Nonlinearity, Trajectory};
use crate::error::{Error, Result};
use crate::hermite::ladder::{d_dx, Axis};
use crate::hermite::{Grid, SpectralField, WeightScale};
use crate::spectral::apply_a;

/// `∂_t^h u` for the Galerkin flow, `h ∈ {1, 2}`:
/// `u_t = i(Au + σP(|u|²u))`, `u_tt = i(A u_t + σP(2|u|²u_t + u²ū_t))`.
pub fn dt_power_on(grid: &CubicGrid, u: &SpectralField, h: usize, nl: Nonlinearity) -> Result<SpectralField> {
    let i = Complex64::new(0.0, 1.0);
    let ut = {
        let lin = apply_a(u);
        let total = if nl == Nonlinearity::Linear {
            lin
        } else {
            &lin + &grid.cubic(u, nl)?
        };
        &total * i
    };
    match h {
        1 => Ok(ut),
        2 => {
            let lin = apply_a(&ut);
            if nl == Nonlinearity::Linear {
                return Ok(&lin * i);
            }
            let fu = grid.to_physical(u)?;
            let fut = grid.to_physical(&ut)?;
            let mut m = fu.clone();
            ndarray::Zip::from(m.values_mut())
                .and(fu.values())
                .and(fut.values())
                .for_each(|out, &a, &b| {
                    *out = (a * a.conj() * b * 2.0 + a * a * b.conj()) * nl.sigma();
                });
            let proj = grid.to_spectral(&m)?;
            Ok(&(&lin + &proj) * i)
        }
        _ => Err(Error::UnsupportedOrder(h, "1, 2")),
    }
}

pub fn dt_power(u: &SpectralField, h: usize, nl: Nonlinearity) -> Result<SpectralField> {
    dt_power_on(&CubicGrid::for_degree(u.n_max())?, u, h, nl)
}

/// Spatial operator applied to a factor before the product is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotOp {
    Identity,
    D(Axis),
    /// Pointwise multiplication by ⟨x⟩ = (1+|x|²)^{1/2}.
    Bracket,
}

/// `L ∂_t^order u`, conjugated if `conj`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub op: SlotOp,
    pub order: u8,
    pub conj: bool,
}

const fn f(op: SlotOp, order: u8, conj: bool) -> Factor {
    Factor { op, order, conj }
}

/// `coeff · Re ∫ Π factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrilinearTerm {
    pub factors: [Factor; 4],
    pub coeff: Complex64,
}

fn term(coeff: f64, factors: [Factor; 4]) -> QuadrilinearTerm {
    QuadrilinearTerm {
        factors,
        coeff: Complex64::new(coeff, 0.0),
    }
}

/// Terms of `G_k` (so that `S_{2k+2} = σ G_k`).
pub fn s_terms(k: usize) -> Result<Vec<QuadrilinearTerm>> {
    use SlotOp::{Bracket as B, Identity as I};
    let mut out = Vec::new();
    match k {
        0 => {
            for a in Axis::BOTH {
                let d = SlotOp::D(a);
                out.push(term(1.0, [f(I, 0, false), f(I, 0, true), f(d, 0, false), f(d, 0, true)]));
                out.push(term(0.5, [f(I, 0, false), f(I, 0, false), f(d, 0, true), f(d, 0, true)]));
            }
            // ¼∫|x|²|u|⁴ = ¼∫⟨x⟩²|u|⁴ − ¼∫|u|⁴
            out.push(term(0.25, [f(B, 0, false), f(B, 0, true), f(I, 0, false), f(I, 0, true)]));
            out.push(term(-0.25, [f(I, 0, false), f(I, 0, true), f(I, 0, false), f(I, 0, true)]));
        }
        1 => {
            for a in Axis::BOTH {
                let d = SlotOp::D(a);
                out.push(term(1.0, [f(I, 0, false), f(I, 0, true), f(d, 1, false), f(d, 1, true)]));
                out.push(term(0.5, [f(I, 0, false), f(I, 0, false), f(d, 1, true), f(d, 1, true)]));
                // Re∫X_i ∂_i ū_t, X_i = 2u_t ū ∂_i u + 2u_t u ∂_i ū + 2u ū_t ∂_i u
                out.push(term(2.0, [f(I, 1, false), f(I, 0, true), f(d, 0, false), f(d, 1, true)]));
                out.push(term(2.0, [f(I, 1, false), f(I, 0, false), f(d, 0, true), f(d, 1, true)]));
                out.push(term(2.0, [f(I, 0, false), f(I, 1, true), f(d, 0, false), f(d, 1, true)]));
            }
            // ∫|x|²|u|²|u_t|² + ½Re∫|x|² u² ū_t²
            out.push(term(1.0, [f(B, 0, false), f(B, 0, true), f(I, 1, false), f(I, 1, true)]));
            out.push(term(-1.0, [f(I, 0, false), f(I, 0, true), f(I, 1, false), f(I, 1, true)]));
            out.push(term(0.5, [f(B, 0, false), f(B, 0, false), f(I, 1, true), f(I, 1, true)]));
            out.push(term(-0.5, [f(I, 0, false), f(I, 0, false), f(I, 1, true), f(I, 1, true)]));
        }
        _ => return Err(Error::UnsupportedOrder(k, "0, 1")),
    }
    Ok(out)
}

/// Terms of `F_k` (so that `R_{2k+2} = σ F_k`).
pub fn r_terms(k: usize) -> Result<Vec<QuadrilinearTerm>> {
    use SlotOp::{Bracket as B, Identity as I};
    let mut out = Vec::new();
    match k {
        0 => {
            for a in Axis::BOTH {
                let d = SlotOp::D(a);
                out.push(term(2.0, [f(d, 0, false), f(d, 0, true), f(I, 1, false), f(I, 0, true)]));
                out.push(term(1.0, [f(d, 0, true), f(d, 0, true), f(I, 1, false), f(I, 0, false)]));
            }
        }
        1 => {
            for a in Axis::BOTH {
                let d = SlotOp::D(a);
                out.push(term(2.0, [f(I, 1, false), f(I, 0, true), f(d, 1, false), f(d, 1, true)]));
                out.push(term(1.0, [f(I, 0, false), f(I, 1, false), f(d, 1, true), f(d, 1, true)]));
                // Re∫(∂_t X_i) ∂_i ū_t
                let last = f(d, 1, true);
                for [p, q, r] in [
                    [f(I, 2, false), f(I, 0, true), f(d, 0, false)],
                    [f(I, 1, false), f(I, 1, true), f(d, 0, false)],
                    [f(I, 1, false), f(I, 0, true), f(d, 1, false)],
                    [f(I, 2, false), f(I, 0, false), f(d, 0, true)],
                    [f(I, 1, false), f(I, 1, false), f(d, 0, true)],
                    [f(I, 1, false), f(I, 0, false), f(d, 1, true)],
                    [f(I, 1, false), f(I, 1, true), f(d, 0, false)],
                    [f(I, 0, false), f(I, 2, true), f(d, 0, false)],
                    [f(I, 0, false), f(I, 1, true), f(d, 1, false)],
                ] {
                    out.push(term(2.0, [p, q, r, last]));
                }
            }
            // ∫|x|² ∂_t(|u|²)|u_t|² + ½Re∫|x|² ∂_t(u²) ū_t²
            out.push(term(2.0, [f(B, 1, false), f(B, 0, true), f(I, 1, false), f(I, 1, true)]));
            out.push(term(-2.0, [f(I, 1, false), f(I, 0, true), f(I, 1, false), f(I, 1, true)]));
            out.push(term(1.0, [f(B, 0, false), f(B, 1, false), f(I, 1, true), f(I, 1, true)]));
            out.push(term(-1.0, [f(I, 0, false), f(I, 1, false), f(I, 1, true), f(I, 1, true)]));
        }
        _ => return Err(Error::UnsupportedOrder(k, "0, 1")),
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub k: usize,
    /// kinetic + s
    pub e: f64,
    /// ½‖A ∂_t^k u‖²
    pub kinetic: f64,
    pub s: f64,
    pub r: f64,
}

/// Grids reused across evaluations at a fixed truncation.
#[derive(Debug, Clone)]
pub struct EnergyEvaluator {
    cubic: CubicGrid,
    quad: Grid,
    n_max: usize,
}

impl EnergyEvaluator {
    /// Quadrilinear integrands have degree ≤ 4(n_max+1)+2 per axis times
    /// `e^{−2|x|²}`, integrated exactly by a scale-2 rule with
    /// `Q ≥ 2 n_max + 4`.
    pub fn new(n_max: usize) -> Result<Self> {
        Ok(EnergyEvaluator {
            cubic: CubicGrid::for_degree(n_max)?,
            quad: Grid::new(Self::required_q(n_max), WeightScale::Two, n_max + 2)?,
            n_max,
        })
    }

    pub fn required_q(n_max: usize) -> usize {
        2 * n_max + 4
    }

    pub fn cubic(&self) -> &CubicGrid {
        &self.cubic
    }

    fn samples(&self, u: &SpectralField, nl: Nonlinearity, max_order: u8, terms: &[&[QuadrilinearTerm]]) -> Result<HashMap<(SlotOp, u8), Array2<Complex64>>> {
        let mut derivs = vec![u.clone()];
        for h in 1..=max_order as usize {
            derivs.push(dt_power_on(&self.cubic, u, h, nl)?);
        }
        let mut cache = HashMap::new();
        let nodes = self.quad.nodes().to_vec();
        for list in terms {
            for t in list.iter() {
                for fac in t.factors {
                    let key = (fac.op, fac.order);
                    if cache.contains_key(&key) {
                        continue;
                    }
                    let base = &derivs[fac.order as usize];
                    let values = match fac.op {
                        SlotOp::Identity => self.quad.to_physical(base)?.values().clone(),
                        SlotOp::D(a) => self.quad.to_physical(&d_dx(base, a))?.values().clone(),
                        SlotOp::Bracket => {
                            let mut v = self.quad.to_physical(base)?.values().clone();
                            for ((j, l), c) in v.indexed_iter_mut() {
                                *c *= (1.0 + nodes[j] * nodes[j] + nodes[l] * nodes[l]).sqrt();
                            }
                            v
                        }
                    };
                    cache.insert(key, values);
                }
            }
        }
        Ok(cache)
    }

    fn sum_terms(&self, terms: &[QuadrilinearTerm], cache: &HashMap<(SlotOp, u8), Array2<Complex64>>) -> f64 {
        let mut total = 0.0;
        for t in terms {
            let vals: Vec<&Array2<Complex64>> = t.factors.iter().map(|fac| &cache[&(fac.op, fac.order)]).collect();
            let integral = self.quad.integrate_values(|j, l| {
                let mut p = t.coeff;
                for (fac, v) in t.factors.iter().zip(&vals) {
                    let x = v[(j, l)];
                    p *= if fac.conj { x.conj() } else { x };
                }
                p.re
            });
            total += integral;
        }
        total
    }

    fn check(&self, u: &SpectralField, k: usize) -> Result<()> {
        if k > 1 {
            return Err(Error::UnsupportedOrder(k, "0, 1"));
        }
        if u.n_max() > self.n_max {
            return Err(Error::GridTooSmall {
                got: self.quad.q(),
                required: Self::required_q(u.n_max()),
            });
        }
        Ok(())
    }

    pub fn report(&self, u: &SpectralField, k: usize, nl: Nonlinearity) -> Result<EnergyReport> {
        self.check(u, k)?;
        let u = u.resized(self.n_max);
        let dtk = if k == 0 { u.clone() } else { dt_power_on(&self.cubic, &u, k, nl)? };
        let kinetic = 0.5 * apply_a(&dtk).norm_sq();
        if nl == Nonlinearity::Linear {
            return Ok(EnergyReport {
                k,
                e: kinetic,
                kinetic,
                s: 0.0,
                r: 0.0,
            });
        }
        let st = s_terms(k)?;
        let rt = r_terms(k)?;
        let cache = self.samples(&u, nl, k as u8 + 1, &[&st, &rt])?;
        let s = nl.sigma() * self.sum_terms(&st, &cache);
        let r = nl.sigma() * self.sum_terms(&rt, &cache);
        Ok(EnergyReport {
            k,
            e: kinetic + s,
            kinetic,
            s,
            r,
        })
    }
}

pub fn s_energy(u: &SpectralField, k: usize, nl: Nonlinearity) -> Result<f64> {
    Ok(EnergyEvaluator::new(u.n_max())?.report(u, k, nl)?.s)
}

pub fn r_term(u: &SpectralField, k: usize, nl: Nonlinearity) -> Result<f64> {
    Ok(EnergyEvaluator::new(u.n_max())?.report(u, k, nl)?.r)
}

/// Residual of `dE_k/dt = R_{2k+2}` along a recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub times: Vec<f64>,
    pub reports: Vec<EnergyReport>,
    /// Central difference of E minus R at interior stamps (NaN at the ends).
    pub pointwise: Vec<f64>,
    /// `E(T) − E(0) − ∫₀ᵀ R dt` (trapezoid).
    pub integrated: f64,
    pub max_abs_e: f64,
}

impl IdentityResidual {
    pub fn normalized_integrated(&self) -> f64 {
        if self.max_abs_e == 0.0 {
            0.0
        } else {
            self.integrated.abs() / self.max_abs_e
        }
    }
}

/// Largest stamp spacing accepted for differencing.
pub const MAX_STAMP_SPACING: f64 = 1e-2;

pub fn identity_residual(traj: &Trajectory, k: usize, nl: Nonlinearity) -> Result<IdentityResidual> {
    let n = traj.snapshots.len();
    if n < 3 {
        return Err(Error::TooFewSamples { have: n, need: 3 });
    }
    if traj.times.len() != n {
        return Err(Error::Dimension("stamp and snapshot counts differ".into()));
    }
    let h = traj.times[1] - traj.times[0];
    check_uniform(&traj.times)?;
    if h > MAX_STAMP_SPACING * (1.0 + 1e-12) {
        return Err(Error::Parameter(format!(
            "stamp spacing {h} exceeds {MAX_STAMP_SPACING} for differencing"
        )));
    }
    let n_max = traj.snapshots.iter().map(|s| s.n_max()).max().unwrap_or(0);
    let eval = EnergyEvaluator::new(n_max)?;
    let reports = traj
        .snapshots
        .iter()
        .map(|u| eval.report(u, k, nl))
        .collect::<Result<Vec<_>>>()?;
    let mut pointwise = vec![f64::NAN; n];
    for j in 1..n - 1 {
        pointwise[j] = (reports[j + 1].e - reports[j - 1].e) / (2.0 * h) - reports[j].r;
    }
    let mut flux = 0.0;
    for j in 0..n - 1 {
        flux += 0.5 * h * (reports[j].r + reports[j + 1].r);
    }
    let integrated = reports[n - 1].e - reports[0].e - flux;
    let max_abs_e = reports.iter().fold(0.0f64, |m, r| m.max(r.e.abs()));
    Ok(IdentityResidual {
        times: traj.times.clone(),
        reports,
        pointwise,
        integrated,
        max_abs_e,
    })
}

pub(crate) fn check_uniform(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Ok(());
    }
    let h = times[1] - times[0];
    if !(h > 0.0) {
        return Err(Error::NonUniformStamps(1));
    }
    for j in 2..times.len() {
        let d = times[j] - times[j - 1];
        if (d - h).abs() > 1e-9 * h.max(times[j].abs() * 1e-3) {
            return Err(Error::NonUniformStamps(j));
        }
    }
    Ok(())
}
