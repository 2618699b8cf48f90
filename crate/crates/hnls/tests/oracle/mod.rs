//! Uniform-grid brute force for the modified-energy correction and flux.
//!
//! Written from the integrals directly (not from the library's term lists):
//!
//! ```text
//! G₀ = Σᵢ ∫|u|²|∂ᵢu|² + ½Re∫u²(∂ᵢū)²  + ¼∫|x|²|u|⁴
//! F₀ = Σᵢ 2Re∫|∂ᵢu|² u_t ū + Re∫(∂ᵢū)² u_t u
//! G₁ = Σᵢ ∫|u|²|∂ᵢu_t|² + ½Re∫u²(∂ᵢū_t)² + Re∫Xᵢ ∂ᵢū_t
//!      + ∫|x|²|u|²|u_t|² + ½Re∫|x|²u²ū_t²
//! Xᵢ = 2u_t ū ∂ᵢu + 2u_t u ∂ᵢū + 2u ū_t ∂ᵢu
//! F₁ = Σᵢ 2Re∫u_t ū|∂ᵢu_t|² + Re∫u u_t(∂ᵢū_t)² + Re∫(∂_t Xᵢ) ∂ᵢū_t
//!      + ∫|x|² ∂_t|u|² |u_t|² + ½Re∫|x|² ∂_t(u²) ū_t²
//! ```
//!
//! with `S = σG`, `R = σF`.

use hnls::dynamics::Nonlinearity;
use hnls::energies::dt_power;
use hnls::hermite::ladder::d_dx;
use hnls::hermite::{synthesize_on_nodes, Axis};
use hnls::SpectralField;
use num_complex::Complex64;

const HALF_WIDTH: f64 = 8.0;
const POINTS: usize = 401;

struct Samples {
    x: Vec<f64>,
    u: Vec<Complex64>,
    ut: Vec<Complex64>,
    utt: Vec<Complex64>,
    du: [Vec<Complex64>; 2],
    dut: [Vec<Complex64>; 2],
}

fn sample(u: &SpectralField, nl: Nonlinearity) -> Samples {
    let h = 2.0 * HALF_WIDTH / (POINTS - 1) as f64;
    let x: Vec<f64> = (0..POINTS).map(|i| -HALF_WIDTH + i as f64 * h).collect();
    let ut = dt_power(u, 1, nl).unwrap();
    let utt = dt_power(u, 2, nl).unwrap();
    // row-major: index j·POINTS + l is the point (x_j, x_l)
    let on = |f: &SpectralField| synthesize_on_nodes(f, &x).iter().copied().collect::<Vec<_>>();
    Samples {
        u: on(u),
        ut: on(&ut),
        utt: on(&utt),
        du: [on(&d_dx(u, Axis::X1)), on(&d_dx(u, Axis::X2))],
        dut: [on(&d_dx(&ut, Axis::X1)), on(&d_dx(&ut, Axis::X2))],
        x,
    }
}

/// (S, R) of order `k` by the trapezoid rule on a uniform square grid.
pub fn brute_force_s_r(u: &SpectralField, k: usize, nl: Nonlinearity) -> (f64, f64) {
    let s = sample(u, nl);
    let h = s.x[1] - s.x[0];
    let (mut g, mut f) = (0.0, 0.0);
    for j in 0..POINTS {
        for l in 0..POINTS {
            let r2 = s.x[j] * s.x[j] + s.x[l] * s.x[l];
            let (u, ut, utt) = (s.u[j * POINTS + l], s.ut[j * POINTS + l], s.utt[j * POINTS + l]);
            let (mut gp, mut fp) = (0.0, 0.0);
            match k {
                0 => {
                    for i in 0..2 {
                        let d = s.du[i][j * POINTS + l];
                        gp += u.norm_sqr() * d.norm_sqr() + 0.5 * (u * u * d.conj() * d.conj()).re;
                        fp += 2.0 * (d.norm_sqr() * ut * u.conj()).re + (d.conj() * d.conj() * ut * u).re;
                    }
                    gp += 0.25 * r2 * u.norm_sqr() * u.norm_sqr();
                }
                1 => {
                    for i in 0..2 {
                        let (d, dt) = (s.du[i][j * POINTS + l], s.dut[i][j * POINTS + l]);
                        let x_i = 2.0 * ut * u.conj() * d + 2.0 * ut * u * d.conj() + 2.0 * u * ut.conj() * d;
                        let dx_i = 2.0 * (utt * u.conj() * d + ut * ut.conj() * d + ut * u.conj() * dt)
                            + 2.0 * (utt * u * d.conj() + ut * ut * d.conj() + ut * u * dt.conj())
                            + 2.0 * (ut * ut.conj() * d + u * utt.conj() * d + u * ut.conj() * dt);
                        gp += u.norm_sqr() * dt.norm_sqr() + 0.5 * (u * u * dt.conj() * dt.conj()).re + (x_i * dt.conj()).re;
                        fp += 2.0 * (ut * u.conj()).re * dt.norm_sqr()
                            + (u * ut * dt.conj() * dt.conj()).re
                            + (dx_i * dt.conj()).re;
                    }
                    gp += r2 * u.norm_sqr() * ut.norm_sqr() + 0.5 * r2 * (u * u * ut.conj() * ut.conj()).re;
                    fp += r2 * 2.0 * (ut * u.conj()).re * ut.norm_sqr() + 0.5 * r2 * (2.0 * u * ut * ut.conj() * ut.conj()).re;
                }
                _ => panic!("order {k} not covered"),
            }
            g += gp;
            f += fp;
        }
    }
    let sigma = nl.sigma();
    (sigma * g * h * h, sigma * f * h * h)
}
