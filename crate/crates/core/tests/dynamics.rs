use hnls_core::data::random_smooth;
use hnls_core::dynamics::{evolve, strang_step, EvolutionConfig, Integrator, Nonlinearity};
use hnls_core::energies::dt_power;
use hnls_core::spectral::apply_a;
use hnls_core::SpectralField;
use num_complex::Complex64;

fn datum() -> SpectralField {
    &random_smooth(8, 3, 2.0, 1.0, 12) * 0.8
}

#[test]
fn first_time_derivative_matches_the_symmetric_step_difference() {
    let u = datum();
    for nl in [Nonlinearity::Defocusing, Nonlinearity::Focusing, Nonlinearity::Linear] {
        let ut = dt_power(&u, 1, nl).unwrap();
        let mut errs = Vec::new();
        for h in [1e-3, 5e-4] {
            let fd = &(&strang_step(&u, h, nl).unwrap() - &strang_step(&u, -h, nl).unwrap()) * (0.5 / h);
            errs.push((&fd - &ut).norm() / ut.norm());
        }
        assert!(errs[0] < 1e-5, "{nl:?}: {errs:?}");
        assert!(errs[1] < errs[0] / 3.0 || errs[1] < 1e-12, "{nl:?}: {errs:?}");
    }
}

#[test]
fn second_time_derivative_is_the_derivative_of_the_vector_field() {
    let u = datum();
    let nl = Nonlinearity::Defocusing;
    let x = dt_power(&u, 1, nl).unwrap();
    let utt = dt_power(&u, 2, nl).unwrap();
    let h = 1e-5;
    let plus = dt_power(&(&u + &(&x * h)), 1, nl).unwrap();
    let minus = dt_power(&(&u - &(&x * h)), 1, nl).unwrap();
    let fd = &(&plus - &minus) * (0.5 / h);
    assert!((&fd - &utt).norm() / utt.norm() < 1e-8);
}

#[test]
fn linear_derivatives_are_powers_of_ia() {
    let u = datum();
    let i = Complex64::new(0.0, 1.0);
    let ut = dt_power(&u, 1, Nonlinearity::Linear).unwrap();
    assert!(ut.max_abs_diff(&(&apply_a(&u) * i)) < 1e-14);
    let utt = dt_power(&u, 2, Nonlinearity::Linear).unwrap();
    assert!(utt.max_abs_diff(&(&apply_a(&apply_a(&u)) * -1.0)) < 1e-12);
}

fn final_state(u0: &SpectralField, dt: f64, integrator: Integrator) -> SpectralField {
    let mut cfg = EvolutionConfig::reference(Nonlinearity::Defocusing, 0.5);
    cfg.n_max = u0.n_max();
    cfg.q_nl = hnls_core::dynamics::min_nonlinear_q(u0.n_max());
    cfg.dt = dt;
    cfg.record_every = (0.5 / dt).round() as usize;
    cfg.integrator = integrator;
    cfg.keep_snapshots = true;
    evolve(u0, &cfg).unwrap().snapshots.pop().unwrap()
}

#[test]
fn strang_converges_at_second_order() {
    let u0 = datum();
    let reference = final_state(&u0, 1e-4, Integrator::Yoshida4);
    let e1 = (&final_state(&u0, 1e-2, Integrator::Strang) - &reference).norm();
    let e2 = (&final_state(&u0, 5e-3, Integrator::Strang) - &reference).norm();
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "error ratio {ratio} ({e1:.3e} → {e2:.3e})");
}

#[test]
fn mass_loss_vanishes_with_resolution() {
    let u0 = &random_smooth(8, 2, 2.0, 1.0, 3) * 0.5;
    let loss = |n_max: usize, integrator| {
        let u = u0.resized(n_max);
        (u.norm_sq() - final_state(&u, 1e-2, integrator).norm_sq()).abs()
    };
    for integrator in [Integrator::Strang, Integrator::Yoshida4] {
        let (coarse, fine) = (loss(8, integrator), loss(24, integrator));
        assert!(fine < 1e-10 && fine < 1e-2 * coarse, "{integrator:?}: {coarse:.3e} → {fine:.3e}");
    }
}

#[test]
fn truncation_mass_loss_is_first_order_in_the_step() {
    // Each projected sub-step drops ‖(1−P)(u e^{iθ|u|²})‖² = O(dt²).
    let u0 = datum();
    let loss = |dt| u0.norm_sq() - final_state(&u0, dt, Integrator::Strang).norm_sq();
    let (a, b) = (loss(1e-2), loss(5e-3));
    assert!(a > 0.0 && a < 1e-6, "{a:.3e}");
    assert!((1.7..2.3).contains(&(a / b)), "{a:.3e} → {b:.3e}");
}
