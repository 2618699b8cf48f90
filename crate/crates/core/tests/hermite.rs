use hnls_core::data::random_smooth;
use hnls_core::dynamics::propagate_linear;
use hnls_core::hermite::ladder::{d_dx, mul_x};
use hnls_core::hermite::{hermite_functions, Axis, Grid, WeightScale};
use hnls_core::spectral::{littlewood_paley, norm_hs, project_pi_n, DyadicBlock};
use hnls_core::SpectralField;
use num_complex::Complex64;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = SpectralField> {
    (0usize..14, any::<u64>(), 0.0f64..2.0).prop_map(|(n, seed, decay)| random_smooth(n, n, decay, 1.0, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_on_any_exact_grid(u in field(), extra in 0usize..8) {
        let n = u.n_max();
        let grid = Grid::new(n + 1 + extra, WeightScale::One, n + 1).unwrap();
        let back = grid.to_spectral(&grid.to_physical(&u).unwrap(), n).unwrap();
        prop_assert!(back.max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn parseval(u in field()) {
        let n = u.n_max();
        let grid = Grid::new(n + 2, WeightScale::One, n + 1).unwrap();
        let l2 = grid.to_physical(&u).unwrap().integrate(|v, _, _| v.norm_sqr());
        prop_assert!((l2 - u.norm_sq()).abs() < 1e-12 * u.norm_sq().max(1.0));
    }

    #[test]
    fn linear_flow_is_an_isometry_of_every_hs(u in field(), t in -20.0f64..20.0, s in 0.0f64..5.0) {
        let v = propagate_linear(&u, t);
        prop_assert!((norm_hs(&v, s) - norm_hs(&u, s)).abs() <= 1e-12 * norm_hs(&u, s).max(1.0));
        let back = propagate_linear(&v, -t);
        prop_assert!(back.max_abs_diff(&u) < 1e-13);
    }

    #[test]
    fn projectors_are_orthogonal_and_complete(u in field()) {
        let n = u.n_max();
        let mut sum = SpectralField::zeros(n);
        for d in 0..=n {
            let p = project_pi_n(&u, d);
            prop_assert_eq!(project_pi_n(&p, d), p.clone());
            for e in (d + 1)..=n {
                prop_assert_eq!(p.inner(&project_pi_n(&u, e)), Complex64::new(0.0, 0.0));
            }
            sum = &sum + &p;
        }
        prop_assert!(sum.max_abs_diff(&u) == 0.0);
    }

    #[test]
    fn dyadic_blocks_partition_degrees(n in 0usize..200) {
        let owners: Vec<u64> = (0..9).map(|j| 1u64 << j).filter(|&l| DyadicBlock::new(l).unwrap().contains(n)).collect();
        prop_assert_eq!(owners.len(), 1);
        prop_assert_eq!(owners[0], DyadicBlock::containing(n).label());
    }

    #[test]
    fn littlewood_paley_pieces_sum_to_the_field(u in field()) {
        let mut sum = SpectralField::zeros(u.n_max());
        let mut label = 1;
        while DyadicBlock::new(label).unwrap().lo() <= u.n_max() {
            sum = &sum + &littlewood_paley(&u, label).unwrap();
            label *= 2;
        }
        prop_assert!(sum.max_abs_diff(&u) < 1e-15);
    }

    #[test]
    fn x_is_symmetric(u in field(), v in field()) {
        // ⟨x u, v⟩ = ⟨u, x v⟩ and ⟨∂u, v⟩ = −⟨u, ∂v⟩
        let n = u.n_max().max(v.n_max()) + 1;
        let (u, v) = (u.resized(n), v.resized(n));
        for axis in Axis::BOTH {
            let a = mul_x(&u, axis).inner(&v.resized(n + 1));
            let b = u.resized(n + 1).inner(&mul_x(&v, axis));
            prop_assert!((a - b).norm() < 1e-12);
            let c = d_dx(&u, axis).inner(&v.resized(n + 1));
            let d = u.resized(n + 1).inner(&d_dx(&v, axis));
            prop_assert!((c + d).norm() < 1e-12);
        }
    }
}

#[test]
fn derivative_matches_finite_differences_of_point_values() {
    let u = random_smooth(6, 6, 1.0, 1.0, 4);
    let h = 1e-4;
    for &(x, y) in &[(0.3, -0.2), (-1.1, 0.7), (1.5, 1.5)] {
        let fd = (u.eval_at(x + h, y) - u.eval_at(x - h, y)) / (2.0 * h);
        let exact = d_dx(&u, Axis::X1).eval_at(x, y);
        assert!((fd - exact).norm() < 1e-7, "({x},{y}): {fd} vs {exact}");
        let fd = (u.eval_at(x, y + h) - u.eval_at(x, y - h)) / (2.0 * h);
        assert!((fd - d_dx(&u, Axis::X2).eval_at(x, y)).norm() < 1e-7);
        assert!((mul_x(&u, Axis::X1).eval_at(x, y) - u.eval_at(x, y) * x).norm() < 1e-12);
    }
}

#[test]
fn one_dimensional_functions_match_the_closed_forms() {
    // ψ₀ = π^{-1/4} e^{-x²/2}, ψ₁ = √2 x ψ₀, ψ₂ = (2x² − 1)/√2 ψ₀
    for &x in &[-3.0, -0.5, 0.0, 0.8, 2.5] {
        let p = hermite_functions(x, 3);
        let g = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        assert!((p[0] - g).abs() < 1e-15);
        assert!((p[1] - 2f64.sqrt() * x * g).abs() < 1e-15);
        assert!((p[2] - (2.0 * x * x - 1.0) / 2f64.sqrt() * g).abs() < 1e-14);
    }
}
