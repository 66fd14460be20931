//! Property-based invariants.

use fgrlab_core::banded::BandedMatrix;
use fgrlab_core::dynamics::{evolve, mass, PeriodicGrid, SplitStep};
use fgrlab_core::jost::{jost_f1, jost_f2};
use fgrlab_core::quadrature::simpson;
use fgrlab_core::soliton::phi;
use fgrlab_core::{Grid, PowerParam, RealField, Spinor};
use num_complex::Complex64 as C;
use proptest::prelude::*;

/// Dense Gaussian elimination with partial pivoting, the reference solver.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        b.swap(c, piv);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                a[i][k] -= f * a[c][k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn banded_lu_matches_dense_elimination(
        n in 5usize..40,
        lower in 1usize..4,
        upper in 1usize..4,
        seed in proptest::collection::vec(-1.0f64..1.0, 40 * 9 + 40),
    ) {
        let mut m = BandedMatrix::<f64>::zeros(n, lower, upper);
        let mut dense = vec![vec![0.0; n]; n];
        let mut it = seed.iter().cycle();
        for i in 0..n {
            for j in i.saturating_sub(lower)..(i + upper + 1).min(n) {
                let v = *it.next().unwrap() + if i == j { 0.5 } else { 0.0 };
                m.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| seed[seed.len() - 1 - i]).collect();
        let Ok(lu) = m.factor() else { return Ok(()) };
        let x = lu.solve(&b);
        let want = dense_solve(dense, b);
        let scale = want.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        for (a, w) in x.iter().zip(&want) {
            prop_assert!((a - w).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics(
        c in proptest::collection::vec(-3.0f64..3.0, 4),
        n in 4usize..60,
    ) {
        let f = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let h = 2.0 / (n - 1) as f64;
        let v: Vec<f64> = (0..n).map(|j| f(-1.0 + j as f64 * h)).collect();
        let exact = 2.0 * c[0] + 2.0 / 3.0 * c[2];
        prop_assert!((simpson(&v, h) - exact).abs() < 1e-12);
    }

    #[test]
    fn power_parameter_domain(p in -10.0f64..10.0) {
        prop_assert_eq!(PowerParam::new(p).is_ok(), p > 1.0 && p < 5.0);
    }

    #[test]
    fn spinor_interleaving_round_trips(a in proptest::collection::vec(-1.0f64..1.0, 21), b in proptest::collection::vec(-1.0f64..1.0, 21)) {
        let grid = Grid::new(1.0, 0.1).unwrap();
        let s = Spinor::new(RealField::new(grid, a).unwrap(), RealField::new(grid, b).unwrap()).unwrap();
        let back = Spinor::from_interleaved(grid, &s.interleaved()).unwrap();
        prop_assert_eq!(back.first.values, s.first.values);
        prop_assert_eq!(back.second.values, s.second.values);
    }

    #[test]
    fn soliton_is_even_positive_and_decaying(p in 1.2f64..4.99, x in 0.0f64..20.0) {
        let v = phi(p, x);
        prop_assert!(v > 0.0);
        prop_assert!((v - phi(p, -x)).abs() <= 1e-15 * v.max(1e-300));
        prop_assert!(phi(p, x + 0.5) < v || v == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn split_step_conserves_mass_and_commutes_with_phase(p in 2.0f64..4.9, amp in 0.5f64..1.5, alpha in -3.2f64..3.2) {
        let grid = PeriodicGrid::new(30.0, 256).unwrap();
        let u0: Vec<C> = grid.coordinates().iter().map(|&x| C::new(amp * phi(p, x), 0.1 * x * phi(p, x))).collect();
        let mut stepper = SplitStep::new(PowerParam::new(p).unwrap(), grid, 0.01, None).unwrap();
        let u = evolve(&mut stepper, &u0, 50).unwrap();
        let q0 = mass(grid, &u0);
        prop_assert!(((mass(grid, &u) - q0) / q0).abs() < 1e-12);
        let rot = C::new(0.0, alpha).exp();
        let rotated: Vec<C> = u0.iter().map(|v| rot * v).collect();
        let ur = evolve(&mut stepper, &rotated, 50).unwrap();
        for (a, b) in ur.iter().zip(&u) {
            prop_assert!((a - rot * b).norm() < 1e-12);
        }
    }

    #[test]
    fn f2_conjugates_f1_for_real_k(p in 3.0f64..4.9, k in 0.2f64..2.0) {
        let grid = Grid::new(20.0, 0.01).unwrap();
        let pp = PowerParam::new(p).unwrap();
        let (f1, f2) = (jost_f1(pp, C::new(k, 0.0), grid).unwrap(), jost_f2(pp, C::new(k, 0.0), grid).unwrap());
        for j in (0..grid.len()).step_by(37) {
            let (a, b) = (f1.value(j), f2.value(j));
            prop_assert!((a[0].conj() - b[0]).norm() < 1e-12 && (a[1].conj() - b[1]).norm() < 1e-12);
        }
    }
}
