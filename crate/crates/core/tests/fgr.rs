//! Embedded generalized eigenfunctions and the FGR constants.

use fgrlab_core::fgr::{asymptotic_amplitude, embedded_solution, fgr_window, gamma_from_profile, gamma_n, sweep_gamma};
use fgrlab_core::refined_profile::{build_refined_profile, profile_mode};
use fgrlab_core::{Grid, PowerParam};

fn p(v: f64) -> PowerParam {
    PowerParam::new(v).unwrap()
}

#[test]
fn embedded_solution_is_bounded_with_unit_amplitude() {
    let kappa = 0.6;
    let sol = embedded_solution(p(4.3), kappa, Grid::new(40.0, 0.005).unwrap()).unwrap();
    assert!(sol.residual < 1e-6);
    let g = sol.g.grid();
    let amp = asymptotic_amplitude(g, &sol.g.first.values, kappa, 20.0, 38.0);
    assert!((amp - 1.0).abs() < 1e-6, "amplitude {amp}");
    assert!(sol.g.first.even_defect() < 1e-12);
    assert!(sol.g.second.values[g.index_of(30.0)].abs() < 1e-8);
}

#[test]
fn third_order_constant_near_the_lower_threshold() {
    let q = gamma_n(p(4.8404554204165491), 3, 0.005).unwrap();
    // Frozen from a verified run on this grid.
    assert!((q.gamma - 0.48092198048017565).abs() < 1e-8 * q.pairing_scale, "{}", q.gamma);
    assert!(q.g_residual < 1e-6);
    assert!(q.kappa_defect() < 1e-10);
    assert!(q.projection_defect() < 1e-6);
    assert!(q.projection_defect_vs_gamma() < 1e-5);
    // Refining the grid moves gamma only slightly.
    let fine = gamma_n(p(4.8404554204165491), 3, 0.0025).unwrap();
    assert!((fine.gamma - q.gamma).abs() < 1e-3 * q.gamma.abs());
}

#[test]
fn gamma_is_linear_in_the_normalization_of_g() {
    let mode = profile_mode(p(4.9), 0.01, 3).unwrap();
    let prof = build_refined_profile(&mode, 3).unwrap();
    let one = gamma_from_profile(&prof, 1.0).unwrap();
    let two = gamma_from_profile(&prof, 2.0).unwrap();
    assert!((two.gamma - 2.0 * one.gamma).abs() < 1e-12 * one.pairing_scale.max(1.0));
    assert!((two.pairing_scale - 2.0 * one.pairing_scale).abs() < 1e-12 * one.pairing_scale);
}

#[test]
fn third_order_constant_changes_sign_once_in_a_short_sweep() {
    let window = fgr_window(3, Grid::default_grid()).unwrap();
    let sweep = sweep_gamma(3, 4, window, 0.005, 1.0);
    assert_eq!(sweep.rows.len(), 4);
    assert!(sweep.rows.iter().all(|(_, r)| r.is_ok()));
    let zeros = sweep.zero_locations();
    assert_eq!(zeros.len(), 1);
    let z = zeros[0];
    assert!((4.88..4.92).contains(&z), "zero at {z}");
    let before = gamma_n(p(z - 0.003), 3, 0.005).unwrap().gamma;
    let after = gamma_n(p(z + 0.003), 3, 0.005).unwrap().gamma;
    assert!(before > 0.0 && after < 0.0);
    assert!(sweep.to_csv().lines().count() == 5);
}

#[test]
fn fourth_order_point_is_well_resolved() {
    let q = gamma_n(p(4.945), 4, 0.01).unwrap();
    assert!(q.g_residual < 1e-6);
    assert!(q.kappa_defect() < 1e-10);
    assert!(q.projection_defect() < 1e-6);
    assert!(q.gamma.is_finite() && q.pairing_scale > 0.0);
}
