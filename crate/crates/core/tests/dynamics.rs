//! Split-step evolution, conservation, modulation decomposition and tracking.

use fgrlab_core::dynamics::{
    evolve, free_evolution, mass, modulation_decompose, track_run, ModulationState, PeriodicGrid, ProfileModel,
    RunSpec, SplitStep, SPONGE_PEAK,
};
use fgrlab_core::operators::{internal_mode_resolved, lambda_seed};
use fgrlab_core::soliton::phi;
use fgrlab_core::PowerParam;
use num_complex::Complex64 as C;

fn p(v: f64) -> PowerParam {
    PowerParam::new(v).unwrap()
}

fn l2_distance(grid: PeriodicGrid, a: &[C], b: &[C]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).collect();
    grid.integrate(&d).sqrt()
}

fn soliton(pv: f64, grid: PeriodicGrid) -> Vec<C> {
    grid.coordinates().iter().map(|&x| C::new(phi(pv, x), 0.0)).collect()
}

fn orbit_error(dt: f64, t: f64) -> f64 {
    let grid = PeriodicGrid::new(50.0, 2048).unwrap();
    let u0 = soliton(3.0, grid);
    let mut stepper = SplitStep::new(p(3.0), grid, dt, None).unwrap();
    let u = evolve(&mut stepper, &u0, (t / dt).round() as usize).unwrap();
    let rot = C::new(0.0, t).exp();
    let exact: Vec<C> = u0.iter().map(|v| rot * v).collect();
    l2_distance(grid, &u, &exact)
}

fn model(pv: f64) -> ProfileModel {
    ProfileModel::first_order(&internal_mode_resolved(p(pv), 0.01, lambda_seed(pv)).unwrap())
}

#[test]
fn soliton_stays_on_its_orbit() {
    assert!(orbit_error(1e-3, 10.0) < 1e-4);
    assert!(orbit_error(2e-4, 10.0) < 1e-5);
}

#[test]
fn strang_splitting_is_second_order() {
    let coarse = orbit_error(4e-3, 5.0);
    let fine = orbit_error(2e-3, 5.0);
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn small_data_follow_the_free_flow() {
    let grid = PeriodicGrid::new(40.0, 1024).unwrap();
    let u0: Vec<C> = grid
        .coordinates()
        .iter()
        .map(|&x| C::new(1e-4 * (-x * x / 4.0).exp(), 1e-4 * x * (-x * x / 4.0).exp()))
        .collect();
    let t = 2.0;
    let mut stepper = SplitStep::new(p(4.3), grid, 0.01, None).unwrap();
    let u = evolve(&mut stepper, &u0, 200).unwrap();
    let free = free_evolution(grid, &u0, t);
    let scale = grid.integrate(&u0.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()).sqrt();
    assert!(l2_distance(grid, &u, &free) / scale < 1e-9);
}

#[test]
fn mass_is_conserved_without_sponge() {
    let grid = PeriodicGrid::new(40.0, 1024).unwrap();
    let u0: Vec<C> = soliton(4.3, grid).iter().map(|v| 1.05 * v).collect();
    let q0 = mass(grid, &u0);
    let mut stepper = SplitStep::new(p(4.3), grid, 0.005, None).unwrap();
    let u = evolve(&mut stepper, &u0, 2000).unwrap();
    assert!(((mass(grid, &u) - q0) / q0).abs() < 1e-11);
}

#[test]
fn evolution_commutes_with_phase_rotation() {
    let grid = PeriodicGrid::new(30.0, 512).unwrap();
    let u0: Vec<C> = soliton(4.0, grid).iter().map(|v| 1.1 * v).collect();
    let mut stepper = SplitStep::new(p(4.0), grid, 0.01, None).unwrap();
    let base = evolve(&mut stepper, &u0, 100).unwrap();
    for i in 0..10 {
        let rot = C::new(0.0, 0.6 * i as f64 - 2.7).exp();
        let rotated: Vec<C> = u0.iter().map(|v| rot * v).collect();
        let out = evolve(&mut stepper, &rotated, 100).unwrap();
        let expected: Vec<C> = base.iter().map(|v| rot * v).collect();
        assert!(l2_distance(grid, &out, &expected) < 1e-12);
    }
}

#[test]
fn sponge_only_removes_mass() {
    let grid = PeriodicGrid::new(40.0, 1024).unwrap();
    // A wide pulse sheds radiation into the absorbing layer.
    let mut u: Vec<C> = grid.coordinates().iter().map(|&x| C::new(1.5 * phi(4.3, 0.7 * x), 0.0)).collect();
    let mut stepper = SplitStep::new(p(4.3), grid, 0.005, Some(SPONGE_PEAK)).unwrap();
    let mut last = mass(grid, &u);
    for _ in 0..60 {
        for _ in 0..50 {
            stepper.step(&mut u).unwrap();
        }
        let q = mass(grid, &u);
        assert!(q <= last * (1.0 + 1e-13), "{q} > {last}");
        last = q;
    }
    assert!(last < mass(grid, &grid.coordinates().iter().map(|&x| C::new(1.5 * phi(4.3, 0.7 * x), 0.0)).collect::<Vec<_>>()));
}

#[test]
fn decomposition_recovers_constructed_coordinates() {
    let m = model(4.3);
    let grid = PeriodicGrid::new(40.0, 2048).unwrap();
    let xs = grid.coordinates();
    for (theta, omega, z) in [(0.4, 1.0, C::new(0.02, -0.01)), (-1.3, 1.03, C::new(0.0, 0.03)), (2.0, 0.97, C::new(0.01, 0.0))] {
        let rot = C::new(0.0, theta).exp();
        let u: Vec<C> = m.sample(&xs, omega, z).iter().map(|v| rot * v).collect();
        let d = modulation_decompose(&m, grid, &u, ModulationState::soliton()).unwrap();
        assert!((d.state.theta - theta).abs() < 1e-6);
        assert!((d.state.omega - omega).abs() < 1e-6);
        assert!((d.state.z - z).norm() < 1e-6);
        assert!(d.residual < 1e-7, "residual {}", d.residual);
    }
}

#[test]
fn unperturbed_soliton_keeps_zero_amplitude() {
    let m = model(4.3);
    // The splitting perturbs the stationary state at O(dt^2), so dt is small.
    let spec = RunSpec { z0: C::new(0.0, 0.0), dt: 2.5e-4, t_final: 10.0, output_every: 1.0, sponge: None };
    let traj = track_run(&m, PeriodicGrid::new(60.0, 2048).unwrap(), spec).unwrap();
    assert_eq!(traj.rows.len(), 11);
    let worst = traj.rows.iter().map(|r| r.state.z.norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "max |z| {worst}");
    assert!(traj.omega_range() < 1e-5);
}

#[test]
fn tracked_run_keeps_its_ledgers() {
    let m = model(4.3);
    let spec = RunSpec { z0: C::new(0.05, 0.0), dt: 0.002, t_final: 10.0, output_every: 0.5, sponge: None };
    let traj = track_run(&m, PeriodicGrid::new(60.0, 2048).unwrap(), spec).unwrap();
    assert!(traj.mass_drift() < 1e-6);
    assert!(traj.energy_drift() < 1e-5);
    // The internal mode oscillates with frequency close to lambda.
    let z = traj.rows.last().unwrap().state.z.norm();
    assert!((0.035..0.065).contains(&z), "|z| = {z}");
    assert!(traj.to_csv().lines().count() == traj.rows.len() + 1);
}
