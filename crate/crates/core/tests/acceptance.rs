//! Acceptance suite: one PASS/FAIL line per criterion with its tolerance.
//!
//! Lines are written straight to stdout so they appear even when the harness
//! captures test output. The test fails if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::time::Instant;

use fgrlab_core::dynamics::{
    mass, modulation_decompose, track_run, PeriodicGrid, ProfileModel, RunSpec, SplitStep, ModulationState,
    SPONGE_PEAK,
};
use fgrlab_core::fgr::{gamma_n, sweep_gamma};
use fgrlab_core::jost::{
    cubic, determinant, eigen_root_imaginary_axis, jost_f1, jost_f3, jost_f4, lambda_curve_jost, resonance_sweep,
    scattering_matrix,
};
use fgrlab_core::operators::{internal_mode, internal_mode_resolved, lambda_seed, threshold_p};
use fgrlab_core::p3_oracle::{
    alternating_series_check, b_constant, im_gamma1_assembly, im_gamma1_closed, laplace_cos_cosh, oracle_grid,
    sech_cos_integral,
};
use fgrlab_core::refined_profile::{build_refined_profile, profile_mode, residual_scaling, SCALING_AMPLITUDES};
use fgrlab_core::soliton::{phi, sech};
use fgrlab_core::{Grid, PowerParam};
use num_complex::Complex64 as C;

/// Argument of z used for the remainder-order fit.
const SLOPE_ANGLE: f64 = 0.3;

struct Ledger {
    lines: Vec<(usize, bool)>,
}

impl Ledger {
    fn report(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let mut out = std::io::stdout();
        writeln!(out, "[criterion {id:>2}] {tag} {name}: {detail}").unwrap();
        out.flush().unwrap();
        self.lines.push((id, pass));
    }

    fn note(&self, text: String) {
        let mut out = std::io::stdout();
        writeln!(out, "               note: {text}").unwrap();
        out.flush().unwrap();
    }
}

fn p(v: f64) -> PowerParam {
    PowerParam::new(v).unwrap()
}

fn sup_over(grid: Grid, a: &[C], b: impl Fn(f64) -> C, window: f64) -> f64 {
    (0..grid.len())
        .filter(|&j| grid.x(j).abs() <= window)
        .map(|j| (a[j] - b(grid.x(j))).norm())
        .fold(0.0, f64::max)
}

fn criterion_1(l: &mut Ledger) {
    let grid = Grid::new(30.0, 0.005).unwrap();
    let (mut worst, mut f13, mut f4_right, mut f4_scaled): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut f4_left = Vec::new();
    for k in [0.5, 1.0, SQRT_2, 2.0] {
        let k = C::new(k, 0.0);
        let f1 = jost_f1(p(3.0), k, grid).unwrap();
        let f3 = jost_f3(p(3.0), k, grid).unwrap();
        let f4 = jost_f4(p(3.0), k, grid).unwrap();
        let s = (2.0 + k.re * k.re).sqrt();
        let mut left: f64 = 0.0;
        for c in 0..2 {
            f13 = f13.max(sup_over(grid, &f1.m[c], |x| cubic::m1(x, k)[c], 10.0));
            f13 = f13.max(sup_over(grid, &f3.m[c], |x| cubic::m3(x, k)[c], 10.0));
            for j in (0..grid.len()).filter(|&j| grid.x(j).abs() <= 10.0) {
                let x = grid.x(j);
                let err = (f4.m[c][j] - cubic::m4(x, k)[c]).norm();
                if x >= 0.0 {
                    f4_right = f4_right.max(err);
                } else {
                    left = left.max(err);
                    // Error of f4 itself, relative to the growing solution at x.
                    f4_scaled = f4_scaled.max(err * (2.0 * s * x).exp());
                }
            }
        }
        f4_left.push(format!("k = {:.4}: {left:.1e}", k.re));
        worst = worst.max(f13).max(f4_right).max(left);
    }
    l.report(
        1,
        "cubic Jost f1, f3, f4 vs closed forms, k in {0.5, 1, sqrt2, 2}, |x| <= 10",
        worst <= 1e-6,
        format!(
            "sup error {worst:.3e} (tol 1e-6); f1 and f3 {f13:.3e}, f4 on x >= 0 {f4_right:.3e}, f4 on x < 0 [{}]",
            f4_left.join(", ")
        ),
    );
    l.note(format!(
        "m4 = exp(-sx) f4 on x < 0 amplifies the O(1e-10) round-off in the Wronskian coefficients c1, c2 (exactly 0 at p = 3) by exp(s|x|); \
         the same error measured against the growing solution, |m4 - exact| exp(2sx), is {f4_scaled:.3e}"
    ));
}

fn criterion_2(l: &mut Ledger) {
    let grid = Grid::new(30.0, 0.005).unwrap();
    let (mut rel, mut off): (f64, f64) = (0.0, 0.0);
    for k in [0.3, 1.0, 2.0] {
        let k = C::new(k, 0.0);
        let s = scattering_matrix(p(3.0), k, grid).unwrap();
        let want = cubic::det_d(k);
        rel = rel.max((s.det - want).norm() / want.norm());
        off = off.max(s.d[0][1].norm()).max(s.d[1][0].norm());
    }
    l.report(
        2,
        "det D(3,k) vs closed form at k in {0.3, 1, 2}; off-diagonals",
        rel <= 1e-6 && off <= 1e-8,
        format!("relative error {rel:.3e} (tol 1e-6), off-diagonal {off:.3e} (tol 1e-8)"),
    );
}

fn criterion_3(l: &mut Ledger) {
    let jgrid = Grid::new(30.0, 0.005).unwrap();
    let mut worst: f64 = 0.0;
    let mut lambda4 = 0.0;
    for pv in [3.5, 4.0, 4.5] {
        let mode = internal_mode_resolved(p(pv), 0.005, lambda_seed(pv)).unwrap();
        let beta0 = (1.0 - lambda_seed(pv)).sqrt();
        let bracket = (0.8 * beta0, (1.2 * beta0).min(0.999));
        let (_, lam_jost) = eigen_root_imaginary_axis(p(pv), jgrid, bracket).unwrap();
        worst = worst.max((mode.lambda - lam_jost).abs());
        if pv == 4.0 {
            lambda4 = mode.lambda;
        }
    }
    let bound = 3f64.sqrt() / 2.0;
    l.report(
        3,
        "grid eigenvalue vs Jost imaginary-axis root at p in {3.5, 4, 4.5}; lambda(4) > sqrt3/2",
        worst <= 1e-6 && lambda4 > bound,
        format!("max |difference| {worst:.3e} (tol 1e-6), lambda(4) = {lambda4:.10} > {bound:.10}"),
    );
}

fn criterion_4(l: &mut Ledger) -> [f64; 3] {
    let grid = Grid::default_grid();
    let thr: Vec<f64> = (2..=4).map(|n| threshold_p(n, grid).unwrap()).collect();
    let mut defect: f64 = 0.0;
    for (i, &pn) in thr.iter().enumerate() {
        let n = (i + 2) as f64;
        let lam = internal_mode(p(pn), grid, 1.0 / n).unwrap().lambda;
        defect = defect.max((lam - 1.0 / n).abs());
    }
    let ordered = 4.0 < thr[0] && thr[0] < thr[1] && thr[1] < thr[2] && thr[2] < 5.0;
    let ps: Vec<f64> = (0..50).map(|i| 3.1 + 1.8 * (i as f64 + 0.5) / 50.0).collect();
    // The Jost route needs no domain growth as lambda approaches 1 near p = 3.
    let curve: Vec<f64> = lambda_curve_jost(&ps, Grid::new(30.0, 0.01).unwrap())
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    let decreasing = curve.windows(2).all(|w| w[1] < w[0]);
    let min_drop = curve.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    l.report(
        4,
        "thresholds 4 < p2 < p3 < p4 < 5 with lambda(p_n) = 1/n; lambda decreasing on 50 points of (3.1, 4.9)",
        ordered && defect <= 1e-8 && decreasing,
        format!(
            "p2 = {:.12}, p3 = {:.12}, p4 = {:.12}, max |lambda - 1/n| {defect:.3e} (tol 1e-8), strictly decreasing: {decreasing} (smallest drop {min_drop:.3e})",
            thr[0], thr[1], thr[2]
        ),
    );
    [thr[0], thr[1], thr[2]]
}

fn criterion_5(l: &mut Ledger) {
    let a11 = sech_cos_integral(1.0, 1);
    let e_a11 = (a11 - PI * sech(0.5 * PI)).abs();
    let mut e_rec: f64 = 0.0;
    for a in [SQRT_2 - 1.0, SQRT_2 + 1.0] {
        e_rec = e_rec.max((sech_cos_integral(a, 3) - 0.5 * (1.0 + a * a) * sech_cos_integral(a, 1)).abs());
    }
    let lap = laplace_cos_cosh(1);
    let e_lap = (lap - 0.2).abs();
    let series = alternating_series_check(1000);
    let series_ok = series.accelerated > series.lower_bound && series.lower_bound > 0.0;
    l.report(
        5,
        "A(1,1) = pi sech(pi/2); A(a,3) recurrence; Laplace integral at n=1 equals 1/5; alternating series bound",
        e_a11 <= 1e-10 && e_rec <= 1e-10 && e_lap <= 1e-12 && series_ok,
        format!(
            "A(1,1) error {e_a11:.3e} (tol 1e-10), recurrence error {e_rec:.3e} (tol 1e-10), Laplace integral {lap:.15} vs 0.2 error {e_lap:.3e} (tol 1e-12), series {:.10} > bound {:.10}: {series_ok}",
            series.accelerated, series.lower_bound
        ),
    );
    l.note(format!(
        "the Laplace integral equals 2n^3/(4n^4+1); at n=1 that is 0.4, error {:.3e}",
        (lap - 0.4).abs()
    ));
}

fn criterion_6(l: &mut Ledger) {
    let closed = im_gamma1_closed();
    l.report(
        6,
        "closed-form Im Gamma1(3)/(8b) = -0.203 +- 0.002",
        (closed + 0.203).abs() <= 0.002,
        format!("value {closed:.10}, |error| {:.3e} (tol 2e-3)", (closed + 0.203).abs()),
    );
    let assembly = im_gamma1_assembly(oracle_grid());
    let b = b_constant();
    l.note(format!(
        "pairing assembled from the zeta and W components gives {:.3e} (terms {:.6} and {:.6}); b = {:.13}",
        assembly.value, assembly.first, assembly.second, b.b
    ));
}

fn criterion_7(l: &mut Ledger, thr: [f64; 3]) {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, pv) in [(3usize, 0.5 * (thr[0] + thr[1])), (4, 0.5 * (thr[1] + thr[2]))] {
        let mode = profile_mode(p(pv), 0.005, n).unwrap();
        let profile = build_refined_profile(&mode, n).unwrap();
        let (slope, _) = residual_scaling(&profile, &SCALING_AMPLITUDES, SLOPE_ANGLE);
        let (lo, hi) = if n == 3 { (3.6, 4.4) } else { (pv - 0.4, pv + 0.4) };
        pass &= slope >= lo && slope <= hi;
        parts.push(format!("n={n} at p={pv:.6}: slope {slope:.4} in [{lo:.3}, {hi:.3}]"));
    }
    l.report(7, "refined-profile remainder order", pass, parts.join("; "));
}

fn criterion_8(l: &mut Ledger, thr: [f64; 3]) {
    let window = (thr[0], thr[1]);
    let sweeps: Vec<_> = [1.0, 0.5, 2.0]
        .into_iter()
        .map(|c| sweep_gamma(3, 50, window, 0.005, c))
        .collect();
    let base = &sweeps[0];
    let points: Vec<_> = base.rows.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
    let completed = points.len() == 50;
    let worst_res = points.iter().map(|q| q.g_residual).fold(0.0, f64::max);
    let worst_kappa = points.iter().map(|q| q.kappa_defect()).fold(0.0, f64::max);
    let worst_proj = points.iter().map(|q| q.projection_defect()).fold(0.0, f64::max);
    let zeros = base.zero_locations();
    let invariant = sweeps[1..].iter().all(|s| s.zero_locations() == zeros);
    // gamma-relative projection check at three points away from the zeros, on a finer grid.
    let (a, b) = window;
    let mut rel: f64 = 0.0;
    for t in [0.1, 0.5, 0.9] {
        let mut pv = a + t * (b - a);
        if let Some(z) = zeros.iter().find(|z| (**z - pv).abs() < 0.01) {
            pv = z + 0.015;
        }
        let q = gamma_n(p(pv), 3, 0.0025).unwrap();
        rel = rel.max(q.projection_defect_vs_gamma());
    }
    let pass = completed && worst_res <= 1e-6 && worst_kappa <= 1e-10 && worst_proj <= 1e-6 && invariant;
    l.report(
        8,
        "50-point gamma_3 sweep: residuals, gamma = gamma_perp, zero set invariant under g -> 0.5 g, 2 g",
        pass,
        format!(
            "{} of 50 points, max g residual {worst_res:.3e} (tol 1e-6), max kappa defect {worst_kappa:.1e} (tol 1e-10), max |gamma - gamma_perp| / pairing scale {worst_proj:.3e} (tol 1e-6), zeros {zeros:?} identical across scales: {invariant}",
            points.len()
        ),
    );
    l.note(format!(
        "|gamma - gamma_perp| / |gamma| at three points with h = 0.0025: {rel:.3e} (tol 1e-6)"
    ));
}

fn criterion_9(l: &mut Ledger) {
    let grid = Grid::new(30.0, 0.01).unwrap();
    let rows = resonance_sweep(3.2, 4.9, 200, grid);
    let ok = rows.iter().filter(|r| r.det.is_ok()).count();
    let flagged = rows.iter().filter(|r| r.flag).count();
    let min_abs = rows
        .iter()
        .filter_map(|r| r.det.as_ref().ok())
        .map(|d| d.norm())
        .fold(f64::INFINITY, f64::min);
    let at3 = resonance_sweep(3.0, 3.0, 1, grid);
    let d0 = determinant(p(3.0), C::new(0.0, 0.0), grid).unwrap().norm();
    let (k1, k2) = (1e-3, 2e-3);
    let d1 = determinant(p(3.0), C::new(k1, 0.0), grid).unwrap();
    let d2 = determinant(p(3.0), C::new(k2, 0.0), grid).unwrap();
    let ratio = (d2 / d1).norm();
    let simple = (ratio - 2.0).abs() < 0.01 && (d1 / k1).norm() > 1e-3;
    l.report(
        9,
        "det D(p,0) on 200 points of [3.2, 4.9]; p=3 flagged as a simple root",
        ok == 200 && at3[0].flag && d0 < 1e-6 && simple,
        format!(
            "{ok} of 200 points evaluated, {flagged} flagged, min |det| {min_abs:.3e}; |det D(3,0)| = {d0:.3e}, flagged {}, |det(2k)/det(k)| = {ratio:.6} (simple root gives 2), |det'(0)| ~ {:.4}",
            at3[0].flag,
            (d1 / k1).norm()
        ),
    );
}

fn criterion_10(l: &mut Ledger) {
    // Exact soliton orbit at p = 3.
    let grid = PeriodicGrid::new(50.0, 2048).unwrap();
    let xs = grid.coordinates();
    let u0: Vec<C> = xs.iter().map(|&x| C::new(phi(3.0, x), 0.0)).collect();
    let dt = 2e-4;
    let mut stepper = SplitStep::new(p(3.0), grid, dt, None).unwrap();
    let mut u = u0.clone();
    for _ in 0..(10.0 / dt).round() as usize {
        stepper.step(&mut u).unwrap();
    }
    let rot = C::new(0.0, 10.0).exp();
    let diff: Vec<f64> = u.iter().zip(&u0).map(|(a, b)| (a - rot * b).norm_sqr()).collect();
    let orbit = grid.integrate(&diff).sqrt();

    // Mass drift and gauge covariance at p = 4.3.
    let pv = 4.3;
    let mode = internal_mode_resolved(p(pv), 0.01, lambda_seed(pv)).unwrap();
    let model = ProfileModel::first_order(&mode);
    let dgrid = PeriodicGrid::new(100.0, 4096).unwrap();
    let short = track_run(
        &model,
        dgrid,
        RunSpec { z0: C::new(0.05, 0.0), dt: 0.005, t_final: 20.0, output_every: 1.0, sponge: None },
    )
    .unwrap();
    let drift = short.mass_drift();
    let us = model.sample(&dgrid.coordinates(), 1.0, C::new(0.03, 0.01));
    let guess = ModulationState { z: C::new(0.03, 0.01), ..ModulationState::soliton() };
    let base = modulation_decompose(&model, dgrid, &us, guess).unwrap().state;
    let alpha = 1.1;
    let rotated: Vec<C> = us.iter().map(|v| C::new(0.0, alpha).exp() * v).collect();
    let moved = modulation_decompose(&model, dgrid, &rotated, guess).unwrap().state;
    let gauge = (moved.theta - base.theta - alpha)
        .abs()
        .max((moved.omega - base.omega).abs())
        .max((moved.z - base.z).norm());

    // Perturbed long run with sponge.
    let z0 = 0.05;
    let t0 = Instant::now();
    let long = track_run(
        &model,
        dgrid,
        RunSpec { z0: C::new(z0, 0.0), dt: 0.005, t_final: 400.0, output_every: 1.0, sponge: Some(SPONGE_PEAK) },
    )
    .unwrap();
    let z_final = long.rows.last().unwrap().state.z.norm();
    let omega_range = long.omega_range();
    let m0 = mass(dgrid, &model.sample(&dgrid.coordinates(), 1.0, C::new(z0, 0.0)));
    let relaxed = z_final < 0.7 * z0;
    let bounded = omega_range <= 0.1;
    l.report(
        10,
        "orbit error at t=10; mass drift without sponge; gauge covariance; p=4.3 relaxation |z(400)| < 0.7|z0| with bounded omega",
        orbit <= 1e-5 && drift <= 1e-10 && gauge <= 1e-8 && relaxed && bounded,
        format!(
            "orbit {orbit:.3e} (tol 1e-5, dt 2e-4), mass drift {drift:.3e} (tol 1e-10), gauge {gauge:.3e} (tol 1e-8), |z(400)| = {z_final:.5} vs 0.7|z0| = {:.3} ({}), omega range {omega_range:.4} (tol 0.1)",
            0.7 * z0,
            if relaxed { "met" } else { "not met" }
        ),
    );
    l.note(format!(
        "long run {:.0} s; mass {m0:.6} -> {:.6}; |z| at t = 100, 200, 300: {:.5}, {:.5}, {:.5}",
        t0.elapsed().as_secs_f64(),
        long.rows.last().unwrap().mass,
        long.rows[100].state.z.norm(),
        long.rows[200].state.z.norm(),
        long.rows[300].state.z.norm()
    ));
}

#[test]
fn acceptance() {
    let mut l = Ledger { lines: Vec::new() };
    let start = Instant::now();
    criterion_1(&mut l);
    criterion_2(&mut l);
    criterion_3(&mut l);
    let thr = criterion_4(&mut l);
    criterion_5(&mut l);
    criterion_6(&mut l);
    criterion_7(&mut l, thr);
    criterion_8(&mut l, thr);
    criterion_9(&mut l);
    criterion_10(&mut l);
    let failed: Vec<usize> = l.lines.iter().filter(|(_, ok)| !ok).map(|(id, _)| *id).collect();
    let mut out = std::io::stdout();
    writeln!(
        out,
        "acceptance: {} of {} criteria pass in {:.0} s; failing: {failed:?}",
        l.lines.len() - failed.len(),
        l.lines.len(),
        start.elapsed().as_secs_f64()
    )
    .unwrap();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
