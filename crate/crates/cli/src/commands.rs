//! Subcommand implementations. Each writes its artifacts through the
//! [`Recorder`] and logs anomalies there; errors abort the run.

use anyhow::{Context, Result};
use num_complex::Complex64 as C;

use fgrlab_core::dynamics::{track_run, PeriodicGrid, ProfileModel, RunSpec};
use fgrlab_core::fgr::{fgr_window, sweep_gamma};
use fgrlab_core::jost::{self, cubic, jost_f1_with, jost_f3, jost_f4, resonance_sweep, scattering_matrix, JostSolution};
use fgrlab_core::operators::{internal_mode, lambda_seed, threshold_p};
use fgrlab_core::p3_oracle::oracle_reports;
use fgrlab_core::refined_profile::{
    build_refined_profile, profile_mode, residual_scaling, RefinedProfileSet, SCALING_AMPLITUDES,
};
use fgrlab_core::{Grid, PowerParam};

use crate::config::RunConfig;
use crate::manifest::Recorder;
use crate::svg::line_chart;
use crate::{Command, UsageError};

/// Argument of z for the remainder-order fit.
pub const SLOPE_ANGLE: f64 = 0.3;

/// Window |x| <= this for closed-form Jost comparisons.
const VALIDATION_WINDOW: f64 = 10.0;

/// Largest eigenvector magnitude at the grid ends, relative to its peak.
const BOUNDARY_DECAY: f64 = 1e-6;

const SIGN_NOTE: &str = "eigenvector sign convention: xi_10(0) > 0";

/// Fixed 17-significant-digit formatting used in every CSV.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn grid(cfg: &RunConfig) -> Result<Grid> {
    Grid::new(cfg.grid_l, cfg.grid_h).map_err(|e| UsageError(e.to_string()).into())
}

fn power(p: f64) -> Result<PowerParam> {
    PowerParam::new(p).map_err(|e| UsageError(e.to_string()).into())
}

/// Runs the chosen subcommand.
pub fn dispatch(cmd: &Command, cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    match cmd {
        Command::Mode { .. } => mode(cfg, rec),
        Command::Thresholds => thresholds(cfg, rec),
        Command::Jost { validate_p3, .. } => jost_cmd(cfg, *validate_p3, rec),
        Command::ResonanceSweep { .. } => resonance(cfg, rec),
        Command::FgrSweep { .. } => fgr_sweep(cfg, rec),
        Command::P3Oracle => p3_oracle(rec),
        Command::Profile { .. } => profile(cfg, rec),
        Command::Simulate { .. } => simulate(cfg, rec),
    }
}

fn mode(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let p = power(cfg.p)?;
    let g = grid(cfg)?;
    let m = internal_mode(p, g, lambda_seed(cfg.p)).context("internal mode")?;
    let mut csv = String::from("x,xi10,xi01\n");
    for j in 0..g.len() {
        csv.push_str(&format!("{},{},{}\n", num(g.x(j)), num(m.xi10.values[j]), num(m.xi01.values[j])));
    }
    rec.write("mode.csv", &csv)?;
    let edge = m.xi10.values[0].abs().max(m.xi01.values[0].abs()) / m.xi10.sup_norm().max(m.xi01.sup_norm());
    if edge > BOUNDARY_DECAY {
        rec.anomaly(format!("eigenvector not decayed at the boundary (relative {edge:.3e}); enlarge --grid-L"));
    }
    rec.note(SIGN_NOTE);
    println!("p = {}", cfg.p);
    println!("lambda = {}", num(m.lambda));
    println!("residual = {:.3e}", m.residual_norm);
    println!("symplectic pairing = {}", num(m.pairing()));
    Ok(())
}

fn thresholds(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let g = grid(cfg)?;
    let mut csv = String::from("n,p_n,lambda_defect\n");
    let mut values = Vec::new();
    println!("{:>2}  {:>24}  {:>12}", "n", "p_n", "|lambda-1/n|");
    for n in 2..=4u32 {
        let pn = threshold_p(n, g).with_context(|| format!("threshold p_{n}"))?;
        let lam = internal_mode(PowerParam::new(pn)?, g, 1.0 / n as f64)?.lambda;
        let defect = (lam - 1.0 / n as f64).abs();
        println!("{n:>2}  {:>24}  {defect:>12.3e}", num(pn));
        csv.push_str(&format!("{n},{},{}\n", num(pn), num(defect)));
        if defect > 1e-8 {
            rec.anomaly(format!("|lambda(p_{n}) - 1/{n}| = {defect:.3e} exceeds 1e-8"));
        }
        values.push(pn);
    }
    if !(4.0 < values[0] && values[0] < values[1] && values[1] < values[2] && values[2] < 5.0) {
        rec.anomaly(format!("thresholds not ordered inside (4, 5): {values:?}"));
    }
    rec.write("thresholds.csv", &csv)?;
    Ok(())
}

fn jost_csv(sol: &JostSolution) -> String {
    let g = sol.grid;
    let mut csv = String::from("x,re_m1,im_m1,re_m2,im_m2\n");
    for j in 0..g.len() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            num(g.x(j)),
            num(sol.m[0][j].re),
            num(sol.m[0][j].im),
            num(sol.m[1][j].re),
            num(sol.m[1][j].im)
        ));
    }
    csv
}

fn closed_form_error(sol: &JostSolution, exact: impl Fn(f64) -> [C; 2]) -> f64 {
    let g = sol.grid;
    (0..g.len())
        .filter(|&j| g.x(j).abs() <= VALIDATION_WINDOW)
        .map(|j| {
            let e = exact(g.x(j));
            (sol.m[0][j] - e[0]).norm().max((sol.m[1][j] - e[1]).norm())
        })
        .fold(0.0, f64::max)
}

fn jost_cmd(cfg: &RunConfig, validate: bool, rec: &mut Recorder) -> Result<()> {
    if validate && cfg.p != 3.0 {
        return Err(UsageError("--validate-p3 requires --p 3".into()).into());
    }
    let p = power(cfg.p)?;
    let g = grid(cfg)?;
    let k = C::new(cfg.k_re, cfg.k_im);
    let f3 = jost_f3(p, k, g).context("f3")?;
    let f1 = jost_f1_with(&f3).context("f1")?;
    let f4 = if k.norm() >= jost::F4_MIN_K { jost_f4(p, k, g).ok() } else { None };
    rec.write("jost_f1.csv", &jost_csv(&f1))?;
    rec.write("jost_f3.csv", &jost_csv(&f3))?;
    if let Some(f4) = &f4 {
        rec.write("jost_f4.csv", &jost_csv(f4))?;
    } else {
        rec.note("f4 not built at this k (outside its strip or k = 0)");
    }
    rec.note("columns are the normalized profiles m with f = exp(r x) m");
    let sd = scattering_matrix(p, k, g).context("scattering matrix")?;
    println!("p = {}, k = {} + {}i", cfg.p, cfg.k_re, cfg.k_im);
    println!("det D = {} + {}i", num(sd.det.re), num(sd.det.im));
    println!("D x-variation = {:.3e}", sd.x_variation);
    if sd.x_variation > 1e-8 {
        rec.anomaly(format!("Wronskian matrix varies with x by {:.3e}", sd.x_variation));
    }
    if validate {
        let tol = cfg.closed_form_tolerance;
        let mut csv = String::from("quantity,error,tolerance,pass\n");
        let mut rows = vec![
            ("f1", closed_form_error(&f1, |x| cubic::m1(x, k))),
            ("f3", closed_form_error(&f3, |x| cubic::m3(x, k))),
        ];
        if let Some(f4) = &f4 {
            rows.push(("f4", closed_form_error(f4, |x| cubic::m4(x, k))));
        }
        let want = cubic::det_d(k);
        let det_err = (sd.det - want).norm() / want.norm().max(1e-300);
        rows.push(("det D (relative)", det_err));
        for (name, err) in rows {
            let pass = err <= tol;
            println!("{name:<18} error {err:.3e}  {}", if pass { "PASS" } else { "FAIL" });
            csv.push_str(&format!("{name},{},{},{}\n", num(err), num(tol), pass));
            if !pass {
                rec.anomaly(format!("{name} closed-form error {err:.3e} exceeds {tol:.1e}"));
            }
        }
        rec.write("jost_validation.csv", &csv)?;
    }
    Ok(())
}

fn resonance(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let g = grid(cfg)?;
    let rows = resonance_sweep(cfg.p_min, cfg.p_max, cfg.steps, g);
    let mut csv = String::from("p,re_det,im_det,abs_det,flag\n");
    for r in &rows {
        match &r.det {
            Ok(d) => csv.push_str(&format!("{},{},{},{},{}\n", num(r.p), num(d.re), num(d.im), num(d.norm()), r.flag as u8)),
            Err(e) => {
                csv.push_str(&format!("{},NaN,NaN,NaN,0\n", num(r.p)));
                rec.anomaly(format!("det D({}, 0) failed: {e}", r.p));
            }
        }
        if r.flag {
            rec.note(format!("p = {} flagged as a threshold-resonance candidate", r.p));
        }
    }
    rec.write("resonance_sweep.csv", &csv)?;
    let flagged = rows.iter().filter(|r| r.flag).count();
    println!("{} points on [{}, {}], {flagged} flagged", rows.len(), cfg.p_min, cfg.p_max);
    Ok(())
}

fn fgr_sweep(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    if !(3..=4).contains(&cfg.n) {
        return Err(UsageError(format!("n = {} must be 3 or 4", cfg.n)).into());
    }
    let window = fgr_window(cfg.n, grid(cfg)?).context("FGR window")?;
    let sweep = sweep_gamma(cfg.n, cfg.steps, window, cfg.grid_h, 1.0);
    rec.write("fgr_sweep.csv", &sweep.to_csv())?;
    let mut pts = Vec::new();
    for (p, row) in &sweep.rows {
        match row {
            Ok(q) => {
                pts.push((*p, q.gamma));
                if q.g_residual > cfg.residual_tolerance {
                    rec.anomaly(format!("g residual {:.3e} at p = {p}", q.g_residual));
                }
            }
            Err(e) => rec.anomaly(format!("p = {p}: {e}")),
        }
    }
    if let Some((_, Ok(q))) = sweep.rows.get(sweep.rows.len() / 2) {
        rec.note(format!(
            "wavenumber sqrt(n lambda - 1) = {:.6} used; sqrt(9 lambda^2 - 1) would give {:.6}",
            q.kappa, q.kappa_alt
        ));
    }
    rec.note(SIGN_NOTE);
    rec.note("g_n scaled to unit asymptotic amplitude of its first component");
    for z in &sweep.zeros {
        rec.note(format!(
            "sign change in ({}, {}) refined to p = {} (|gamma| = {:.3e}, genuine: {})",
            z.bracket.0, z.bracket.1, z.p, z.gamma_abs, z.genuine
        ));
    }
    if cfg.svg {
        let title = format!("gamma_{} over ({:.6}, {:.6})", cfg.n, window.0, window.1);
        rec.write("fgr_sweep.svg", &line_chart(&title, "p", "gamma", &pts))?;
    }
    println!(
        "n = {}, window ({}, {}), {} rows, zeros at {:?}",
        cfg.n,
        num(window.0),
        num(window.1),
        sweep.rows.len(),
        sweep.zero_locations()
    );
    Ok(())
}

fn p3_oracle(rec: &mut Recorder) -> Result<()> {
    let reports = oracle_reports();
    let mut csv = String::from("name,computed,reference,abs_error,rel_error,tolerance,pass\n");
    for r in &reports {
        println!(
            "{} {:<62} computed {:>22}  reference {:>22}  error {:.3e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            num(r.computed),
            num(r.reference),
            r.abs_error
        );
        csv.push_str(&format!(
            "\"{}\",{},{},{},{},{},{}\n",
            r.name.replace('"', "'"),
            num(r.computed),
            num(r.reference),
            num(r.abs_error),
            num(r.rel_error),
            num(r.tolerance),
            r.pass
        ));
        if !r.pass {
            rec.anomaly(format!("identity failed: {}", r.name));
        }
    }
    rec.write("p3_oracle.csv", &csv)?;
    Ok(())
}

fn profile_csv(prof: &RefinedProfileSet) -> String {
    let g = prof.grid();
    let mut header = vec!["x".to_string()];
    let mut cols: Vec<&[f64]> = Vec::new();
    for (m, f) in &prof.xi {
        header.push(format!("xi_{}_{}", m.0, m.1));
        cols.push(&f.values);
    }
    let n = prof.order;
    for m in [(n, 0), (0, n)] {
        header.push(format!("G_{}_{}", m.0, m.1));
        cols.push(&prof.sources[&m].values);
    }
    let mut csv = header.join(",") + "\n";
    for j in 0..g.len() {
        let mut row = vec![num(g.x(j))];
        row.extend(cols.iter().map(|c| num(c[j])));
        csv.push_str(&(row.join(",") + "\n"));
    }
    csv
}

fn profile(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    if !(3..=4).contains(&cfg.n) {
        return Err(UsageError(format!("n = {} must be 3 or 4", cfg.n)).into());
    }
    let p = power(cfg.p)?;
    let mode = profile_mode(p, cfg.grid_h, cfg.n).context("internal mode")?;
    let prof = build_refined_profile(&mode, cfg.n).context("refined profile")?;
    rec.write("profile.csv", &profile_csv(&prof))?;
    rec.note(format!("profile grid half-length {} chosen from the slowest decay", mode.grid().half_length()));
    rec.note("(2,1) coefficients in the gauge orthogonal to the kernel of H - lambda");
    rec.note(SIGN_NOTE);
    let (slope, norms) = residual_scaling(&prof, &SCALING_AMPLITUDES, SLOPE_ANGLE);
    let (lo, hi) = if cfg.n == 3 { (3.6, 4.4) } else { (cfg.p - 0.4, cfg.p + 0.4) };
    println!("p = {}, n = {}, lambda = {}", cfg.p, cfg.n, num(mode.lambda));
    println!("lambda_21 projection = {}, bordered = {}", num(prof.lambda21), num(prof.lambda21_bordered));
    for (m, r) in &prof.solve_residuals {
        println!("solve residual {:?}: {r:.3e}", m);
        if *r > cfg.solve_tolerance {
            rec.anomaly(format!("solve residual {r:.3e} for {:?}", m));
        }
    }
    let mut csv = String::from("abs_z,remainder_norm\n");
    for (a, r) in SCALING_AMPLITUDES.iter().zip(&norms) {
        println!("|z| = {a:<6} remainder {r:.6e}");
        csv.push_str(&format!("{},{}\n", num(*a), num(*r)));
    }
    rec.write("profile_scaling.csv", &csv)?;
    println!("log-log slope {slope:.4} (expected [{lo:.2}, {hi:.2}])");
    if !(lo..=hi).contains(&slope) {
        rec.anomaly(format!("remainder slope {slope:.4} outside [{lo:.2}, {hi:.2}]"));
    }
    Ok(())
}

/// Refined profile when p lies in an FGR window, first-order profile otherwise.
fn dynamics_model(cfg: &RunConfig, rec: &mut Recorder) -> Result<ProfileModel> {
    let p = power(cfg.p)?;
    let lam = internal_mode(p, grid(cfg)?, lambda_seed(cfg.p))?.lambda;
    let order = if 2.0 * lam < 1.0 && 3.0 * lam > 1.0 {
        Some(3)
    } else if 3.0 * lam < 1.0 && 4.0 * lam > 1.0 {
        Some(4)
    } else {
        None
    };
    match order {
        Some(n) => {
            let mode = profile_mode(p, cfg.grid_h, n)?;
            rec.note(format!("modulation profile: refined, order {n}"));
            Ok(ProfileModel::refined(&build_refined_profile(&mode, n)?))
        }
        None => {
            let mode = fgrlab_core::operators::internal_mode_resolved(p, cfg.grid_h.max(0.01), lam)?;
            rec.note(format!(
                "modulation profile: first order (lambda = {lam:.6} lies outside both FGR windows)"
            ));
            Ok(ProfileModel::first_order(&mode))
        }
    }
}

fn simulate(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let model = dynamics_model(cfg, rec)?;
    let pg = PeriodicGrid::new(cfg.dyn_half_length, cfg.dyn_points).map_err(|e| UsageError(e.to_string()))?;
    let spec = RunSpec {
        z0: C::new(cfg.z0, 0.0),
        dt: cfg.dt,
        t_final: cfg.t_final,
        output_every: cfg.output_every,
        sponge: cfg.sponge.then_some(cfg.sponge_peak),
    };
    let traj = track_run(&model, pg, spec).context("tracked run")?;
    rec.write("trajectory.csv", &traj.to_csv())?;
    let last = traj.rows.last().expect("at least one row").state;
    let (q, e) = (traj.mass_drift(), traj.energy_drift());
    println!("p = {}, |z0| = {}, T = {}, dt = {}", cfg.p, cfg.z0, cfg.t_final, cfg.dt);
    println!("|z(T)| = {:.6}, omega(T) = {:.6}, omega range {:.3e}", last.z.norm(), last.omega, traj.omega_range());
    println!("mass drift {q:.3e}, energy drift {e:.3e}");
    if !cfg.sponge {
        if q > 1e-6 {
            rec.anomaly(format!("mass drift {q:.3e} exceeds 1e-6"));
        }
        if e > 1e-5 {
            rec.anomaly(format!("energy drift {e:.3e} exceeds 1e-5; the splitting error scales as dt^2, reduce --dt"));
        }
    }
    if cfg.svg {
        let pts: Vec<(f64, f64)> = traj.rows.iter().map(|r| (r.state.t, r.state.z.norm())).collect();
        rec.write("trajectory.svg", &line_chart(&format!("|z(t)| at p = {}", cfg.p), "t", "|z|", &pts))?;
    }
    Ok(())
}
