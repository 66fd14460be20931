//! Split-step evolution of i u_t + u_xx + |u|^{p-1} u = 0 on a periodic box,
//! with an optional absorbing sponge, and modulation decomposition
//! u = e^{i theta} (phi[omega, z] + eta).

use crate::error::{Error, Result};
use crate::grid::{derivative, interpolate, RealField};
use crate::operators::InternalMode;
use crate::refined_profile::{Coefficients, MultiIndex, RefinedProfileSet};
use crate::soliton::{phi, phi_prime, PowerParam};
use num_complex::Complex64 as C;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Fraction of |x| / L beyond which the sponge acts.
pub const SPONGE_START: f64 = 0.8;
/// Default peak absorption rate per unit time. Weaker sponges let radiation
/// wrap around the periodic box and re-excite the internal mode.
pub const SPONGE_PEAK: f64 = 1.0;
/// Residual tolerance of the modulation equations.
pub const MODULATION_TOLERANCE: f64 = 1e-8;
/// Half-width of the window on which the modulation pairings are evaluated.
pub const MODULATION_WINDOW: f64 = 40.0;

/// Uniform periodic grid x_j = -L + 2 L j / n, j = 0..n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    half_length: f64,
    points: usize,
}

impl PeriodicGrid {
    /// Builds a grid; `points` must be even and at least 16.
    pub fn new(half_length: f64, points: usize) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) || points < 16 || points % 2 == 1 {
            return Err(Error::Domain(format!("invalid periodic grid L = {half_length}, n = {points}")));
        }
        Ok(Self { half_length, points })
    }

    /// Half-length L.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points
    }

    /// Always false for a valid grid.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing 2L / n.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points as f64
    }

    /// Coordinate of node j.
    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    /// All node coordinates.
    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points as i64;
        let base = std::f64::consts::PI / self.half_length;
        (0..n).map(|j| base * if j <= n / 2 { j } else { j - n } as f64).collect()
    }

    /// Integral of a sampled periodic function (trapezoid, spectrally accurate).
    pub fn integrate(&self, v: &[f64]) -> f64 {
        v.iter().sum::<f64>() * self.spacing()
    }
}

/// Reusable FFT plans and propagator for one grid and time step.
pub struct SplitStep {
    grid: PeriodicGrid,
    p: f64,
    dt: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    half_linear: Vec<C>,
    mask: Option<Vec<f64>>,
    scratch: Vec<C>,
}

impl SplitStep {
    /// Prepares a Strang splitting with step `dt`; `sponge` gives the peak
    /// absorption rate per unit time, or None for no sponge.
    pub fn new(p: PowerParam, grid: PeriodicGrid, dt: f64, sponge: Option<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step {dt} must be positive")));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.len());
        let inverse = planner.plan_fft_inverse(grid.len());
        let scratch = vec![C::new(0.0, 0.0); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
        let n = grid.len() as f64;
        let half_linear = grid
            .wavenumbers()
            .iter()
            .map(|k| C::new(0.0, -k * k * 0.5 * dt).exp() / n.sqrt())
            .collect();
        let mask = sponge.map(|peak| sponge_mask(grid, peak, dt));
        Ok(Self {
            grid,
            p: p.value(),
            dt,
            forward,
            inverse,
            half_linear,
            mask,
            scratch,
        })
    }

    /// Time step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Grid.
    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    fn linear_half(&mut self, u: &mut [C]) {
        self.forward.process_with_scratch(u, &mut self.scratch);
        for (v, m) in u.iter_mut().zip(&self.half_linear) {
            *v *= m;
        }
        self.inverse.process_with_scratch(u, &mut self.scratch);
        let n = (self.grid.len() as f64).sqrt();
        for v in u.iter_mut() {
            *v /= n;
        }
    }

    /// Advances `u` by one step: half linear, full nonlinear, half linear, then
    /// the sponge.
    pub fn step(&mut self, u: &mut [C]) -> Result<()> {
        let before = sup(u);
        self.linear_half(u);
        let q = self.p - 1.0;
        for v in u.iter_mut() {
            let a = v.norm_sqr().powf(0.5 * q);
            *v *= C::new(0.0, a * self.dt).exp();
        }
        self.linear_half(u);
        if let Some(mask) = &self.mask {
            for (v, m) in u.iter_mut().zip(mask) {
                *v *= m;
            }
        }
        let after = sup(u);
        if !after.is_finite() || after > 2.0 * before.max(1e-300) {
            return Err(Error::Instability(after));
        }
        Ok(())
    }
}

fn sup(u: &[C]) -> f64 {
    u.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Per-step multiplier exp(-rate(x) dt) with rate rising smoothly from 0 at
/// |x| = 0.8 L to `peak` at |x| = L.
pub fn sponge_mask(grid: PeriodicGrid, peak: f64, dt: f64) -> Vec<f64> {
    let l = grid.half_length();
    grid.coordinates()
        .iter()
        .map(|&x| {
            let s = ((x.abs() / l - SPONGE_START) / (1.0 - SPONGE_START)).clamp(0.0, 1.0);
            let bump = s * s * (3.0 - 2.0 * s);
            (-peak * bump * dt).exp()
        })
        .collect()
}

/// Evolves `u0` for `steps` steps, returning the final field.
pub fn evolve(stepper: &mut SplitStep, u0: &[C], steps: usize) -> Result<Vec<C>> {
    let mut u = u0.to_vec();
    for _ in 0..steps {
        stepper.step(&mut u)?;
    }
    Ok(u)
}

/// Free Schrödinger evolution exp(i t d^2) u0 by one spectral propagation.
pub fn free_evolution(grid: PeriodicGrid, u0: &[C], t: f64) -> Vec<C> {
    let mut planner = FftPlanner::new();
    let mut u = u0.to_vec();
    planner.plan_fft_forward(grid.len()).process(&mut u);
    for (v, k) in u.iter_mut().zip(grid.wavenumbers()) {
        *v *= C::new(0.0, -k * k * t).exp();
    }
    planner.plan_fft_inverse(grid.len()).process(&mut u);
    let n = grid.len() as f64;
    u.iter().map(|v| v / n).collect()
}

/// Mass Q = 1/2 integral of |u|^2.
pub fn mass(grid: PeriodicGrid, u: &[C]) -> f64 {
    0.5 * grid.integrate(&u.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
}

/// Energy E = 1/2 integral of |u'|^2 - integral of |u|^{p+1} / (p + 1), with a
/// spectral derivative.
pub fn energy(p: f64, grid: PeriodicGrid, u: &[C]) -> f64 {
    let mut planner = FftPlanner::new();
    let mut d = u.to_vec();
    planner.plan_fft_forward(grid.len()).process(&mut d);
    for (v, k) in d.iter_mut().zip(grid.wavenumbers()) {
        *v *= C::new(0.0, k);
    }
    planner.plan_fft_inverse(grid.len()).process(&mut d);
    let n = grid.len() as f64;
    let dens: Vec<f64> = u
        .iter()
        .zip(&d)
        .map(|(v, dv)| 0.5 * (dv / n).norm_sqr() - v.norm().powf(p + 1.0) / (p + 1.0))
        .collect();
    grid.integrate(&dens)
}

/// Modulation coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationState {
    /// Time.
    pub t: f64,
    /// Phase theta, reduced to (-pi, pi].
    pub theta: f64,
    /// Frequency omega.
    pub omega: f64,
    /// Internal-mode amplitude z.
    pub z: C,
}

impl ModulationState {
    /// The unperturbed soliton state.
    pub fn soliton() -> Self {
        Self {
            t: 0.0,
            theta: 0.0,
            omega: 1.0,
            z: C::new(0.0, 0.0),
        }
    }
}

/// Profile phi[z] = phi + sum_m z^{m1} conj(z)^{m2} xi_m with its x-derivative,
/// sampled on the profile grid and evaluated anywhere by cubic interpolation.
#[derive(Debug, Clone)]
pub struct ProfileModel {
    /// Exponent p.
    pub p: f64,
    terms: Vec<(MultiIndex, RealField, RealField)>,
}

impl ProfileModel {
    /// The first-order profile phi + z xi10 + conj(z) xi01.
    pub fn first_order(mode: &InternalMode) -> Self {
        let mut xi = Coefficients::new();
        xi.insert((1, 0), mode.xi10.clone());
        xi.insert((0, 1), mode.xi01.clone());
        Self::from_coefficients(mode.p, &xi)
    }

    /// The full refined profile.
    pub fn refined(profile: &RefinedProfileSet) -> Self {
        Self::from_coefficients(profile.p, &profile.xi)
    }

    fn from_coefficients(p: f64, xi: &Coefficients) -> Self {
        let terms = xi
            .iter()
            .map(|(&m, f)| {
                let d = derivative(&f.values, f.grid.spacing());
                (m, f.clone(), RealField { grid: f.grid, values: d })
            })
            .collect();
        Self { p, terms }
    }

    /// (phi[z](y), d/dy phi[z](y), d/dz1 phi[z](y), d/dz2 phi[z](y)).
    fn eval(&self, y: f64, z: C) -> [C; 4] {
        let mut val = C::new(phi(self.p, y), 0.0);
        let mut dval = C::new(phi_prime(self.p, y), 0.0);
        let mut dz1 = C::new(0.0, 0.0);
        let mut dz2 = C::new(0.0, 0.0);
        let zc = z.conj();
        let i = C::new(0.0, 1.0);
        for ((a, b), f, df) in &self.terms {
            let (a, b) = (*a as i32, *b as i32);
            let fv = interpolate(f, y);
            let dfv = interpolate(df, y);
            let mono = z.powi(a) * zc.powi(b);
            val += mono * fv;
            dval += mono * dfv;
            let da = if a > 0 { a as f64 * z.powi(a - 1) * zc.powi(b) } else { C::new(0.0, 0.0) };
            let db = if b > 0 { b as f64 * z.powi(a) * zc.powi(b - 1) } else { C::new(0.0, 0.0) };
            dz1 += (da + db) * fv;
            dz2 += i * (da - db) * fv;
        }
        [val, dval, dz1, dz2]
    }

    /// phi[omega, z] and its derivatives in omega, z1, z2 at the points xs.
    pub fn tangent(&self, xs: &[f64], omega: f64, z: C) -> [Vec<C>; 4] {
        let a = 1.0 / (self.p - 1.0);
        let scale = omega.powf(a);
        let root = omega.sqrt();
        let mut out: [Vec<C>; 4] = Default::default();
        for &x in xs {
            let [v, dv, d1, d2] = self.eval(root * x, z);
            out[0].push(scale * v);
            out[1].push(a * scale / omega * v + scale * dv * (0.5 * x / root));
            out[2].push(scale * d1);
            out[3].push(scale * d2);
        }
        out
    }

    /// phi[omega, z] on the given points.
    pub fn sample(&self, xs: &[f64], omega: f64, z: C) -> Vec<C> {
        let a = 1.0 / (self.p - 1.0);
        let scale = omega.powf(a);
        xs.iter().map(|&x| scale * self.eval(omega.sqrt() * x, z)[0]).collect()
    }
}

/// Real pairing Re integral of a conj(b) on a uniform grid.
fn pair(a: &[C], b: &[C], h: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>() * h
}

/// Result of a decomposition.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Modulation coordinates.
    pub state: ModulationState,
    /// eta on the decomposition window.
    pub eta: Vec<C>,
    /// Window coordinates.
    pub xs: Vec<f64>,
    /// Largest absolute orthogonality residual.
    pub residual: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

fn window(grid: PeriodicGrid) -> (usize, usize) {
    let lo = grid
        .coordinates()
        .iter()
        .position(|&x| x >= -MODULATION_WINDOW)
        .unwrap_or(0);
    let hi = grid
        .coordinates()
        .iter()
        .rposition(|&x| x <= MODULATION_WINDOW)
        .unwrap_or(grid.len() - 1);
    (lo, hi + 1)
}

fn conditions(model: &ProfileModel, xs: &[f64], u: &[C], h: f64, s: [f64; 4]) -> ([f64; 4], Vec<C>) {
    let [theta, omega, z1, z2] = s;
    let z = C::new(z1, z2);
    let [val, dw, d1, d2] = model.tangent(xs, omega, z);
    let rot = C::new(0.0, -theta).exp();
    let eta: Vec<C> = u.iter().zip(&val).map(|(v, f)| rot * v - f).collect();
    let i = C::new(0.0, 1.0);
    let ival: Vec<C> = val.iter().map(|v| i * v).collect();
    (
        [pair(&eta, &ival, h), pair(&eta, &dw, h), pair(&eta, &d1, h), pair(&eta, &d2, h)],
        eta,
    )
}

fn solve4(a: [[f64; 4]; 4], b: [f64; 4]) -> Option<[f64; 4]> {
    let mut m = a;
    let mut r = b;
    for c in 0..4 {
        let piv = (c..4).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, piv);
        r.swap(c, piv);
        for i in c + 1..4 {
            let f = m[i][c] / m[c][c];
            for k in c..4 {
                m[i][k] -= f * m[c][k];
            }
            r[i] -= f * r[c];
        }
    }
    let mut x = [0.0; 4];
    for c in (0..4).rev() {
        let s: f64 = (c + 1..4).map(|k| m[c][k] * x[k]).sum();
        x[c] = (r[c] - s) / m[c][c];
    }
    Some(x)
}

fn wrap_phase(t: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = t.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Newton solve of the four orthogonality conditions
/// <eta, i phi> = <eta, d_omega phi> = <eta, d_z1 phi> = <eta, d_z2 phi> = 0
/// with finite-difference Jacobians, starting from `guess`.
pub fn modulation_decompose(
    model: &ProfileModel,
    grid: PeriodicGrid,
    u: &[C],
    guess: ModulationState,
) -> Result<Decomposition> {
    let (lo, hi) = window(grid);
    let xs: Vec<f64> = (lo..hi).map(|j| grid.x(j)).collect();
    let uw = &u[lo..hi];
    let h = grid.spacing();
    let mut s = [guess.theta, guess.omega, guess.z.re, guess.z.im];
    // Align the phase first: theta += arg <e^{-i theta} u, phi[omega, z]>.
    let prof = model.sample(&xs, s[1], C::new(s[2], s[3]));
    let rot = C::new(0.0, -s[0]).exp();
    let overlap: C = uw.iter().zip(&prof).map(|(v, f)| rot * v * f.conj()).sum();
    s[0] += overlap.arg();
    let steps = [1e-7, 1e-7, 1e-7, 1e-7];
    let norm = |f: &[f64; 4]| f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for it in 0..40 {
        let (f, eta) = conditions(model, &xs, uw, h, s);
        let res = norm(&f);
        if res <= MODULATION_TOLERANCE {
            return Ok(Decomposition {
                state: ModulationState {
                    t: guess.t,
                    theta: wrap_phase(s[0]),
                    omega: s[1],
                    z: C::new(s[2], s[3]),
                },
                eta,
                xs,
                residual: res,
                iterations: it,
            });
        }
        let mut jac = [[0.0; 4]; 4];
        for c in 0..4 {
            let mut sp = s;
            let mut sm = s;
            sp[c] += steps[c];
            sm[c] -= steps[c];
            let (fp, _) = conditions(model, &xs, uw, h, sp);
            let (fm, _) = conditions(model, &xs, uw, h, sm);
            for r in 0..4 {
                jac[r][c] = (fp[r] - fm[r]) / (2.0 * steps[c]);
            }
        }
        let delta = solve4(jac, f).ok_or_else(|| Error::OutOfTube("singular modulation Jacobian".into()))?;
        // Backtrack until the residual decreases.
        let mut damping = 1.0;
        let mut trial = s;
        for _ in 0..12 {
            for c in 0..4 {
                trial[c] = s[c] - damping * delta[c];
            }
            if trial[1] > 0.0 && norm(&conditions(model, &xs, uw, h, trial).0) < res {
                break;
            }
            damping *= 0.5;
        }
        s = trial;
        if !(s[1] > 0.0) || s.iter().any(|v| !v.is_finite()) || C::new(s[2], s[3]).norm() > 1.0 {
            return Err(Error::OutOfTube(format!("Newton left the neighborhood at iteration {it}")));
        }
    }
    Err(Error::OutOfTube("Newton did not reach the residual tolerance".into()))
}

/// Removes from `eta` its components that violate the orthogonality
/// conditions at (omega, z), by subtracting a combination of the four tangent
/// vectors. Used to build test inputs.
pub fn orthogonalize(model: &ProfileModel, xs: &[f64], h: f64, eta: &[C], omega: f64, z: C) -> Vec<C> {
    let [val, dw, d1, d2] = model.tangent(xs, omega, z);
    let i = C::new(0.0, 1.0);
    let dirs = [val.iter().map(|v| i * v).collect::<Vec<C>>(), dw, d1, d2];
    let mut gram = [[0.0; 4]; 4];
    let mut rhs = [0.0; 4];
    for r in 0..4 {
        for c in 0..4 {
            gram[r][c] = pair(&dirs[c], &dirs[r], h);
        }
        rhs[r] = pair(eta, &dirs[r], h);
    }
    let coef = solve4(gram, rhs).unwrap_or([0.0; 4]);
    (0..eta.len())
        .map(|j| eta[j] - (0..4).map(|c| coef[c] * dirs[c][j]).sum::<C>())
        .collect()
}

/// One row of a tracked run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    /// Modulation coordinates at this time.
    pub state: ModulationState,
    /// Weighted norm of eta with weight e^{-<x>}.
    pub eta_weighted: f64,
    /// Orthogonality residual of the decomposition.
    pub residual: f64,
    /// Mass.
    pub mass: f64,
    /// Energy.
    pub energy: f64,
}

/// Time series of a tracked run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Exponent p.
    pub p: f64,
    /// Rows in time order.
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    /// Largest relative mass drift from the first row.
    pub fn mass_drift(&self) -> f64 {
        let q0 = self.rows[0].mass;
        self.rows.iter().map(|r| (r.mass - q0).abs() / q0).fold(0.0, f64::max)
    }

    /// Largest relative energy drift from the first row.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.rows[0].energy;
        self.rows.iter().map(|r| (r.energy - e0).abs() / e0.abs()).fold(0.0, f64::max)
    }

    /// max omega - min omega.
    pub fn omega_range(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.state.omega), b.max(r.state.omega)));
        hi - lo
    }

    /// CSV with columns t, theta, omega, Re z, Im z, |z|, eta_weighted_norm, Q, E.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,theta,omega,re_z,im_z,abs_z,eta_weighted_norm,Q,E\n");
        for r in &self.rows {
            let s = r.state;
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.t,
                s.theta,
                s.omega,
                s.z.re,
                s.z.im,
                s.z.norm(),
                r.eta_weighted,
                r.mass,
                r.energy
            ));
        }
        out
    }
}

/// Parameters of a tracked run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    /// Initial internal-mode amplitude.
    pub z0: C,
    /// Time step.
    pub dt: f64,
    /// Final time.
    pub t_final: f64,
    /// Time between decompositions.
    pub output_every: f64,
    /// Peak sponge absorption per unit time, or None.
    pub sponge: Option<f64>,
}

/// Evolves u0 = phi[1, z0] and decomposes at the output cadence.
pub fn track_run(model: &ProfileModel, grid: PeriodicGrid, spec: RunSpec) -> Result<Trajectory> {
    let p = PowerParam::new(model.p)?;
    let xs = grid.coordinates();
    let mut u = model.sample(&xs, 1.0, spec.z0);
    let mut stepper = SplitStep::new(p, grid, spec.dt, spec.sponge)?;
    let per_output = (spec.output_every / spec.dt).round().max(1.0) as usize;
    let outputs = (spec.t_final / (per_output as f64 * spec.dt)).round() as usize;
    let weight: Vec<f64> = xs.iter().map(|x| (-2.0 * (1.0 + x * x).sqrt()).exp()).collect();
    let mut state = ModulationState {
        z: spec.z0,
        ..ModulationState::soliton()
    };
    let mut rows = Vec::with_capacity(outputs + 1);
    let mut theta_unwrapped = 0.0;
    for k in 0..=outputs {
        if k > 0 {
            for _ in 0..per_output {
                stepper.step(&mut u)?;
            }
        }
        let t = k as f64 * per_output as f64 * spec.dt;
        // Warm start with the phase advanced by the current frequency.
        let guess = ModulationState {
            t,
            theta: if k == 0 { 0.0 } else { theta_unwrapped + state.omega * per_output as f64 * spec.dt },
            ..state
        };
        let dec = modulation_decompose(model, grid, &u, guess)?;
        theta_unwrapped = guess.theta + wrap_phase(dec.state.theta - guess.theta);
        state = dec.state;
        let (lo, _) = window(grid);
        let eta_weighted = dec
            .eta
            .iter()
            .enumerate()
            .map(|(j, e)| e.norm_sqr() * weight[lo + j])
            .sum::<f64>()
            .sqrt()
            * grid.spacing().sqrt();
        rows.push(TrajectoryRow {
            state,
            eta_weighted,
            residual: dec.residual,
            mass: mass(grid, &u),
            energy: energy(model.p, grid, &u),
        });
    }
    Ok(Trajectory { p: model.p, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers_are_symmetric() {
        let g = PeriodicGrid::new(std::f64::consts::PI, 8 * 2).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[1], 1.0);
        assert_eq!(k[15], -1.0);
        assert_eq!(k[8], 8.0);
    }

    #[test]
    fn sponge_is_identity_in_the_interior() {
        let g = PeriodicGrid::new(10.0, 64).unwrap();
        let m = sponge_mask(g, 0.005, 0.1);
        assert_eq!(m[32], 1.0);
        assert!(m[0] < 1.0);
    }

    #[test]
    fn phase_wrapping() {
        assert!((wrap_phase(7.0) - (7.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert_eq!(wrap_phase(-0.5), -0.5);
    }
}
