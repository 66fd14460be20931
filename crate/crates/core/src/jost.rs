//! Jost solutions of H f = (k^2 + 1) f, their reflections, the Wronskian
//! matrix D(p, k) and the determinant searches built on it.
//!
//! Every solution is stored in normalized form f(x) = e^{r x} m(x) where r is
//! ik, -ik, -s or s with s = sqrt(2 + k^2). The Volterra equations are solved
//! by Picard iteration with the product-integration accumulators of
//! [`crate::volterra`].

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::soliton::{potential_at, potential_matrix, PowerParam};
use crate::volterra::{apply_backward, backward, forward_exponential, KernelTerm};
use num_complex::Complex64 as C;
use rayon::prelude::*;

/// Below this |k| the oscillatory kernels switch to their Taylor series.
pub const SMALL_K: f64 = 1e-4;
/// Below this |k| the Wronskian normalization of f4 is singular.
pub const F4_MIN_K: f64 = 1e-8;
/// Strip margin used for S1 and S4.
pub const STRIP_MARGIN: f64 = 0.05;
/// Picard stopping tolerance on the sup-norm of the correction, relative to
/// the sup-norm of the iterate when that exceeds one.
pub const PICARD_TOLERANCE: f64 = 1e-12;
/// Relative roundoff floor: an iteration that stops contracting below it is
/// accepted as converged.
pub const PICARD_FLOOR: f64 = 1e-10;
/// Picard iteration cap.
pub const PICARD_CAP: usize = 200;
/// Smallest admissible |f3 second component| in the f1 kernel.
pub const KERNEL_GUARD: f64 = 1e-10;
/// |det D(p, 0)| below this value flags a candidate threshold resonance.
pub const RESONANCE_FLAG: f64 = 1e-6;

const I: C = C::new(0.0, 1.0);

/// Which Jost solution a [`JostSolution`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    /// Oscillatory e^{ikx} e1 at +infinity.
    F1,
    /// Oscillatory e^{-ikx} e1 at +infinity.
    F2,
    /// Decaying e^{-sx} e2 at +infinity.
    F3,
    /// Growing e^{sx} e2 at +infinity.
    F4,
}

impl Species {
    /// Short lowercase label.
    pub fn label(self) -> &'static str {
        match self {
            Species::F1 => "f1",
            Species::F2 => "f2",
            Species::F3 => "f3",
            Species::F4 => "f4",
        }
    }
}

/// A Jost solution sampled on a grid in normalized form f = e^{rate x} m.
#[derive(Debug, Clone)]
pub struct JostSolution {
    /// Which solution.
    pub species: Species,
    /// Exponent p.
    pub p: f64,
    /// Wavenumber.
    pub k: C,
    /// Sampling grid.
    pub grid: Grid,
    /// Exponential rate r in f = e^{r x} m.
    pub rate: C,
    /// Normalized profile, two components.
    pub m: [Vec<C>; 2],
    /// x-derivative of the normalized profile.
    pub dm: [Vec<C>; 2],
    /// Picard iterations used.
    pub picard_steps: usize,
    /// Sup-norm of the last Picard correction.
    pub correction: f64,
}

impl JostSolution {
    /// f at node j.
    pub fn value(&self, j: usize) -> [C; 2] {
        let e = (self.rate * self.grid.x(j)).exp();
        [e * self.m[0][j], e * self.m[1][j]]
    }

    /// f' at node j.
    pub fn derivative(&self, j: usize) -> [C; 2] {
        let e = (self.rate * self.grid.x(j)).exp();
        [
            e * (self.dm[0][j] + self.rate * self.m[0][j]),
            e * (self.dm[1][j] + self.rate * self.m[1][j]),
        ]
    }

    /// Value and derivative at a grid point x.
    pub fn at(&self, x: f64) -> Result<([C; 2], [C; 2])> {
        if x.abs() > self.grid.half_length() {
            return Err(Error::Domain(format!("x = {x} outside the grid")));
        }
        let j = self.grid.index_of(x);
        Ok((self.value(j), self.derivative(j)))
    }

    /// Deviation of m at x_max from its asymptotic versor.
    pub fn normalization_defect(&self) -> f64 {
        let last = self.grid.len() - 1;
        let target = match self.species {
            Species::F1 | Species::F2 => [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            Species::F3 | Species::F4 => [C::new(0.0, 0.0), C::new(1.0, 0.0)],
        };
        (self.m[0][last] - target[0]).norm().max((self.m[1][last] - target[1]).norm())
    }
}

/// s = sqrt(2 + k^2) on the principal branch.
pub fn decay_rate(k: C) -> C {
    (C::new(2.0, 0.0) + k * k).sqrt()
}

fn check_strip(species: Species, k: C) -> Result<()> {
    let im = k.im;
    let ok = k.re.is_finite()
        && im.is_finite()
        && match species {
            Species::F3 => (-std::f64::consts::SQRT_2..=1.0).contains(&im),
            Species::F1 | Species::F2 => (-STRIP_MARGIN..=1.0 - STRIP_MARGIN).contains(&im),
            Species::F4 => im.abs() <= STRIP_MARGIN,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::Strip { re: k.re, im: k.im })
    }
}

fn sup_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup_abs(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn real(v: &[f64]) -> Vec<C> {
    v.iter().map(|&x| C::new(x, 0.0)).collect()
}

/// Terms of sin(kt)/k e^{-st} and of its t-derivative.
fn oscillatory_kernel(k: C, s: C) -> (Vec<KernelTerm>, Vec<KernelTerm>) {
    if k.norm() >= SMALL_K {
        let c = 1.0 / (2.0 * I * k);
        let (mp, mm) = (I * k - s, -I * k - s);
        (
            vec![KernelTerm::new(c, 0, mp), KernelTerm::new(-c, 0, mm)],
            vec![KernelTerm::new(c * mp, 0, mp), KernelTerm::new(-c * mm, 0, mm)],
        )
    } else {
        let k2 = k * k;
        let k4 = k2 * k2;
        let mu = -s;
        let t = |c: C, n| KernelTerm::new(c, n, mu);
        (
            vec![t(C::new(1.0, 0.0), 1), t(-k2 / 6.0, 3), t(k4 / 120.0, 5)],
            vec![
                t(C::new(1.0, 0.0), 0),
                t(-s, 1),
                t(-k2 / 2.0, 2),
                t(s * k2 / 6.0, 3),
                t(k4 / 24.0, 4),
                t(-s * k4 / 120.0, 5),
            ],
        )
    }
}

/// Decaying Jost solution f3 ~ e^{-sx} e2.
pub fn jost_f3(p: PowerParam, k: C, grid: Grid) -> Result<JostSolution> {
    check_strip(Species::F3, k)?;
    let h = grid.spacing();
    let n = grid.len();
    let v = potential_matrix(p, grid);
    let (v11, v12, v21, v22) = (real(&v.v11), real(&v.v12), real(&v.v21), real(&v.v22));
    let s = decay_rate(k);
    let (k11, dk11) = oscillatory_kernel(k, s);
    let k22 = [
        KernelTerm::new(1.0 / (2.0 * s), 0, -2.0 * s),
        KernelTerm::new(-1.0 / (2.0 * s), 0, C::new(0.0, 0.0)),
    ];
    let mut m = [vec![C::new(0.0, 0.0); n], vec![C::new(1.0, 0.0); n]];
    let mut steps = 0;
    let mut correction = f64::INFINITY;
    let (mut g1, mut g2) = (vec![C::default(); n], vec![C::default(); n]);
    while steps < PICARD_CAP {
        for j in 0..n {
            g1[j] = v11[j] * m[0][j] + v12[j] * m[1][j];
            g2[j] = v21[j] * m[0][j] + v22[j] * m[1][j];
        }
        let m1 = apply_backward(&k11, &g1, h);
        let m2: Vec<C> = apply_backward(&k22, &g2, h).into_iter().map(|z| z + 1.0).collect();
        let previous = correction;
        correction = sup_diff(&m1, &m[0]).max(sup_diff(&m2, &m[1]));
        let scale = sup_abs(&m1).max(sup_abs(&m2)).max(1.0);
        m = [m1, m2];
        steps += 1;
        let stalled = correction >= previous && correction < PICARD_FLOOR * scale;
        if correction < PICARD_TOLERANCE * scale || stalled {
            break;
        }
    }
    if correction >= PICARD_FLOOR * sup_abs(&m[0]).max(sup_abs(&m[1])).max(1.0) {
        return Err(Error::Convergence {
            iterations: steps,
            residual: correction,
        });
    }
    for j in 0..n {
        g1[j] = v11[j] * m[0][j] + v12[j] * m[1][j];
        g2[j] = v21[j] * m[0][j] + v22[j] * m[1][j];
    }
    let dm1: Vec<C> = apply_backward(&dk11, &g1, h).into_iter().map(|z| -z).collect();
    let dm2 = backward(&g2, h, -2.0 * s, 0).swap_remove(0);
    Ok(JostSolution {
        species: Species::F3,
        p: p.value(),
        k,
        grid,
        rate: -s,
        m,
        dm: [dm1, dm2],
        picard_steps: steps,
        correction,
    })
}

/// Oscillatory Jost solution f1 ~ e^{ikx} e1, built as v e1 + u f3.
///
/// The scalar unknown v = e^{ikx} m solves a Volterra equation whose kernel
/// involves f3; u is integrated from the left end of the grid so that every
/// accumulator has a decaying kernel.
pub fn jost_f1(p: PowerParam, k: C, grid: Grid) -> Result<JostSolution> {
    check_strip(Species::F1, k)?;
    let f3 = jost_f3(p, k, grid)?;
    jost_f1_with(&f3)
}

/// f1 from an already computed f3 at the same (p, k).
pub fn jost_f1_with(f3: &JostSolution) -> Result<JostSolution> {
    let (k, grid) = (f3.k, f3.grid);
    check_strip(Species::F1, k)?;
    let p = PowerParam::new(f3.p)?;
    let h = grid.spacing();
    let n = grid.len();
    let s = decay_rate(k);
    let v = potential_matrix(p, grid);
    let (alpha, beta) = (&f3.m[0], &f3.m[1]);
    let (dalpha, dbeta) = (&f3.dm[0], &f3.dm[1]);
    for j in 0..n {
        if beta[j].norm() < KERNEL_GUARD {
            return Err(Error::KernelSingularity {
                x: grid.x(j),
                value: beta[j].norm(),
            });
        }
    }
    let coef_m: Vec<C> = (0..n).map(|j| v.v11[j] + v.v21[j] * alpha[j] / beta[j]).collect();
    let coef_j: Vec<C> = (0..n)
        .map(|j| -2.0 * (dalpha[j] - alpha[j] * dbeta[j] / beta[j]) / (beta[j] * beta[j]))
        .collect();
    let source: Vec<C> = (0..n).map(|j| beta[j] * v.v21[j]).collect();
    let j_rate = I * k - s;
    let mut m = vec![C::new(1.0, 0.0); n];
    let mut steps = 0;
    let mut correction = f64::INFINITY;
    let mut fhat = vec![C::default(); n];
    while steps < PICARD_CAP {
        let dens: Vec<C> = (0..n).map(|j| source[j] * m[j]).collect();
        let jv = backward(&dens, h, j_rate, 0).swap_remove(0);
        for j in 0..n {
            fhat[j] = coef_m[j] * m[j] + coef_j[j] * jv[j];
        }
        // m' = -A with A the e^{2ikt} tail integral; m = 1 + integral of A.
        let a = backward(&fhat, h, 2.0 * I * k, 0).swap_remove(0);
        let next: Vec<C> = backward(&a, h, C::new(0.0, 0.0), 0)
            .swap_remove(0)
            .into_iter()
            .map(|z| z + 1.0)
            .collect();
        let previous = correction;
        correction = sup_diff(&next, &m);
        let scale = sup_abs(&next).max(1.0);
        m = next;
        steps += 1;
        let stalled = correction >= previous && correction < PICARD_FLOOR * scale;
        if correction < PICARD_TOLERANCE * scale || stalled {
            break;
        }
        if steps == PICARD_CAP {
            return Err(Error::Convergence {
                iterations: steps,
                residual: correction,
            });
        }
    }
    // Recompute the density with the converged m.
    let dens: Vec<C> = (0..n).map(|j| source[j] * m[j]).collect();
    let jv = backward(&dens, h, j_rate, 0).swap_remove(0);
    for j in 0..n {
        fhat[j] = coef_m[j] * m[j] + coef_j[j] * jv[j];
    }
    let dmv: Vec<C> = backward(&fhat, h, 2.0 * I * k, 0)
        .swap_remove(0)
        .into_iter()
        .map(|z| -z)
        .collect();
    let wsrc: Vec<C> = (0..n).map(|j| jv[j] / (beta[j] * beta[j])).collect();
    let w = forward_exponential(&wsrc, h, -(s + I * k));
    let mut m1 = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut dm1 = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for j in 0..n {
        let dw = wsrc[j] - (s + I * k) * w[j];
        m1[0].push(m[j] + alpha[j] * w[j]);
        m1[1].push(beta[j] * w[j]);
        dm1[0].push(dmv[j] + dalpha[j] * w[j] + alpha[j] * dw);
        dm1[1].push(dbeta[j] * w[j] + beta[j] * dw);
    }
    Ok(JostSolution {
        species: Species::F1,
        p: f3.p,
        k,
        grid,
        rate: I * k,
        m: m1,
        dm: dm1,
        picard_steps: steps,
        correction,
    })
}

fn conjugate_solution(sol: JostSolution, species: Species, k: C) -> JostSolution {
    let conj = |v: Vec<C>| v.into_iter().map(|z| z.conj()).collect::<Vec<_>>();
    let [m0, m1] = sol.m;
    let [d0, d1] = sol.dm;
    JostSolution {
        species,
        p: sol.p,
        k,
        grid: sol.grid,
        rate: sol.rate.conj(),
        m: [conj(m0), conj(m1)],
        dm: [conj(d0), conj(d1)],
        picard_steps: sol.picard_steps,
        correction: sol.correction,
    }
}

/// f2(x, k) = conj f1(x, conj k).
pub fn jost_f2(p: PowerParam, k: C, grid: Grid) -> Result<JostSolution> {
    check_strip(Species::F2, k)?;
    let f1 = jost_f1(p, k.conj(), grid)?;
    Ok(conjugate_solution(f1, Species::F2, k))
}

/// The reflected decaying solution normalized to e^{sx} e2 at +infinity.
///
/// It is f3(-x) divided by the limit of the second component of m3 at
/// -infinity, which is the solution of the mixed Volterra problem anchored at
/// the far left.
pub fn jost_f4_tilde(f3: &JostSolution) -> Result<JostSolution> {
    let n = f3.grid.len();
    let beta_inf = f3.m[1][0];
    if beta_inf.norm() < KERNEL_GUARD {
        return Err(Error::KernelSingularity {
            x: f3.grid.x(0),
            value: beta_inf.norm(),
        });
    }
    let refl = |v: &Vec<C>, sign: f64| (0..n).map(|j| sign * v[n - 1 - j] / beta_inf).collect::<Vec<_>>();
    Ok(JostSolution {
        species: Species::F4,
        p: f3.p,
        k: f3.k,
        grid: f3.grid,
        rate: -f3.rate,
        m: [refl(&f3.m[0], 1.0), refl(&f3.m[1], 1.0)],
        dm: [refl(&f3.dm[0], -1.0), refl(&f3.dm[1], -1.0)],
        picard_steps: f3.picard_steps,
        correction: f3.correction,
    })
}

/// Growing Jost solution f4 ~ e^{sx} e2 with W[f1, f4] = W[f2, f4] = 0.
pub fn jost_f4(p: PowerParam, k: C, grid: Grid) -> Result<JostSolution> {
    check_strip(Species::F4, k)?;
    if k.norm() < F4_MIN_K {
        return Err(Error::Domain(format!(
            "|k| = {} too small for the f4 normalization",
            k.norm()
        )));
    }
    let f3 = jost_f3(p, k, grid)?;
    let f1 = jost_f1_with(&f3)?;
    let f2 = jost_f2(p, k, grid)?;
    let f4t = jost_f4_tilde(&f3)?;
    let c0 = grid.center();
    let two_ik = 2.0 * I * k;
    let c2 = wronskian(&f1, &f4t, c0) / two_ik;
    let c1 = -wronskian(&f2, &f4t, c0) / two_ik;
    let s = decay_rate(k);
    let mut out = f4t;
    for j in 0..grid.len() {
        let x = grid.x(j);
        let e1 = ((I * k - s) * x).exp();
        let e2 = ((-I * k - s) * x).exp();
        for c in 0..2 {
            out.m[c][j] -= c1 * e1 * f1.m[c][j] + c2 * e2 * f2.m[c][j];
            out.dm[c][j] -= c1 * e1 * (f1.dm[c][j] + (I * k - s) * f1.m[c][j])
                + c2 * e2 * (f2.dm[c][j] + (-I * k - s) * f2.m[c][j]);
        }
    }
    Ok(out)
}

fn dot(a: [C; 2], b: [C; 2]) -> C {
    a[0] * b[0] + a[1] * b[1]
}

/// W[f, g] = f' . g - f . g' at node j (bilinear, no conjugation).
pub fn wronskian(f: &JostSolution, g: &JostSolution, j: usize) -> C {
    dot(f.derivative(j), g.value(j)) - dot(f.value(j), g.derivative(j))
}

/// W[f_a, g_b] at node j where g_b(x) = f_b(-x).
pub fn reflected_wronskian(fa: &JostSolution, fb: &JostSolution, j: usize) -> C {
    let r = fb.grid.len() - 1 - j;
    dot(fa.derivative(j), fb.value(r)) + dot(fa.value(j), fb.derivative(r))
}

/// Wronskian matrix and determinant at one (p, k).
#[derive(Debug, Clone)]
pub struct ScatteringData {
    /// Exponent p.
    pub p: f64,
    /// Wavenumber.
    pub k: C,
    /// D(p, k) = W[F1, G2] with F1 = (f1, f3) and G2 = (g1, g3).
    pub d: [[C; 2]; 2],
    /// det D.
    pub det: C,
    /// Entries W[f_i, g_j] at x = 0 for all available species.
    pub table: Vec<(Species, Species, C)>,
    /// Largest relative change of D between x = 0 and x = +-5.
    pub x_variation: f64,
}

/// D(p, k) assembled from f1 and f3 at node j.
pub fn d_matrix(f1: &JostSolution, f3: &JostSolution, j: usize) -> [[C; 2]; 2] {
    [
        [reflected_wronskian(f1, f1, j), reflected_wronskian(f1, f3, j)],
        [reflected_wronskian(f3, f1, j), reflected_wronskian(f3, f3, j)],
    ]
}

/// Determinant of a 2x2 complex matrix.
pub fn det2(d: &[[C; 2]; 2]) -> C {
    d[0][0] * d[1][1] - d[0][1] * d[1][0]
}

/// Only D and det D, without the Wronskian table.
pub fn determinant(p: PowerParam, k: C, grid: Grid) -> Result<C> {
    let f3 = jost_f3(p, k, grid)?;
    let f1 = jost_f1_with(&f3)?;
    Ok(det2(&d_matrix(&f1, &f3, grid.center())))
}

/// Full scattering data at (p, k).
pub fn scattering_matrix(p: PowerParam, k: C, grid: Grid) -> Result<ScatteringData> {
    let f3 = jost_f3(p, k, grid)?;
    let f1 = jost_f1_with(&f3)?;
    let c0 = grid.center();
    let d = d_matrix(&f1, &f3, c0);
    let scale = d.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut x_variation: f64 = 0.0;
    for x in [-5.0, 5.0] {
        let dx = d_matrix(&f1, &f3, grid.index_of(x));
        for a in 0..2 {
            for b in 0..2 {
                x_variation = x_variation.max((dx[a][b] - d[a][b]).norm() / scale);
            }
        }
    }
    let mut sols = vec![f1.clone(), f3.clone()];
    if check_strip(Species::F2, k).is_ok() {
        sols.push(jost_f2(p, k, grid)?);
    }
    if check_strip(Species::F4, k).is_ok() && k.norm() >= F4_MIN_K {
        sols.push(jost_f4(p, k, grid)?);
    }
    sols.sort_by_key(|s| s.species as u8);
    let mut table = Vec::new();
    for a in &sols {
        for b in &sols {
            table.push((a.species, b.species, reflected_wronskian(a, b, c0)));
        }
    }
    Ok(ScatteringData {
        p: p.value(),
        k,
        d,
        det: det2(&d),
        table,
        x_variation,
    })
}

/// One row of a threshold-resonance sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceRow {
    /// Exponent p.
    pub p: f64,
    /// det D(p, 0), or the error message.
    pub det: std::result::Result<C, String>,
    /// |det| below [`RESONANCE_FLAG`], or a sign change of Re det between this
    /// row and the previous one with both above that threshold.
    pub flag: bool,
}

/// Evaluates det D(p, 0) on `steps` equally spaced points of [p_min, p_max].
pub fn resonance_sweep(p_min: f64, p_max: f64, steps: usize, grid: Grid) -> Vec<ResonanceRow> {
    let ps: Vec<f64> = if steps <= 1 {
        vec![p_min]
    } else {
        (0..steps)
            .map(|i| p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let dets: Vec<std::result::Result<C, String>> = ps
        .par_iter()
        .map(|&p| {
            PowerParam::new(p)
                .and_then(|pp| determinant(pp, C::new(0.0, 0.0), grid))
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut rows: Vec<ResonanceRow> = Vec::with_capacity(ps.len());
    for (i, (p, det)) in ps.into_iter().zip(dets).enumerate() {
        let mut flag = matches!(&det, Ok(d) if d.norm() < RESONANCE_FLAG);
        if let (Ok(d), Some(prev)) = (&det, i.checked_sub(1).map(|q| &rows[q])) {
            // A row already flagged as near zero carries no reliable sign.
            if let Ok(dp) = &prev.det {
                if dp.norm() >= RESONANCE_FLAG && d.norm() >= RESONANCE_FLAG && dp.re.signum() != d.re.signum() {
                    flag = true;
                }
            }
        }
        rows.push(ResonanceRow { p, det, flag });
    }
    rows
}

/// Root k = i beta of det D(p, .) on the imaginary axis with beta in the
/// bracket; returns (beta, lambda = 1 - beta^2).
pub fn eigen_root_imaginary_axis(p: PowerParam, grid: Grid, bracket: (f64, f64)) -> Result<(f64, f64)> {
    let (mut a, mut b) = bracket;
    if !(a > 0.0 && b > a && b < 1.0) {
        return Err(Error::Domain(format!("bracket ({a}, {b}) not inside (0, 1)")));
    }
    let f = |beta: f64| determinant(p, C::new(0.0, beta), grid).map(|d| d.re);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc == 0.0 || (b - a).abs() < 1e-13 {
            return Ok((c, 1.0 - c * c));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < 1e-13 * b {
            break;
        }
    }
    let beta = 0.5 * (a + b);
    Ok((beta, 1.0 - beta * beta))
}

/// Number of geometric samples of beta used to bracket the eigenvalue root.
pub const ROOT_SCAN_POINTS: usize = 48;

/// Eigenvalue lambda = 1 - beta^2 from the imaginary-axis root of det D,
/// bracketed by scanning beta geometrically over [2e-4, 0.94]. Needs no
/// domain enlargement when lambda approaches 1, unlike the grid eigensolver.
pub fn eigenvalue_by_scan(p: PowerParam, grid: Grid) -> Result<f64> {
    let (lo, hi): (f64, f64) = (2e-4, 0.94);
    let betas: Vec<f64> = (0..ROOT_SCAN_POINTS)
        .map(|i| lo * (hi / lo).powf(i as f64 / (ROOT_SCAN_POINTS - 1) as f64))
        .collect();
    let mut prev: Option<(f64, f64)> = None;
    for &b in &betas {
        let v = determinant(p, C::new(0.0, b), grid)?.re;
        if let Some((a, va)) = prev {
            if va.signum() != v.signum() {
                return eigen_root_imaginary_axis(p, grid, (a, b)).map(|r| r.1);
            }
        }
        prev = Some((b, v));
    }
    Err(Error::Bracket { lo, hi })
}

/// [`eigenvalue_by_scan`] over many exponents in parallel, in input order.
pub fn lambda_curve_jost(ps: &[f64], grid: Grid) -> Vec<Result<f64>> {
    ps.par_iter()
        .map(|&p| PowerParam::new(p).and_then(|pp| eigenvalue_by_scan(pp, grid)))
        .collect()
}

/// Marches the f3 system leftward from x_max with RK4 in normalized variables,
/// returning m on the grid. Independent of the Volterra construction.
pub fn march_f3(p: PowerParam, k: C, grid: Grid) -> Vec<[C; 2]> {
    let pv = p.value();
    let s = decay_rate(k);
    let h = grid.spacing();
    let n = grid.len();
    // State (m1, m2, m1', m2').
    let rhs = |x: f64, y: [C; 4]| -> [C; 4] {
        let [a, b, c, d] = potential_at(pv, x);
        let vm1 = a * y[0] + b * y[1];
        let vm2 = c * y[0] + d * y[1];
        [
            y[2],
            y[3],
            2.0 * s * y[2] - (s * s + k * k) * y[0] + vm1,
            2.0 * s * y[3] - vm2,
        ]
    };
    let add = |y: [C; 4], d: [C; 4], t: f64| [y[0] + d[0] * t, y[1] + d[1] * t, y[2] + d[2] * t, y[3] + d[3] * t];
    let zero = C::new(0.0, 0.0);
    let mut y = [zero, C::new(1.0, 0.0), zero, zero];
    let mut out = vec![[zero, zero]; n];
    out[n - 1] = [y[0], y[1]];
    let dt = -h;
    for j in (0..n - 1).rev() {
        let x = grid.x(j + 1);
        let k1 = rhs(x, y);
        let k2 = rhs(x + dt / 2.0, add(y, k1, dt / 2.0));
        let k3 = rhs(x + dt / 2.0, add(y, k2, dt / 2.0));
        let k4 = rhs(x + dt, add(y, k3, dt));
        for c in 0..4 {
            y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        out[j] = [y[0], y[1]];
    }
    out
}

/// Closed forms of the normalized Jost profiles for the cubic equation.
pub mod cubic {
    use super::*;

    fn sech2(x: f64) -> f64 {
        let s = crate::soliton::sech(x);
        s * s
    }

    /// m1 = e^{-ikx} f1 at p = 3.
    pub fn m1(x: f64, k: C) -> [C; 2] {
        let c = 1.0 - k * k - 2.0 * I * k;
        let (t, q) = (x.tanh(), sech2(x));
        [(1.0 - k * k - 2.0 * I * k * t - q) / c, C::new(-q, 0.0) / c]
    }

    /// m3 = e^{sx} f3 at p = 3.
    pub fn m3(x: f64, k: C) -> [C; 2] {
        let s = decay_rate(k);
        let c = 3.0 + k * k + 2.0 * s;
        let (t, q) = (x.tanh(), sech2(x));
        [C::new(-q, 0.0) / c, (3.0 + k * k + 2.0 * s * t - q) / c]
    }

    /// m4 = e^{-sx} f4 at p = 3.
    pub fn m4(x: f64, k: C) -> [C; 2] {
        let s = decay_rate(k);
        let c = 3.0 + k * k - 2.0 * s;
        let (t, q) = (x.tanh(), sech2(x));
        [C::new(-q, 0.0) / c, (3.0 + k * k - 2.0 * s * t - q) / c]
    }

    /// det D(3, k).
    pub fn det_d(k: C) -> C {
        let s = decay_rate(k);
        -4.0 * I * k * (1.0 - k * k + 2.0 * I * k) / (1.0 - k * k - 2.0 * I * k) * s
            * (3.0 + k * k - 2.0 * s)
            / (3.0 + k * k + 2.0 * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(30.0, 0.01).unwrap()
    }

    #[test]
    fn strips_are_enforced() {
        let p = PowerParam::new(3.0).unwrap();
        assert!(matches!(jost_f3(p, C::new(1.0, 1.5), grid()), Err(Error::Strip { .. })));
        assert!(matches!(jost_f1(p, C::new(1.0, 0.97), grid()), Err(Error::Strip { .. })));
        assert!(jost_f4(p, C::new(0.0, 0.0), grid()).is_err());
    }

    #[test]
    fn cubic_f3_matches_closed_form() {
        let p = PowerParam::new(3.0).unwrap();
        let g = grid();
        let k = C::new(1.0, 0.0);
        let f3 = jost_f3(p, k, g).unwrap();
        for x in [-10.0, -2.0, 0.0, 3.0, 10.0] {
            let j = g.index_of(x);
            let want = cubic::m3(x, k);
            assert!((f3.m[0][j] - want[0]).norm() < 1e-7);
            assert!((f3.m[1][j] - want[1]).norm() < 1e-7);
        }
    }
}
