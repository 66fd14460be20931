//! Bounded generalized eigenfunctions g_n of H at the embedded energy n lambda
//! and the Fermi Golden Rule constant gamma_n = <G_n, g_n>.

use crate::error::{Error, Result};
use crate::grid::{Grid, RealField, Spinor};
use crate::jost::{d_matrix, det2, jost_f1_with, jost_f3};
use crate::operators::{threshold_p, InternalMode};
use crate::quadrature::dot;
use crate::refined_profile::{build_refined_profile, profile_mode, RefinedProfileSet};
use crate::soliton::{potential_at, sech, PowerParam};
use num_complex::Complex64 as C;
use rayon::prelude::*;

/// |det D(p, kappa)| below this value flags an embedded eigenvalue.
pub const EMBEDDED_FLAG: f64 = 1e-10;
/// Margin kept from the window ends in sweeps.
pub const WINDOW_MARGIN: f64 = 0.01;
/// Weight exponent of the residual norm of g_n.
pub const RESIDUAL_WEIGHT: f64 = 0.1;
/// Bound on the weighted relative residual of g_n.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// A refined sign change is genuine when |gamma| falls below this fraction of
/// the pairing scale, i.e. gamma passes through zero at the quadrature level.
pub const ZERO_TOLERANCE: f64 = 1e-6;

/// Even bounded solution of H g = (kappa^2 + 1) g.
#[derive(Debug, Clone)]
pub struct EmbeddedSolution {
    /// The solution, first component with unit asymptotic amplitude.
    pub g: Spinor,
    /// Wavenumber of the oscillatory tail.
    pub kappa: f64,
    /// |det D(p, kappa)|.
    pub det_d: f64,
    /// Weighted relative residual of (H - kappa^2 - 1) g.
    pub residual: f64,
    /// max |g| on the grid over max |g| on [-10, 10].
    pub growth: f64,
}

/// Least-squares amplitude of a cos(kx) + b sin(kx) fitted to v on the nodes
/// with x in [x0, x1].
pub fn asymptotic_amplitude(grid: Grid, v: &[f64], kappa: f64, x0: f64, x1: f64) -> f64 {
    let (mut scc, mut sss, mut scs, mut sc, mut ss) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (j, &y) in v.iter().enumerate() {
        let x = grid.x(j);
        if x < x0 || x > x1 {
            continue;
        }
        let (c, s) = ((kappa * x).cos(), (kappa * x).sin());
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sc += c * y;
        ss += s * y;
    }
    let det = scc * sss - scs * scs;
    let a = (sc * sss - ss * scs) / det;
    let b = (ss * scc - sc * scs) / det;
    a.hypot(b)
}

/// Weighted relative residual of (H - e) g on interior nodes, using the same
/// fourth-order stencil as the banded operators.
pub fn weighted_residual(p: f64, g: &Spinor, energy: f64, weight: f64) -> f64 {
    let grid = g.grid();
    let h = grid.spacing();
    let n = grid.len();
    let (a, b) = (&g.first.values, &g.second.values);
    let lap = |v: &[f64], j: usize| {
        (-(v[j - 2] + v[j + 2]) / 12.0 + 4.0 / 3.0 * (v[j - 1] + v[j + 1]) - 2.5 * v[j]) / (h * h)
    };
    let mut num = vec![0.0; n];
    let mut den = vec![0.0; n];
    for j in 2..n - 2 {
        let x = grid.x(j);
        let [v11, v12, v21, v22] = potential_at(p, x);
        let r1 = -lap(a, j) + a[j] + v11 * a[j] + v12 * b[j] - energy * a[j];
        let r2 = lap(b, j) - b[j] + v21 * a[j] + v22 * b[j] - energy * b[j];
        let w = sech(weight * x).powi(2);
        num[j] = w * (r1 * r1 + r2 * r2);
        den[j] = w * (a[j] * a[j] + b[j] * b[j]);
    }
    (crate::quadrature::simpson(&num, h) / crate::quadrature::simpson(&den, h)).sqrt()
}

/// Even bounded solution at energy kappa^2 + 1 built from Jost data:
/// on x >= 0 it is a Re f1 + b Im f1 + c f3 with g'(0) = 0, extended evenly.
pub fn embedded_solution(p: PowerParam, kappa: f64, grid: Grid) -> Result<EmbeddedSolution> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("kappa = {kappa} must be positive")));
    }
    let k = C::new(kappa, 0.0);
    let f3 = jost_f3(p, k, grid)?;
    let f1 = jost_f1_with(&f3)?;
    let c0 = grid.center();
    let det_d = det2(&d_matrix(&f1, &f3, c0)).norm();
    if det_d < EMBEDDED_FLAG {
        return Err(Error::EmbeddedEigenvalue(kappa * kappa + 1.0));
    }
    let d1 = f1.derivative(c0);
    let d3 = f3.derivative(c0);
    // Rows: first and second components of g'(0); columns: Re f1, Im f1, f3.
    let rows = [[d1[0].re, d1[0].im, d3[0].re], [d1[1].re, d1[1].im, d3[1].re]];
    let null = [
        rows[0][1] * rows[1][2] - rows[0][2] * rows[1][1],
        rows[0][2] * rows[1][0] - rows[0][0] * rows[1][2],
        rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
    ];
    let n = grid.len();
    let mut first = vec![0.0; n];
    let mut second = vec![0.0; n];
    for j in c0..n {
        let v1 = f1.value(j);
        let v3 = f3.value(j);
        for (c, out) in [&mut first, &mut second].into_iter().enumerate() {
            out[j] = null[0] * v1[c].re + null[1] * v1[c].im + null[2] * v3[c].re;
        }
    }
    for j in 0..c0 {
        first[j] = first[n - 1 - j];
        second[j] = second[n - 1 - j];
    }
    let big_l = grid.half_length();
    let amp = asymptotic_amplitude(grid, &first, kappa, big_l - 15.0, big_l - 5.0);
    let sign = if first[c0] < 0.0 { -1.0 } else { 1.0 };
    let scale = sign / amp;
    first.iter_mut().for_each(|v| *v *= scale);
    second.iter_mut().for_each(|v| *v *= scale);
    let g = Spinor::new(RealField::new(grid, first)?, RealField::new(grid, second)?)?;
    let residual = weighted_residual(p.value(), &g, kappa * kappa + 1.0, RESIDUAL_WEIGHT);
    let sup = |lo: usize, hi: usize| {
        (lo..hi)
            .map(|j| g.first.values[j].abs().max(g.second.values[j].abs()))
            .fold(0.0, f64::max)
    };
    let growth = sup(0, n) / sup(grid.index_of(-10.0), grid.index_of(10.0) + 1);
    Ok(EmbeddedSolution {
        g,
        kappa,
        det_d,
        residual,
        growth,
    })
}

/// g_n for the mode at energy n lambda, kappa = sqrt(n lambda - 1).
pub fn embedded_solution_gn(mode: &InternalMode, n: usize) -> Result<EmbeddedSolution> {
    let energy = n as f64 * mode.lambda;
    if energy <= 1.0 {
        return Err(Error::Domain(format!("n lambda = {energy} is not above the threshold")));
    }
    embedded_solution(PowerParam::new(mode.p)?, (energy - 1.0).sqrt(), mode.grid())
}

/// FGR constant and diagnostics at one p.
#[derive(Debug, Clone, PartialEq)]
pub struct FgrPoint {
    /// Exponent p.
    pub p: f64,
    /// Order n.
    pub n: usize,
    /// Internal-mode eigenvalue.
    pub lambda: f64,
    /// Dispersion-consistent wavenumber sqrt(n lambda - 1).
    pub kappa: f64,
    /// The alternative sqrt(9 lambda^2 - 1) reported for comparison (NaN when undefined).
    pub kappa_alt: f64,
    /// gamma_n with the unprojected sources.
    pub gamma: f64,
    /// gamma_n with the projected sources.
    pub gamma_perp: f64,
    /// Weighted relative residual of g_n.
    pub g_residual: f64,
    /// Boundedness ratio of g_n.
    pub g_growth: f64,
    /// |det D(p, kappa)|.
    pub det_d: f64,
    /// Integral of |G_{n0} g_1| + |G_{0n} g_2|, the size of the pairing integrand.
    pub pairing_scale: f64,
}

impl FgrPoint {
    /// |gamma - gamma_perp| relative to the pairing scale. Relative to gamma
    /// itself this is undefined at the zeros a sweep looks for.
    pub fn projection_defect(&self) -> f64 {
        (self.gamma - self.gamma_perp).abs() / self.pairing_scale
    }

    /// |gamma - gamma_perp| / |gamma|.
    pub fn projection_defect_vs_gamma(&self) -> f64 {
        (self.gamma - self.gamma_perp).abs() / self.gamma.abs()
    }

    /// |kappa^2 + 1 - n lambda|.
    pub fn kappa_defect(&self) -> f64 {
        (self.kappa * self.kappa + 1.0 - self.n as f64 * self.lambda).abs()
    }
}

/// gamma = integral of (G_{n0} g_1 + G_{0n} g_2).
pub fn pairing(g_n0: &RealField, g_0n: &RealField, g: &Spinor) -> f64 {
    let h = g.grid().spacing();
    dot(&g_n0.values, &g.first.values, h) + dot(&g_0n.values, &g.second.values, h)
}

/// gamma_n from a built profile, with g_n scaled by `scale`.
pub fn gamma_from_profile(profile: &RefinedProfileSet, scale: f64) -> Result<FgrPoint> {
    let n = profile.order;
    let mode = &profile.mode;
    let sol = embedded_solution_gn(mode, n)?;
    let mut g = sol.g.clone();
    g.first.values.iter_mut().for_each(|v| *v *= scale);
    g.second.values.iter_mut().for_each(|v| *v *= scale);
    let (gn0, g0n) = (&profile.sources[&(n, 0)], &profile.sources[&(0, n)]);
    let gamma = pairing(gn0, g0n, &g);
    let gamma_perp = pairing(&profile.gperp.first, &profile.gperp.second, &g);
    let h = g.grid().spacing();
    let abs_prod = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x * y).abs()).collect::<Vec<f64>>();
    let pairing_scale = crate::quadrature::simpson(&abs_prod(&gn0.values, &g.first.values), h)
        + crate::quadrature::simpson(&abs_prod(&g0n.values, &g.second.values), h);
    let l = mode.lambda;
    Ok(FgrPoint {
        p: profile.p,
        n,
        lambda: l,
        kappa: sol.kappa,
        kappa_alt: (9.0 * l * l - 1.0).sqrt(),
        gamma,
        gamma_perp,
        g_residual: sol.residual,
        g_growth: sol.growth,
        det_d: sol.det_d,
        pairing_scale,
    })
}

/// gamma_n(p) on a profile grid of the given spacing.
pub fn gamma_n(p: PowerParam, n: usize, spacing: f64) -> Result<FgrPoint> {
    gamma_scaled(p, n, spacing, 1.0)
}

fn gamma_scaled(p: PowerParam, n: usize, spacing: f64, scale: f64) -> Result<FgrPoint> {
    let mode = profile_mode(p, spacing, n)?;
    let profile = build_refined_profile(&mode, n)?;
    gamma_from_profile(&profile, scale)
}

/// Window (p_{n-1}, p_n) of order n.
pub fn fgr_window(n: usize, grid: Grid) -> Result<(f64, f64)> {
    match n {
        3 => Ok((threshold_p(2, grid)?, threshold_p(3, grid)?)),
        4 => Ok((threshold_p(3, grid)?, threshold_p(4, grid)?)),
        _ => Err(Error::UnsupportedOrder(n)),
    }
}

/// A refined sign change of gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCandidate {
    /// Bracket of exponents.
    pub bracket: (f64, f64),
    /// Refined location.
    pub p: f64,
    /// |gamma| at the refined location.
    pub gamma_abs: f64,
    /// True when |gamma| shrinks toward the refined point; false for a jump.
    pub genuine: bool,
}

/// Rows and zero candidates of a gamma sweep.
#[derive(Debug, Clone)]
pub struct GammaSweep {
    /// Order n.
    pub n: usize,
    /// Window used.
    pub window: (f64, f64),
    /// One row per p, in increasing p; errors are kept as messages.
    pub rows: Vec<(f64, std::result::Result<FgrPoint, String>)>,
    /// Sign changes of gamma, refined.
    pub zeros: Vec<ZeroCandidate>,
}

/// Uniform sweep of gamma_n over the window shrunk by [`WINDOW_MARGIN`], with
/// sign changes refined by regula falsi. `scale` multiplies g_n.
pub fn sweep_gamma(n: usize, steps: usize, window: (f64, f64), spacing: f64, scale: f64) -> GammaSweep {
    let (a, b) = (window.0 + WINDOW_MARGIN, window.1 - WINDOW_MARGIN);
    let ps: Vec<f64> = if steps <= 1 {
        vec![0.5 * (a + b)]
    } else {
        (0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect()
    };
    let rows: Vec<(f64, std::result::Result<FgrPoint, String>)> = ps
        .par_iter()
        .map(|&p| {
            let r = PowerParam::new(p)
                .and_then(|pp| gamma_scaled(pp, n, spacing, scale))
                .map_err(|e| e.to_string());
            (p, r)
        })
        .collect();
    let mut zeros = Vec::new();
    for w in rows.windows(2) {
        if let ((p0, Ok(a0)), (p1, Ok(a1))) = (&w[0], &w[1]) {
            if a0.gamma == 0.0 || a0.gamma.signum() != a1.gamma.signum() {
                zeros.push(refine_zero(n, (*p0, a0.gamma), (*p1, a1.gamma), spacing, scale));
            }
        }
    }
    GammaSweep {
        n,
        window,
        rows,
        zeros,
    }
}

impl GammaSweep {
    /// CSV with columns p, n, lambda, kappa, gamma, g_residual, zero_flag; the
    /// zero flag marks the left end of a bracket containing a genuine zero.
    /// Failed rows carry NaN fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,n,lambda,kappa,gamma,g_residual,zero_flag\n");
        for (p, row) in &self.rows {
            let flag = self.zeros.iter().any(|z| z.genuine && z.bracket.0 == *p);
            match row {
                Ok(q) => out.push_str(&format!(
                    "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                    p, self.n, q.lambda, q.kappa, q.gamma, q.g_residual, flag as u8
                )),
                Err(_) => out.push_str(&format!("{:.16e},{},NaN,NaN,NaN,NaN,0\n", p, self.n)),
            }
        }
        out
    }

    /// p locations of the genuine zeros.
    pub fn zero_locations(&self) -> Vec<f64> {
        self.zeros.iter().filter(|z| z.genuine).map(|z| z.p).collect()
    }
}

fn refine_zero(n: usize, lo: (f64, f64), hi: (f64, f64), spacing: f64, scale: f64) -> ZeroCandidate {
    let ((mut a, mut fa), (mut b, mut fb)) = (lo, hi);
    let mut side = 0;
    let mut best = (0.5 * (a + b), f64::INFINITY);
    let mut scale_at_best = 0.0;
    for _ in 0..40 {
        let c = if fb != fa { (a * fb - b * fa) / (fb - fa) } else { 0.5 * (a + b) };
        let Ok(q) = PowerParam::new(c).and_then(|pp| gamma_scaled(pp, n, spacing, scale)) else {
            break;
        };
        let fc = q.gamma;
        if fc.abs() < best.1 {
            best = (c, fc.abs());
            scale_at_best = q.pairing_scale;
        }
        if fc == 0.0 || (b - a).abs() < 1e-9 {
            break;
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
    }
    ZeroCandidate {
        bracket: (lo.0, hi.0),
        p: best.0,
        gamma_abs: best.1,
        genuine: best.1 < ZERO_TOLERANCE * scale_at_best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_fit_recovers_phase_shifted_cosine() {
        let g = Grid::new(40.0, 0.01).unwrap();
        let v: Vec<f64> = g.coordinates().iter().map(|x| 2.5 * (1.3 * x + 0.4).cos()).collect();
        let a = asymptotic_amplitude(g, &v, 1.3, 25.0, 35.0);
        assert!((a - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_sources_give_zero_gamma() {
        let g = Grid::new(5.0, 0.1).unwrap();
        let z = RealField::from_fn(g, |_| 0.0);
        let s = Spinor::new(RealField::from_fn(g, |x| x.cos()), z.clone()).unwrap();
        assert_eq!(pairing(&z, &z, &s), 0.0);
    }
}
