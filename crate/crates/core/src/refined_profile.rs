//! Refined profile phi[z] = phi + sum_m z^m xi_m at third and fourth order:
//! sources G_m, coefficient solves, the frequency correction lambda_21, the
//! projected resonant sources and the remainder of the profile equation.
//!
//! Index (m1, m2) labels z^{m1} conj(z)^{m2}. All coefficients are real and
//! even; the pair (xi_m, xi_mbar) solves (H - (m1 - m2) lambda) u = (G_m, -G_mbar)
//! with the corrections from lambda_21 at indices (2,1) and (3,1).

use crate::error::{Error, Result};
use crate::grid::{second_difference, Grid, RealField, Spinor};
use crate::operators::{
    build_lplus, internal_mode, lambda_seed, solve_deflated_at_lambda, InternalMode, ShiftedSolver,
};
use crate::quadrature::{dot, simpson};
use crate::soliton::{lambda_p_phi, phi, sech, PowerParam};
use crate::taylor::{nonlinear_expansion, taylor_coeffs, FieldPoly};
use num_complex::Complex64 as C;
use std::collections::BTreeMap;

/// Multi-index (m1, m2) of z^{m1} conj(z)^{m2}.
pub type MultiIndex = (usize, usize);

/// Bound on the back-substitution residual of every coefficient solve.
pub const SOLVE_TOLERANCE: f64 = 1e-8;

/// The conjugate index (m2, m1).
pub fn conjugate_index(m: MultiIndex) -> MultiIndex {
    (m.1, m.0)
}

/// Indices of the coefficients kept at order n (3 or 4).
pub fn nonresonant_set(n: usize) -> Result<Vec<MultiIndex>> {
    let mut set = vec![(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2)];
    match n {
        3 => Ok(set),
        4 => {
            set.extend([(3, 0), (0, 3), (3, 1), (1, 3), (2, 2)]);
            Ok(set)
        }
        _ => Err(Error::UnsupportedOrder(n)),
    }
}

/// Coefficient map keyed by multi-index.
pub type Coefficients = BTreeMap<MultiIndex, RealField>;

/// Refined-profile coefficients, sources and diagnostics at one p.
#[derive(Debug, Clone)]
pub struct RefinedProfileSet {
    /// Order n (3 or 4).
    pub order: usize,
    /// Exponent p.
    pub p: f64,
    /// Normalized internal mode on the profile grid.
    pub mode: InternalMode,
    /// Coefficients xi_m for m in the nonresonant set.
    pub xi: Coefficients,
    /// lambda_21 from the projection formula.
    pub lambda21: f64,
    /// lambda_21 as the multiplier of the bordered solve.
    pub lambda21_bordered: f64,
    /// Sources G_m for 2 <= |m| <= n.
    pub sources: Coefficients,
    /// Projected resonant sources (G_perp_{n0}, G_perp_{0n}).
    pub gperp: Spinor,
    /// Relative residual of each solved coefficient pair, keyed by its first index.
    pub solve_residuals: BTreeMap<MultiIndex, f64>,
}

impl RefinedProfileSet {
    /// Grid of the profile.
    pub fn grid(&self) -> Grid {
        self.mode.grid()
    }

    /// Resonant sources (G_{n0}, G_{0n}).
    pub fn resonant_sources(&self) -> Result<Spinor> {
        let n = self.order;
        Spinor::new(self.sources[&(n, 0)].clone(), self.sources[&(0, n)].clone())
    }

    /// Largest relative back-substitution residual.
    pub fn max_solve_residual(&self) -> f64 {
        self.solve_residuals.values().copied().fold(0.0, f64::max)
    }
}

fn zero_field(grid: Grid) -> RealField {
    RealField::from_fn(grid, |_| 0.0)
}

fn mode_coefficients(mode: &InternalMode) -> Coefficients {
    let mut xi = Coefficients::new();
    xi.insert((1, 0), mode.xi10.clone());
    xi.insert((0, 1), mode.xi01.clone());
    xi
}

/// Sources G_m of total degree `degree` generated by the coefficients of lower
/// degree in `xi`: the z^m coefficients of the nonlinear remainder
/// f(phi + w) - f(phi) - Df(phi) w with w = sum xi_mu z^mu.
pub fn sources_of_degree(p: f64, xi: &Coefficients, degree: usize) -> Result<Coefficients> {
    if !(2..=4).contains(&degree) {
        return Err(Error::UnsupportedOrder(degree));
    }
    let grid = xi
        .values()
        .next()
        .map(|f| f.grid)
        .ok_or_else(|| Error::Data("no coefficients supplied".into()))?;
    let n = grid.len();
    let xs = grid.coordinates();
    let coeffs = taylor_coeffs(p, degree)?;
    let phi_powers: Vec<Vec<f64>> = (0..=degree)
        .map(|k| xs.iter().map(|&x| phi(p, x).powf(p - k as f64)).collect())
        .collect();
    let mut w = FieldPoly::new(n, degree);
    for (&m, f) in xi {
        if m.0 + m.1 < degree {
            w.add(m, 1.0, &f.values);
        }
    }
    let expansion = nonlinear_expansion(&coeffs, &w, &phi_powers);
    Ok((0..=degree)
        .map(|m1| {
            let m = (m1, degree - m1);
            (m, RealField::new(grid, expansion.coefficient(m)).expect("grid length"))
        })
        .collect())
}

/// Largest deviation between the sources and those rebuilt from swapped
/// coefficients (xi_mu replaced by xi_mubar), compared at conjugate indices,
/// relative to the largest source magnitude.
pub fn swap_defect(p: f64, xi: &Coefficients, degree: usize) -> Result<f64> {
    let direct = sources_of_degree(p, xi, degree)?;
    let swapped: Coefficients = xi.iter().map(|(&m, f)| (conjugate_index(m), f.clone())).collect();
    let rebuilt = sources_of_degree(p, &swapped, degree)?;
    let mut worst: f64 = 0.0;
    let scale = direct.values().map(|g| g.sup_norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    for (m, g) in &direct {
        let other = &rebuilt[&conjugate_index(*m)];
        for (a, b) in g.values.iter().zip(&other.values) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst / scale)
}

/// G_{20}, G_{11}, G_{02} from the internal mode.
pub fn assemble_sources_order2(mode: &InternalMode) -> Result<Coefficients> {
    sources_of_degree(mode.p, &mode_coefficients(mode), 2)
}

fn lplus_residual(p: PowerParam, u: &RealField, rhs: &RealField) -> f64 {
    let op = build_lplus(p, u.grid);
    let au = op.apply(&u.values);
    let num: f64 = au.iter().zip(&rhs.values).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den: f64 = rhs.values.iter().map(|b| b * b).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    num / den
}

fn solve_lplus_checked(p: PowerParam, rhs: &RealField) -> Result<(RealField, f64)> {
    let op = build_lplus(p, rhs.grid);
    let u = RealField::new(rhs.grid, op.factor()?.solve(&rhs.values))?;
    let r = lplus_residual(p, &u, rhs);
    Ok((u, r))
}

fn solve_pair(mode: &InternalMode, shift: f64, rhs: Spinor) -> Result<(Spinor, f64)> {
    let solver = ShiftedSolver::new(mode, shift)?;
    let u = solver.solve(&rhs)?;
    let r = solver.residual(&u, &rhs);
    Ok((u, r))
}

fn negated(f: &RealField) -> RealField {
    RealField {
        grid: f.grid,
        values: f.values.iter().map(|v| -v).collect(),
    }
}

/// Solves (H - 2 lambda)(xi_20, xi_02) = (G_20, -G_02) and L+ xi_11 = G_11.
/// Returns the coefficients and their residuals.
pub fn solve_order2(
    mode: &InternalMode,
    sources: &Coefficients,
) -> Result<(Coefficients, BTreeMap<MultiIndex, f64>)> {
    let p = PowerParam::new(mode.p)?;
    let shift = 2.0 * mode.lambda;
    if shift >= 1.0 {
        return Err(Error::EmbeddedShift(shift));
    }
    let rhs = Spinor::new(sources[&(2, 0)].clone(), negated(&sources[&(0, 2)]))?;
    let (u, r20) = solve_pair(mode, shift, rhs)?;
    let (xi11, r11) = solve_lplus_checked(p, &sources[&(1, 1)])?;
    let mut xi = Coefficients::new();
    xi.insert((2, 0), u.first);
    xi.insert((0, 2), u.second);
    xi.insert((1, 1), xi11);
    let res = BTreeMap::from([((2, 0), r20), ((1, 1), r11)]);
    Ok((xi, res))
}

/// G_{21}, G_{12}, G_{30}, G_{03} from the coefficients up to order two.
pub fn assemble_sources_order3(mode: &InternalMode, xi: &Coefficients) -> Result<Coefficients> {
    sources_of_degree(mode.p, xi, 3)
}

/// Outcome of the solve at the internal-mode frequency.
#[derive(Debug, Clone)]
pub struct Lambda21Solution {
    /// lambda_21 from the projection formula.
    pub lambda21: f64,
    /// lambda_21 as the bordered-system multiplier.
    pub lambda21_bordered: f64,
    /// Coefficient xi_21.
    pub xi21: RealField,
    /// Coefficient xi_12.
    pub xi12: RealField,
    /// Relative residual of the bordered solve.
    pub residual: f64,
}

/// lambda_21 = -2 (<G_21, xi_10> + <G_12, xi_01>) and the kernel-orthogonal
/// solution of (H - lambda)(xi_21, xi_12) = (G_21, -G_12) + lambda_21 (xi_10, xi_01).
pub fn compute_lambda21_and_xi21(
    mode: &InternalMode,
    g21: &RealField,
    g12: &RealField,
) -> Result<Lambda21Solution> {
    let h = mode.grid().spacing();
    let lambda21 = -2.0 * (dot(&g21.values, &mode.xi10.values, h) + dot(&g12.values, &mode.xi01.values, h));
    let rhs = Spinor::new(g21.clone(), negated(g12))?;
    let sol = solve_deflated_at_lambda(mode, &rhs)?;
    Ok(Lambda21Solution {
        lambda21,
        lambda21_bordered: sol.multiplier,
        xi21: sol.u.first,
        xi12: sol.u.second,
        residual: sol.residual,
    })
}

/// Fourth-order stage: solves for xi_30, xi_03, assembles the degree-four
/// sources and solves for xi_31, xi_13, xi_22. Requires 3 lambda < 1.
///
/// The (3,1) equation carries the term 2 lambda_21 (xi_20, xi_02) generated by
/// the frequency correction acting on the (2,0) coefficient.
pub fn assemble_order4(
    mode: &InternalMode,
    xi: &Coefficients,
    lambda21: f64,
    sources3: &Coefficients,
) -> Result<(Coefficients, Coefficients, BTreeMap<MultiIndex, f64>)> {
    let p = PowerParam::new(mode.p)?;
    let shift3 = 3.0 * mode.lambda;
    if shift3 >= 1.0 {
        return Err(Error::EmbeddedShift(shift3));
    }
    let mut xi = xi.clone();
    let mut res = BTreeMap::new();
    let rhs30 = Spinor::new(sources3[&(3, 0)].clone(), negated(&sources3[&(0, 3)]))?;
    let (u30, r30) = solve_pair(mode, shift3, rhs30)?;
    xi.insert((3, 0), u30.first);
    xi.insert((0, 3), u30.second);
    res.insert((3, 0), r30);
    let sources4 = sources_of_degree(mode.p, &xi, 4)?;
    let (x20, x02) = (&xi[&(2, 0)], &xi[&(0, 2)]);
    let first: Vec<f64> = sources4[&(3, 1)]
        .values
        .iter()
        .zip(&x20.values)
        .map(|(g, x)| g + 2.0 * lambda21 * x)
        .collect();
    let second: Vec<f64> = sources4[&(1, 3)]
        .values
        .iter()
        .zip(&x02.values)
        .map(|(g, x)| -g + 2.0 * lambda21 * x)
        .collect();
    let grid = mode.grid();
    let rhs31 = Spinor::new(RealField::new(grid, first)?, RealField::new(grid, second)?)?;
    let (u31, r31) = solve_pair(mode, 2.0 * mode.lambda, rhs31)?;
    xi.insert((3, 1), u31.first);
    xi.insert((1, 3), u31.second);
    res.insert((3, 1), r31);
    let (xi22, r22) = solve_lplus_checked(p, &sources4[&(2, 2)])?;
    xi.insert((2, 2), xi22);
    res.insert((2, 2), r22);
    Ok((xi, sources4, res))
}

/// Pairing Re of the integral of u conj(v).
fn re_pair(u: &[C], v: &[C], h: f64) -> f64 {
    let dens: Vec<f64> = u.iter().zip(v).map(|(a, b)| a.re * b.re + a.im * b.im).collect();
    simpson(&dens, h)
}

/// Symplectic projection onto the complement of the soliton and internal-mode
/// tangent directions, acting on complex scalar fields.
pub fn project_perp(mode: &InternalMode, psi: &[C]) -> Result<Vec<C>> {
    let grid = mode.grid();
    let h = grid.spacing();
    let xs = grid.coordinates();
    let ph: Vec<C> = xs.iter().map(|&x| C::new(phi(mode.p, x), 0.0)).collect();
    let lp: Vec<C> = xs.iter().map(|&x| C::new(lambda_p_phi(mode.p, x), 0.0)).collect();
    let xi1: Vec<C> = (0..xs.len())
        .map(|j| C::new(mode.xi10.values[j] + mode.xi01.values[j], 0.0))
        .collect();
    let xi2: Vec<C> = (0..xs.len())
        .map(|j| C::new(0.0, mode.xi10.values[j] - mode.xi01.values[j]))
        .collect();
    let norm = re_pair(&ph, &lp, h);
    if norm.abs() < 1e-12 {
        return Err(Error::DegenerateMode(norm));
    }
    let i = C::new(0.0, 1.0);
    let ipsi: Vec<C> = psi.iter().map(|z| i * z).collect();
    let ixi1: Vec<C> = xi1.iter().map(|z| i * z).collect();
    let a = re_pair(&ipsi, &lp, h) / norm;
    let b = re_pair(&ph, psi, h) / norm;
    let c = 2.0 * re_pair(&ipsi, &xi2, h);
    let d = 2.0 * re_pair(&ixi1, psi, h);
    Ok((0..psi.len())
        .map(|j| psi[j] + a * i * ph[j] - b * lp[j] - c * xi1[j] - d * xi2[j])
        .collect())
}

/// Projected resonant sources (G_perp_{n0}, G_perp_{0n}) and the largest
/// imaginary residue discarded when returning to real fields.
pub fn project_gperp(mode: &InternalMode, g_n0: &RealField, g_0n: &RealField) -> Result<(Spinor, f64)> {
    let i = C::new(0.0, 1.0);
    let sum: Vec<C> = g_n0.values.iter().zip(&g_0n.values).map(|(a, b)| i * (a + b)).collect();
    let diff: Vec<C> = g_n0.values.iter().zip(&g_0n.values).map(|(a, b)| C::new(a - b, 0.0)).collect();
    let ps = project_perp(mode, &sum)?;
    let pd = project_perp(mode, &diff)?;
    let mut imag: f64 = 0.0;
    let mut first = Vec::with_capacity(ps.len());
    let mut second = Vec::with_capacity(ps.len());
    for (s, d) in ps.iter().zip(&pd) {
        let common = -0.5 * i * s;
        let a = common + 0.5 * d;
        let b = common - 0.5 * d;
        imag = imag.max(a.im.abs()).max(b.im.abs());
        first.push(a.re);
        second.push(b.re);
    }
    let grid = g_n0.grid;
    Ok((Spinor::new(RealField::new(grid, first)?, RealField::new(grid, second)?)?, imag))
}

/// Weight exponent of the remainder norm.
pub fn remainder_weight(p: f64) -> f64 {
    0.1f64.min((p - 1.0) / 8.0)
}

fn zpow(z: C, m: MultiIndex) -> C {
    z.powu(m.0 as u32) * z.conj().powu(m.1 as u32)
}

/// Remainder of the profile equation at amplitude z,
/// -phi[z]'' + phi[z] - f(phi[z]) - sum_m Lambda (m1 - m2) z^m xi_m + z^n G_{n0} + conj(z)^n G_{0n},
/// with Lambda = lambda + lambda_21 |z|^2, sampled on the grid.
pub fn remainder(profile: &RefinedProfileSet, z: C) -> Vec<C> {
    let grid = profile.grid();
    let h = grid.spacing();
    let p = profile.p;
    let n = grid.len();
    let lam = profile.mode.lambda + profile.lambda21 * z.norm_sqr();
    let mut wt = vec![C::new(0.0, 0.0); n];
    let mut drift = vec![C::new(0.0, 0.0); n];
    for (&m, xi) in &profile.xi {
        let c = zpow(z, m);
        let shift = lam * (m.0 as f64 - m.1 as f64);
        for j in 0..n {
            wt[j] += c * xi.values[j];
            drift[j] += shift * c * xi.values[j];
        }
    }
    let re: Vec<f64> = wt.iter().map(|v| v.re).collect();
    let im: Vec<f64> = wt.iter().map(|v| v.im).collect();
    let (d2r, d2i) = (second_difference(&re, h), second_difference(&im, h));
    let ord = profile.order;
    let (gn0, g0n) = (&profile.sources[&(ord, 0)], &profile.sources[&(0, ord)]);
    let zn = z.powu(ord as u32);
    let zbn = z.conj().powu(ord as u32);
    (0..n)
        .map(|j| {
            let x = grid.x(j);
            let ph = phi(p, x);
            let u = ph + wt[j];
            let fu = u * u.norm().powf(p - 1.0);
            let lin = ph.powf(p) - C::new(d2r[j], d2i[j]) + wt[j];
            lin - fu - drift[j] + zn * gn0.values[j] + zbn * g0n.values[j]
        })
        .collect()
}

/// sech(kappa x)-weighted L2 norm of the remainder at amplitude z.
pub fn remainder_norm(profile: &RefinedProfileSet, z: C) -> f64 {
    let grid = profile.grid();
    let kappa = remainder_weight(profile.p);
    let r = remainder(profile, z);
    let dens: Vec<f64> = r
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = sech(kappa * grid.x(j));
            w * w * v.norm_sqr()
        })
        .collect();
    simpson(&dens, grid.spacing()).sqrt()
}

/// Amplitudes used for the remainder-order fit.
pub const SCALING_AMPLITUDES: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];

/// Least-squares log-log slope of the remainder norm against |z| along the
/// ray of argument `angle`; returns (slope, norms).
pub fn residual_scaling(profile: &RefinedProfileSet, amplitudes: &[f64], angle: f64) -> (f64, Vec<f64>) {
    let norms: Vec<f64> = amplitudes
        .iter()
        .map(|&a| remainder_norm(profile, C::from_polar(a, angle)))
        .collect();
    let lx: Vec<f64> = amplitudes.iter().map(|a| a.ln()).collect();
    let ly: Vec<f64> = norms.iter().map(|r| r.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxy / sxx, norms)
}

/// Half-length resolving the slowest-decaying coefficient at order n.
pub fn profile_half_length(lambda: f64, order: usize) -> f64 {
    let top = if order >= 4 { 3.0 } else { 2.0 } * lambda;
    let rate = (1.0 - top).max(1e-6).sqrt().min((1.0 - lambda).sqrt());
    (24.0 / rate).max(crate::grid::DEFAULT_HALF_LENGTH)
}

/// Internal mode on a grid wide enough for the order-n profile.
pub fn profile_mode(p: PowerParam, spacing: f64, order: usize) -> Result<InternalMode> {
    let seed = lambda_seed(p.value());
    let base = Grid::new(crate::grid::DEFAULT_HALF_LENGTH, spacing)?;
    let first = internal_mode(p, base, seed)?;
    let half = profile_half_length(first.lambda, order);
    if half <= base.half_length() {
        return Ok(first);
    }
    let grid = base.with_half_length(half)?;
    internal_mode(p, grid, first.lambda)
}

/// Builds the order-n refined profile from a normalized internal mode.
pub fn build_refined_profile(mode: &InternalMode, order: usize) -> Result<RefinedProfileSet> {
    nonresonant_set(order)?;
    let mut xi = mode_coefficients(mode);
    let mut sources = assemble_sources_order2(mode)?;
    let (xi2, mut residuals) = solve_order2(mode, &sources)?;
    xi.extend(xi2);
    let s3 = assemble_sources_order3(mode, &xi)?;
    let l21 = compute_lambda21_and_xi21(mode, &s3[&(2, 1)], &s3[&(1, 2)])?;
    xi.insert((2, 1), l21.xi21.clone());
    xi.insert((1, 2), l21.xi12.clone());
    residuals.insert((2, 1), l21.residual);
    sources.extend(s3.clone());
    if order == 4 {
        let (xi4, s4, r4) = assemble_order4(mode, &xi, l21.lambda21, &s3)?;
        xi = xi4;
        sources.extend(s4);
        residuals.extend(r4);
    }
    let grid = mode.grid();
    let gn0 = sources.get(&(order, 0)).cloned().unwrap_or_else(|| zero_field(grid));
    let g0n = sources.get(&(0, order)).cloned().unwrap_or_else(|| zero_field(grid));
    let (gperp, _) = project_gperp(mode, &gn0, &g0n)?;
    Ok(RefinedProfileSet {
        order,
        p: mode.p,
        mode: mode.clone(),
        xi,
        lambda21: l21.lambda21,
        lambda21_bordered: l21.lambda21_bordered,
        sources,
        gperp,
        solve_residuals: residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_sets() {
        assert_eq!(nonresonant_set(3).unwrap().len(), 7);
        assert_eq!(nonresonant_set(4).unwrap().len(), 12);
        assert!(nonresonant_set(5).is_err());
        assert_eq!(conjugate_index((3, 1)), (1, 3));
    }

    #[test]
    fn zero_inputs_give_zero_sources() {
        let g = Grid::new(5.0, 0.1).unwrap();
        let mut xi = Coefficients::new();
        xi.insert((1, 0), zero_field(g));
        xi.insert((0, 1), zero_field(g));
        let s = sources_of_degree(4.0, &xi, 2).unwrap();
        assert!(s.values().all(|f| f.sup_norm() == 0.0));
    }
}
