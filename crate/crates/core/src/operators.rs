//! Banded discretizations of L+, L- and H, the internal-mode eigensolver,
//! threshold root finding and shifted solves below the continuum.
//!
//! All operators use the fourth-order stencil [-1/12, 4/3, -5/2, 4/3, -1/12] / h^2
//! with homogeneous Dirichlet data beyond the ends. H acts on interleaved
//! vectors (a_0, b_0, a_1, b_1, ...).

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::grid::{l2_norm, Grid, RealField, Spinor};
use crate::quadrature::dot;
use crate::soliton::{phi_pow_q, PowerParam};

const STENCIL: [f64; 3] = [-2.5, 4.0 / 3.0, -1.0 / 12.0];

/// Tolerance below which a shift is considered to hit an eigenvalue.
pub const NEAR_SINGULAR_GUARD: f64 = 1e-6;

fn scalar_operator(grid: Grid, diag: impl Fn(f64) -> f64) -> BandedMatrix<f64> {
    let n = grid.len();
    let c = 1.0 / (grid.spacing() * grid.spacing());
    let mut a = BandedMatrix::zeros(n, 2, 2);
    for j in 0..n {
        a.set(j, j, -c * STENCIL[0] + diag(grid.x(j)));
        for (k, &w) in STENCIL.iter().enumerate().skip(1) {
            if j >= k {
                a.set(j, j - k, -c * w);
            }
            if j + k < n {
                a.set(j, j + k, -c * w);
            }
        }
    }
    a
}

/// L+ = -d^2 + 1 - p phi^{p-1}.
pub fn build_lplus(p: PowerParam, grid: Grid) -> BandedMatrix<f64> {
    let p = p.value();
    scalar_operator(grid, |x| 1.0 - p * phi_pow_q(p, x))
}

/// L- = -d^2 + 1 - phi^{p-1}.
pub fn build_lminus(p: PowerParam, grid: Grid) -> BandedMatrix<f64> {
    let p = p.value();
    scalar_operator(grid, |x| 1.0 - phi_pow_q(p, x))
}

/// H = sigma_3 (-d^2 + 1) + V on interleaved vectors (bandwidth 5).
pub fn build_h(p: PowerParam, grid: Grid) -> BandedMatrix<f64> {
    let pv = p.value();
    let n = grid.len();
    let c = 1.0 / (grid.spacing() * grid.spacing());
    let mut a = BandedMatrix::zeros(2 * n, 5, 5);
    for j in 0..n {
        let [v11, v12, v21, v22] = crate::soliton::potential_at(pv, grid.x(j));
        let (r1, r2) = (2 * j, 2 * j + 1);
        a.set(r1, r1, -c * STENCIL[0] + 1.0 + v11);
        a.set(r1, r2, v12);
        a.set(r2, r1, v21);
        a.set(r2, r2, c * STENCIL[0] - 1.0 + v22);
        for (k, &w) in STENCIL.iter().enumerate().skip(1) {
            if j >= k {
                a.set(r1, r1 - 2 * k, -c * w);
                a.set(r2, r2 - 2 * k, c * w);
            }
            if j + k < n {
                a.set(r1, r1 + 2 * k, -c * w);
                a.set(r2, r2 + 2 * k, c * w);
            }
        }
    }
    a
}

/// Block operator K = [[0, L-], [L+, 0]] on interleaved (s, d) vectors.
/// If H u = lambda u then s = u1 + u2, d = u1 - u2 satisfy K (s, d) = lambda (s, d).
fn build_block(p: PowerParam, grid: Grid) -> BandedMatrix<f64> {
    let lp = build_lplus(p, grid);
    let lm = build_lminus(p, grid);
    let n = grid.len();
    let mut k = BandedMatrix::zeros(2 * n, 5, 5);
    for j in 0..n {
        for i in j.saturating_sub(2)..=(j + 2).min(n - 1) {
            k.set(2 * j, 2 * i + 1, lm.get(j, i));
            k.set(2 * j + 1, 2 * i, lp.get(j, i));
        }
    }
    k
}

/// Internal mode (lambda, xi_10, xi_01) of H with the symplectic normalization
/// of the integral of (xi_10^2 - xi_01^2) equal to 1/2 and xi_10(0) > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalMode {
    /// Exponent p.
    pub p: f64,
    /// Eigenvalue in (0, 1).
    pub lambda: f64,
    /// First component of the eigenvector.
    pub xi10: RealField,
    /// Second component of the eigenvector.
    pub xi01: RealField,
    /// Relative residual of (H - lambda) xi in the Euclidean norm.
    pub residual_norm: f64,
    /// Factor applied by the normalization.
    pub normalization_constant: f64,
}

impl InternalMode {
    /// Grid of the eigenvector samples.
    pub fn grid(&self) -> Grid {
        self.xi10.grid
    }

    /// The eigenvector as a spinor.
    pub fn spinor(&self) -> Spinor {
        Spinor {
            first: self.xi10.clone(),
            second: self.xi01.clone(),
        }
    }

    /// Integral of xi_10^2 - xi_01^2 (Simpson).
    pub fn pairing(&self) -> f64 {
        symplectic_pairing(&self.xi10.values, &self.xi01.values, self.grid().spacing())
    }
}

fn symplectic_pairing(a: &[f64], b: &[f64], h: f64) -> f64 {
    dot(a, a, h) - dot(b, b, h)
}

/// Iteration cap for the shift-invert eigen iteration.
const EIGEN_MAX_OUTER: usize = 30;

/// Internal mode on the given grid by shift-invert iteration with Rayleigh
/// updates on the block form of L- L+ (never assembled explicitly).
pub fn internal_mode(p: PowerParam, grid: Grid, lambda_guess: f64) -> Result<InternalMode> {
    if !(lambda_guess > 0.0 && lambda_guess < 1.0) {
        return Err(Error::Domain(format!("lambda guess {lambda_guess} outside (0, 1)")));
    }
    let k = build_block(p, grid);
    let n = grid.len();
    let mut v: Vec<f64> = (0..2 * n)
        .map(|i| {
            let x = grid.x(i / 2);
            (-x * x / 4.0).exp()
        })
        .collect();
    let mut sigma = lambda_guess;
    let mut residual = f64::INFINITY;
    let mut previous = f64::NAN;
    for _ in 0..EIGEN_MAX_OUTER {
        let lu = k.shifted(sigma).factor()?;
        for _ in 0..3 {
            v = lu.solve(&v);
            let nv = l2_norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
        }
        let kv = k.apply(&v);
        // Two-sided Rayleigh quotient: the left eigenvector of K is (d, s).
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let (s, d) = (v[2 * j], v[2 * j + 1]);
            num += d * kv[2 * j] + s * kv[2 * j + 1];
            den += 2.0 * s * d;
        }
        let rho = num / den;
        residual = (0..2 * n).map(|i| (kv[i] - rho * v[i]).powi(2)).sum::<f64>().sqrt();
        let converged = (rho - previous).abs() <= 1e-11 * rho.abs() && residual < 1e-9;
        previous = rho;
        sigma = rho;
        if converged {
            break;
        }
    }
    if !(residual < 1e-8) {
        return Err(Error::Convergence {
            iterations: EIGEN_MAX_OUTER,
            residual,
        });
    }
    let lambda = sigma;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::SpectralWindow(lambda));
    }
    let xi10 = (0..n).map(|j| 0.5 * (v[2 * j] + v[2 * j + 1])).collect();
    let xi01 = (0..n).map(|j| 0.5 * (v[2 * j] - v[2 * j + 1])).collect();
    let mut mode = InternalMode {
        p: p.value(),
        lambda,
        xi10: RealField { grid, values: xi10 },
        xi01: RealField { grid, values: xi01 },
        residual_norm: 0.0,
        normalization_constant: 1.0,
    };
    symmetrize(&mut mode.xi10.values);
    symmetrize(&mut mode.xi01.values);
    mode = normalize_mode(mode)?;
    mode.residual_norm = mode_residual(p, &mode);
    Ok(mode)
}

fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    for j in 0..n / 2 {
        let m = 0.5 * (v[j] + v[n - 1 - j]);
        v[j] = m;
        v[n - 1 - j] = m;
    }
}

/// Relative residual of (H - lambda)(xi_10, xi_01) in the Euclidean norm.
pub fn mode_residual(p: PowerParam, mode: &InternalMode) -> f64 {
    let h = build_h(p, mode.grid());
    let u = mode.spinor().interleaved();
    let hu = h.apply(&u);
    let r: Vec<f64> = hu.iter().zip(&u).map(|(a, b)| a - mode.lambda * b).collect();
    l2_norm(&r) / l2_norm(&u)
}

/// Rescales so the symplectic pairing equals 1/2; the sign makes xi_10(0) > 0.
pub fn normalize_mode(mut mode: InternalMode) -> Result<InternalMode> {
    let h = mode.grid().spacing();
    let q = symplectic_pairing(&mode.xi10.values, &mode.xi01.values, h);
    if !(q.abs() > 1e-300) || !q.is_finite() {
        return Err(Error::DegenerateMode(q));
    }
    if q < 0.0 {
        // A negative pairing cannot be fixed by a real rescaling.
        return Err(Error::DegenerateMode(q));
    }
    let mut c = (0.5 / q).sqrt();
    let center = mode.xi10.at_center();
    let peak = mode.xi10.values.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
    let reference = if center.abs() > 1e-8 * peak.abs() { center } else { peak };
    if reference < 0.0 {
        c = -c;
    }
    mode.xi10.values.iter_mut().for_each(|x| *x *= c);
    mode.xi01.values.iter_mut().for_each(|x| *x *= c);
    mode.normalization_constant *= c;
    Ok(mode)
}

/// Smallest half-length (on the default scale) that resolves the decay
/// exp(-sqrt(1 - lambda) |x|) of the mode to about 1e-10 at the boundary.
pub fn resolving_half_length(lambda: f64) -> f64 {
    let beta = (1.0 - lambda).max(1e-12).sqrt();
    (24.0 / beta).max(crate::grid::DEFAULT_HALF_LENGTH)
}

/// Internal mode on a grid of spacing `h`, extending the half-length until the
/// eigenvector has decayed to about 1e-10 at the boundary.
pub fn internal_mode_resolved(p: PowerParam, spacing: f64, lambda_guess: f64) -> Result<InternalMode> {
    let mut grid = Grid::new(crate::grid::DEFAULT_HALF_LENGTH, spacing)?
        .with_half_length(resolving_half_length(lambda_guess))?;
    let mut guess = lambda_guess;
    for _ in 0..6 {
        let mode = internal_mode(p, grid, guess)?;
        let needed = resolving_half_length(mode.lambda);
        if needed <= grid.half_length() * 1.0001 {
            return Ok(mode);
        }
        guess = mode.lambda;
        grid = grid.with_half_length(needed)?;
    }
    internal_mode(p, grid, guess)
}

/// Eigenvalue curve evaluated by continuation from the largest p downwards.
/// The result is in the order of `ps`.
pub fn lambda_curve(ps: &[f64], spacing: f64) -> Vec<Result<f64>> {
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(|&a, &b| ps[b].partial_cmp(&ps[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<Result<f64>> = (0..ps.len()).map(|_| Err(Error::Domain("unset".into()))).collect();
    let mut history: Vec<(f64, f64)> = Vec::new();
    for &i in &order {
        let p = ps[i];
        let guess = extrapolate_guess(&history, p);
        let r = PowerParam::new(p).and_then(|pp| internal_mode_resolved(pp, spacing, guess)).map(|m| m.lambda);
        if let Ok(l) = r {
            history.push((p, l));
        }
        out[i] = r;
    }
    out
}

/// Rough eigenvalue from an empirical fit, used only to seed the iteration.
pub fn lambda_seed(p: f64) -> f64 {
    const TABLE: [(f64, f64); 9] = [
        (3.0, 1.0),
        (3.5, 0.9956),
        (4.0, 0.9483),
        (4.3, 0.8697),
        (4.5, 0.7803),
        (4.7, 0.6408),
        (4.8, 0.5384),
        (4.9, 0.3916),
        (4.95, 0.2808),
    ];
    if p < 3.5 {
        return (1.0 - 0.07 * (p - 3.0).powi(4)).min(1.0 - 1e-9);
    }
    if p >= 4.95 {
        // Square-root vanishing at p = 5.
        return (1.256 * (5.0 - p).max(0.0).sqrt()).clamp(1e-3, 0.2808);
    }
    let i = TABLE.iter().position(|&(q, _)| q >= p).unwrap_or(TABLE.len() - 1).max(1);
    let (p0, l0) = TABLE[i - 1];
    let (p1, l1) = TABLE[i];
    l0 + (l1 - l0) * (p - p0) / (p1 - p0)
}

fn extrapolate_guess(history: &[(f64, f64)], p: f64) -> f64 {
    let n = history.len();
    let g = match n {
        0 => lambda_seed(p),
        1 => lambda_seed(p) - lambda_seed(history[0].0) + history[0].1,
        _ => {
            let (p1, l1) = history[n - 1];
            let (p0, l0) = history[n - 2];
            l1 + (l1 - l0) / (p1 - p0) * (p - p1)
        }
    };
    g.clamp(1e-3, 1.0 - 1e-9)
}

/// Bracket of exponents containing every threshold p_2, p_3, p_4.
pub const THRESHOLD_BRACKET: (f64, f64) = (4.5, 4.97);

/// Exponent p_n in (4, 5) with lambda(p_n) = 1/n, by Illinois regula falsi.
pub fn threshold_p(n: u32, grid: Grid) -> Result<f64> {
    if !(2..=4).contains(&n) {
        return Err(Error::Domain(format!("threshold index {n} not in {{2, 3, 4}}")));
    }
    let target = 1.0 / n as f64;
    let eval = |p: f64, guess: f64| -> Result<f64> {
        Ok(internal_mode(PowerParam::new(p)?, grid, guess)?.lambda - target)
    };
    let (mut a, mut b) = THRESHOLD_BRACKET;
    let mut fa = eval(a, lambda_seed(a))?;
    let mut fb = eval(b, lambda_seed(b))?;
    if fa * fb > 0.0 {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    let mut side = 0i32;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let guess = (target + fa + (fb - fa) * (c - a) / (b - a)).clamp(1e-3, 0.999);
        let fc = eval(c, guess)?;
        if fc.abs() <= 1e-12 || (b - a).abs() < 1e-13 {
            return Ok(c);
        }
        if fc * fb > 0.0 {
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
    Err(Error::Convergence {
        iterations: 200,
        residual: fa.abs().min(fb.abs()),
    })
}

fn check_shift(mode: &InternalMode, mu: f64) -> Result<()> {
    if mu >= 1.0 {
        return Err(Error::EmbeddedShift(mu));
    }
    for ev in [mode.lambda, -mode.lambda, 0.0] {
        let distance = (mu - ev).abs();
        if distance < NEAR_SINGULAR_GUARD {
            return Err(Error::NearSingular {
                shift: mu,
                eigenvalue: ev,
                distance,
            });
        }
    }
    Ok(())
}

/// Factorization of H - mu for repeated solves below the continuum.
#[derive(Debug, Clone)]
pub struct ShiftedSolver {
    grid: Grid,
    op: BandedMatrix<f64>,
    lu: BandedLu<f64>,
}

impl ShiftedSolver {
    /// Factors H - mu, refusing mu >= 1 and shifts near +-lambda or 0.
    pub fn new(mode: &InternalMode, mu: f64) -> Result<Self> {
        check_shift(mode, mu)?;
        let grid = mode.grid();
        let op = build_h(PowerParam::new(mode.p)?, grid).shifted(mu);
        let lu = op.factor()?;
        Ok(Self { grid, op, lu })
    }

    /// Solves (H - mu) u = rhs.
    pub fn solve(&self, rhs: &Spinor) -> Result<Spinor> {
        let u = self.lu.solve(&rhs.interleaved());
        Spinor::from_interleaved(self.grid, &u)
    }

    /// Relative residual of (H - mu) u = rhs.
    pub fn residual(&self, u: &Spinor, rhs: &Spinor) -> f64 {
        relative_residual(&self.op, &u.interleaved(), &rhs.interleaved())
    }
}

fn relative_residual(op: &BandedMatrix<f64>, u: &[f64], rhs: &[f64]) -> f64 {
    let au = op.apply(u);
    let r: Vec<f64> = au.iter().zip(rhs).map(|(a, b)| a - b).collect();
    let scale = l2_norm(rhs).max(l2_norm(&au)).max(f64::MIN_POSITIVE);
    l2_norm(&r) / scale
}

/// Solves (H - mu) u = rhs for mu below the continuum.
pub fn solve_shifted(mode: &InternalMode, mu: f64, rhs: &Spinor) -> Result<Spinor> {
    ShiftedSolver::new(mode, mu)?.solve(rhs)
}

/// Solves L+ u = rhs (L+ is invertible on even functions).
pub fn solve_lplus(p: PowerParam, rhs: &RealField) -> Result<RealField> {
    let lu = build_lplus(p, rhs.grid).factor()?;
    Ok(RealField {
        grid: rhs.grid,
        values: lu.solve(&rhs.values),
    })
}

/// Result of the deflated solve at the eigenvalue.
#[derive(Debug, Clone)]
pub struct DeflatedSolution {
    /// Solution orthogonal to the kernel of H - lambda.
    pub u: Spinor,
    /// Solvability multiplier c.
    pub multiplier: f64,
    /// Relative residual of (H - lambda) u - c xi - rhs.
    pub residual: f64,
    /// Pivot-ratio conditioning indicator of the bordered factorization.
    pub condition_estimate: f64,
}

/// Solves (H - lambda) u = c (xi_10, xi_01) + rhs with c fixed by orthogonality
/// of the right side to (xi_10, -xi_01) and u orthogonal to (xi_10, xi_01).
///
/// The bordered system is solved by replacing the equation of largest kernel
/// weight with a pin of the same unknown, which keeps the matrix banded, and
/// restoring the orthogonality gauge afterwards.
pub fn solve_deflated_at_lambda(mode: &InternalMode, rhs: &Spinor) -> Result<DeflatedSolution> {
    let grid = mode.grid();
    let p = PowerParam::new(mode.p)?;
    let op = build_h(p, grid).shifted(mode.lambda);
    let xi = mode.spinor().interleaved();
    let adj: Vec<f64> = xi.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -*v }).collect();
    let b = rhs.interleaved();
    let num: f64 = b.iter().zip(&adj).map(|(x, y)| x * y).sum();
    let den: f64 = xi.iter().zip(&adj).map(|(x, y)| x * y).sum();
    if den.abs() < 1e-300 {
        return Err(Error::DegenerateMode(den));
    }
    let c = -num / den;
    let full: Vec<f64> = b.iter().zip(&xi).map(|(x, y)| x + c * y).collect();
    let r = (0..xi.len())
        .max_by(|&i, &j| (xi[i].abs() * adj[i].abs()).total_cmp(&(xi[j].abs() * adj[j].abs())))
        .unwrap_or(0);
    let mut pinned = op.clone();
    let (lo, hi) = pinned.bandwidths();
    for j in r.saturating_sub(lo)..=(r + hi).min(pinned.dim() - 1) {
        pinned.set(r, j, 0.0);
    }
    pinned.set(r, r, 1.0);
    let lu = pinned.factor()?;
    let cond = lu.pivot_ratio();
    if !(cond < 1e14) {
        return Err(Error::IllConditioned(cond));
    }
    let mut rhs_pinned = full.clone();
    rhs_pinned[r] = 0.0;
    let mut u = lu.solve(&rhs_pinned);
    let t: f64 = u.iter().zip(&xi).map(|(x, y)| x * y).sum::<f64>() / xi.iter().map(|y| y * y).sum::<f64>();
    u.iter_mut().zip(&xi).for_each(|(x, y)| *x -= t * y);
    let residual = relative_residual(&op, &u, &full);
    Ok(DeflatedSolution {
        u: Spinor::from_interleaved(grid, &u)?,
        multiplier: c,
        residual,
        condition_estimate: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_is_adjoint_conjugate_by_sigma3() {
        let g = Grid::new(2.0, 0.25).unwrap();
        let h = build_h(PowerParam::new(4.0).unwrap(), g);
        let n = h.dim();
        let sign = |i: usize| if i % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..n {
            for j in i.saturating_sub(5)..(i + 6).min(n) {
                let lhs = h.get(j, i);
                let rhs = sign(i) * h.get(i, j) * sign(j);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_guards() {
        let g = Grid::new(20.0, 0.05).unwrap();
        let mode = internal_mode(PowerParam::new(4.5).unwrap(), g, 0.78).unwrap();
        assert!(matches!(ShiftedSolver::new(&mode, 1.2), Err(Error::EmbeddedShift(_))));
        assert!(matches!(
            ShiftedSolver::new(&mode, mode.lambda + 1e-8),
            Err(Error::NearSingular { .. })
        ));
    }
}
