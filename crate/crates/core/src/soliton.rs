//! Ground-state profile, its scaling family, the matrix potential of H and the
//! conserved mass and energy.

use crate::error::{Error, Result};
use crate::grid::{derivative, ComplexField, Grid, RealField};
use crate::quadrature::{simpson, tails_negligible};

/// Exponent of the pure-power nonlinearity |u|^{p-1} u, restricted to 1 < p < 5.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerParam(f64);

impl PowerParam {
    /// Validates 1 < p < 5.
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 && p < 5.0 {
            Ok(Self(p))
        } else {
            Err(Error::Domain(format!("p = {p} outside (1, 5)")))
        }
    }

    /// The exponent.
    pub fn value(self) -> f64 {
        self.0
    }
}

/// ln sech(y), accurate for large |y|.
pub fn ln_sech(y: f64) -> f64 {
    let a = y.abs();
    -a + std::f64::consts::LN_2 - (-2.0 * a).exp().ln_1p()
}

/// sech(y) without overflow.
pub fn sech(y: f64) -> f64 {
    ln_sech(y).exp()
}

/// Pointwise ground state with omega = 1.
pub fn phi(p: f64, x: f64) -> f64 {
    let q = p - 1.0;
    (((p + 1.0) / 2.0).ln() / q + 2.0 / q * ln_sech(q * x / 2.0)).exp()
}

/// phi^{p-1} = (p+1)/2 sech^2((p-1)x/2), evaluated directly.
pub fn phi_pow_q(p: f64, x: f64) -> f64 {
    let s = sech((p - 1.0) * x / 2.0);
    (p + 1.0) / 2.0 * s * s
}

/// First derivative of the omega = 1 ground state.
pub fn phi_prime(p: f64, x: f64) -> f64 {
    -((p - 1.0) * x / 2.0).tanh() * phi(p, x)
}

/// Second derivative from the static equation: phi'' = phi - phi^p.
pub fn phi_second(p: f64, x: f64) -> f64 {
    let f = phi(p, x);
    f - f * phi_pow_q(p, x)
}

/// Generator of the scaling family at omega = 1: (x d/dx / 2 + 1/(p-1)) phi.
pub fn lambda_p_phi(p: f64, x: f64) -> f64 {
    0.5 * x * phi_prime(p, x) + phi(p, x) / (p - 1.0)
}

/// Samples phi_omega(x) = omega^{1/(p-1)} phi(sqrt(omega) x).
pub fn soliton_profile(p: PowerParam, omega: f64, grid: Grid) -> Result<RealField> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!("omega = {omega} must be positive")));
    }
    let p = p.value();
    let scale = omega.powf(1.0 / (p - 1.0));
    let root = omega.sqrt();
    Ok(RealField::from_fn(grid, |x| scale * phi(p, root * x)))
}

/// 2x2 potential of H sampled per node: V = M0 sech^2((p-1)x/2).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrix {
    /// Entry (1,1): -(p+1)^2/4 sech^2.
    pub v11: Vec<f64>,
    /// Entry (1,2): -(p^2-1)/4 sech^2.
    pub v12: Vec<f64>,
    /// Entry (2,1): +(p^2-1)/4 sech^2.
    pub v21: Vec<f64>,
    /// Entry (2,2): +(p+1)^2/4 sech^2.
    pub v22: Vec<f64>,
}

/// Entries (v11, v12, v21, v22) of the potential at a point.
pub fn potential_at(p: f64, x: f64) -> [f64; 4] {
    let w = phi_pow_q(p, x);
    let a = (p + 1.0) / 2.0 * w;
    let b = (p - 1.0) / 2.0 * w;
    [-a, -b, b, a]
}

/// Samples the potential of H on the grid.
pub fn potential_matrix(p: PowerParam, grid: Grid) -> PotentialMatrix {
    let n = grid.len();
    let mut v = PotentialMatrix {
        v11: Vec::with_capacity(n),
        v12: Vec::with_capacity(n),
        v21: Vec::with_capacity(n),
        v22: Vec::with_capacity(n),
    };
    for j in 0..n {
        let [a, b, c, d] = potential_at(p.value(), grid.x(j));
        v.v11.push(a);
        v.v12.push(b);
        v.v21.push(c);
        v.v22.push(d);
    }
    v
}

/// Outcome of a conserved-quantity evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functional {
    /// The value.
    pub value: f64,
    /// False when the integrand is not negligible at the ends of the grid.
    pub tails_ok: bool,
}

/// Mass Q(u) = 1/2 of the integral of |u|^2.
pub fn mass(u: &ComplexField) -> Result<Functional> {
    u.check_finite()?;
    let dens: Vec<f64> = u.values.iter().map(|z| 0.5 * z.norm_sqr()).collect();
    Ok(Functional {
        value: simpson(&dens, u.grid.spacing()),
        tails_ok: tails_negligible(&dens),
    })
}

/// Energy E(u) = 1/2 of the integral of |u'|^2 minus that of |u|^{p+1}/(p+1).
pub fn energy(p: PowerParam, u: &ComplexField) -> Result<Functional> {
    u.check_finite()?;
    let h = u.grid.spacing();
    let p = p.value();
    let re: Vec<f64> = u.values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = u.values.iter().map(|z| z.im).collect();
    let dre = derivative(&re, h);
    let dim = derivative(&im, h);
    let dens: Vec<f64> = (0..re.len())
        .map(|j| {
            let a = u.values[j].norm();
            0.5 * (dre[j] * dre[j] + dim[j] * dim[j]) - a.powf(p + 1.0) / (p + 1.0)
        })
        .collect();
    Ok(Functional {
        value: simpson(&dens, h),
        tails_ok: tails_negligible(&dens),
    })
}
