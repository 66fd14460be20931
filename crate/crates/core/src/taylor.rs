//! Taylor coefficients of f(u) = |u|^{p-1} u around the ground state and the
//! bivariate polynomial expansion that produces the refined-profile sources.
//!
//! D^N f(phi)(w, ..., w) = sum_n a[N][n] phi^{p-N} w^{N-n} conj(w)^n.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Highest supported derivative order (f is only C^4 near u = 0 for p < 5).
pub const MAX_ORDER: usize = 4;

/// Table a[N][n], 0 <= n <= N <= order.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoeffs {
    /// Exponent p.
    pub p: f64,
    /// Highest order N stored.
    pub order: usize,
    /// Rows a[N][0..=N].
    pub table: Vec<Vec<f64>>,
}

impl TaylorCoeffs {
    /// Coefficient a[N][n]; zero outside the triangle.
    pub fn get(&self, big_n: usize, n: usize) -> f64 {
        if big_n > self.order || n > big_n {
            0.0
        } else {
            self.table[big_n][n]
        }
    }
}

/// One step of the recurrence, shared with tests that re-check it.
pub fn recurrence_step(p: f64, big_n: usize, n: usize, prev: &[f64]) -> f64 {
    let left = if n >= 1 { prev.get(n - 1).copied().unwrap_or(0.0) } else { 0.0 };
    let right = prev.get(n).copied().unwrap_or(0.0);
    (p + 1.0 - 2.0 * n as f64) / 2.0 * left + ((p + 3.0) / 2.0 + n as f64 - big_n as f64) * right
}

/// Builds the coefficient table up to `max_order` from a[0][0] = 1.
pub fn taylor_coeffs(p: f64, max_order: usize) -> Result<TaylorCoeffs> {
    if max_order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(max_order));
    }
    let mut table = vec![vec![1.0]];
    for big_n in 1..=max_order {
        let prev = &table[big_n - 1];
        let row = (0..=big_n).map(|n| recurrence_step(p, big_n, n, prev)).collect();
        table.push(row);
    }
    Ok(TaylorCoeffs {
        p,
        order: max_order,
        table,
    })
}

/// Multi-index (m1, m2) labelling the monomial z^{m1} conj(z)^{m2}.
pub type Index = (usize, usize);

/// Polynomial in (z, conj z) whose coefficients are sampled real functions,
/// truncated at a fixed total degree.
#[derive(Debug, Clone)]
pub struct FieldPoly {
    max_degree: usize,
    len: usize,
    terms: BTreeMap<Index, Vec<f64>>,
}

impl FieldPoly {
    /// Empty polynomial for fields of `len` samples.
    pub fn new(len: usize, max_degree: usize) -> Self {
        Self {
            max_degree,
            len,
            terms: BTreeMap::new(),
        }
    }

    /// Adds `c * v` to the coefficient of `m` (ignored above the truncation degree).
    pub fn add(&mut self, m: Index, c: f64, v: &[f64]) {
        if m.0 + m.1 > self.max_degree || c == 0.0 {
            return;
        }
        let len = self.len;
        let e = self.terms.entry(m).or_insert_with(|| vec![0.0; len]);
        for (a, b) in e.iter_mut().zip(v) {
            *a += c * b;
        }
    }

    /// Coefficient of `m`, zero when absent.
    pub fn coefficient(&self, m: Index) -> Vec<f64> {
        self.terms.get(&m).cloned().unwrap_or_else(|| vec![0.0; self.len])
    }

    /// Complex conjugate: swaps the roles of z and conj z.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::new(self.len, self.max_degree);
        for (&(a, b), v) in &self.terms {
            out.add((b, a), 1.0, v);
        }
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new(self.len, self.max_degree);
        for (&(a, b), u) in &self.terms {
            for (&(c, d), v) in &other.terms {
                let m = (a + c, b + d);
                if m.0 + m.1 > self.max_degree {
                    continue;
                }
                let prod: Vec<f64> = u.iter().zip(v).map(|(x, y)| x * y).collect();
                out.add(m, 1.0, &prod);
            }
        }
        out
    }

    /// The constant polynomial 1.
    pub fn one(len: usize, max_degree: usize) -> Self {
        let mut p = Self::new(len, max_degree);
        p.add((0, 0), 1.0, &vec![1.0; len]);
        p
    }

    /// Iterates over the stored coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&Index, &Vec<f64>)> {
        self.terms.iter()
    }
}

/// Sum over N = 2..=max_degree of D^N f(phi)(w^N) / N!, truncated at total degree
/// `max_degree`. `phi_powers[k]` must hold phi^{p-k} for k = 2..=max_degree.
pub fn nonlinear_expansion(
    coeffs: &TaylorCoeffs,
    w: &FieldPoly,
    phi_powers: &[Vec<f64>],
) -> FieldPoly {
    let len = w.len;
    let deg = w.max_degree;
    let wbar = w.conjugate();
    let mut w_pows = vec![FieldPoly::one(len, deg)];
    let mut wb_pows = vec![FieldPoly::one(len, deg)];
    for k in 1..=deg {
        w_pows.push(w_pows[k - 1].mul(w));
        wb_pows.push(wb_pows[k - 1].mul(&wbar));
    }
    let mut out = FieldPoly::new(len, deg);
    let mut factorial = 1.0;
    for big_n in 2..=deg.min(coeffs.order) {
        factorial *= big_n as f64;
        for n in 0..=big_n {
            let a = coeffs.get(big_n, n) / factorial;
            if a == 0.0 {
                continue;
            }
            let term = w_pows[big_n - n].mul(&wb_pows[n]);
            for (&m, v) in term.terms() {
                let weighted: Vec<f64> = v.iter().zip(&phi_powers[big_n]).map(|(x, y)| x * y).collect();
                out.add(m, a, &weighted);
            }
        }
    }
    out
}
