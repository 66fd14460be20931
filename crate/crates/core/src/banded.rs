//! Banded matrices and their LU factorization with partial pivoting.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Field operations needed by the banded solver.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + PartialEq
    + std::fmt::Debug
{
    /// Additive identity.
    fn zero() -> Self;
    /// Modulus.
    fn modulus(self) -> f64;
    /// Embeds a real number.
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals.
/// Each row keeps `lower` extra slots on the right for pivoting fill-in.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// (lower, upper) bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let start = i as isize - self.lower as isize;
        let off = j as isize - start;
        if off < 0 || off >= self.width as isize || j >= self.n {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    /// Entry (i, j); zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Sets entry (i, j); panics outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let within = j + self.lower >= i && j <= i + self.upper;
        assert!(within && j < self.n, "entry ({i}, {j}) outside the band");
        let s = self.slot(i, j).expect("band slot");
        self.data[s] = v;
    }

    /// Adds to entry (i, j).
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).fold(T::zero(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// Returns A - shift * I.
    pub fn shifted(&self, shift: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.add(i, i, -shift);
        }
        out
    }

    /// Maps every entry through `f` into another scalar type.
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> BandedMatrix<U> {
        BandedMatrix {
            n: self.n,
            lower: self.lower,
            upper: self.upper,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// LU factorization with partial pivoting.
    pub fn factor(&self) -> Result<BandedLu<T>> {
        let mut a = self.clone();
        let n = a.n;
        let kl = a.lower;
        let reach = a.upper + a.lower;
        let mut pivots = vec![0usize; n];
        let mut max_pivot: f64 = 0.0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.get(k, k).modulus();
            for r in k + 1..=last {
                let m = a.get(r, k).modulus();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix(k));
            }
            max_pivot = max_pivot.max(best);
            min_pivot = min_pivot.min(best);
            pivots[k] = p;
            let col_end = (k + reach).min(n - 1);
            if p != k {
                for j in k..=col_end {
                    let a_k = a.get(k, j);
                    let a_p = a.get(p, j);
                    a.put(k, j, a_p);
                    a.put(p, j, a_k);
                }
            }
            let piv = a.get(k, k);
            for r in k + 1..=last {
                let l = a.get(r, k) / piv;
                if l == T::zero() {
                    a.put(r, k, l);
                    continue;
                }
                a.put(r, k, l);
                for j in k + 1..=col_end {
                    let u = a.get(k, j);
                    if u != T::zero() {
                        let v = a.get(r, j) - l * u;
                        a.put(r, j, v);
                    }
                }
            }
        }
        Ok(BandedLu {
            lu: a,
            pivots,
            pivot_ratio: max_pivot / min_pivot,
        })
    }

    fn put(&mut self, i: usize, j: usize, v: T) {
        if let Some(s) = self.slot(i, j) {
            self.data[s] = v;
        } else {
            debug_assert!(v == T::zero(), "fill-in outside storage at ({i}, {j})");
        }
    }
}

/// LU factors of a banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    lu: BandedMatrix<T>,
    pivots: Vec<usize>,
    pivot_ratio: f64,
}

impl<T: Scalar> BandedLu<T> {
    /// Ratio of the largest to the smallest pivot, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(b.len(), n);
        let kl = a.lower;
        let reach = a.upper + a.lower;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                x[r] = x[r] - a.get(r, k) * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s = s - a.get(k, j) * x[j];
            }
            x[k] = s / a.get(k, k);
        }
        x
    }
}
