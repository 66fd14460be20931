//! Uniform symmetric lattice on [-L, L] and the sampled fields living on it.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default half-length of the computational interval.
pub const DEFAULT_HALF_LENGTH: f64 = 50.0;
/// Default node spacing.
pub const DEFAULT_SPACING: f64 = 0.005;

/// Symmetric uniform grid with an odd number of nodes, so that x = 0 is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_length: f64,
    spacing: f64,
    nodes: usize,
}

impl Grid {
    /// Builds the grid on [-L, L] with spacing `h`; `L / h` must be an integer.
    pub fn new(half_length: f64, spacing: f64) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0 && spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Domain(format!(
                "grid needs L > 0 and h > 0, got L = {half_length}, h = {spacing}"
            )));
        }
        let ratio = half_length / spacing;
        let m = ratio.round();
        if (ratio - m).abs() > 1e-9 * ratio.max(1.0) || m < 2.0 {
            return Err(Error::Domain(format!(
                "L / h = {ratio} must be an integer >= 2"
            )));
        }
        let m = m as usize;
        Ok(Self {
            half_length: m as f64 * spacing,
            spacing,
            nodes: 2 * m + 1,
        })
    }

    /// The default grid (L = 50, h = 0.005).
    pub fn default_grid() -> Self {
        Self::new(DEFAULT_HALF_LENGTH, DEFAULT_SPACING).expect("default grid is valid")
    }

    /// Half-length L.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Node spacing h.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of nodes N (odd).
    pub fn len(&self) -> usize {
        self.nodes
    }

    /// Always false: a grid has at least five nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node x = 0.
    pub fn center(&self) -> usize {
        self.nodes / 2
    }

    /// Coordinate of node `j`; exactly antisymmetric about the center.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.center() as f64) * self.spacing
    }

    /// All node coordinates.
    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.nodes).map(|j| self.x(j)).collect()
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let j = (x / self.spacing).round() + self.center() as f64;
        j.clamp(0.0, (self.nodes - 1) as f64) as usize
    }

    /// Grid with the same spacing and a larger half-length.
    pub fn with_half_length(&self, half_length: f64) -> Result<Self> {
        let m = (half_length / self.spacing).ceil();
        Self::new(m * self.spacing, self.spacing)
    }
}

/// Samples of a scalar function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    /// The grid the samples live on.
    pub grid: Grid,
    /// One sample per node.
    pub values: Vec<T>,
}

/// Real sampled function.
pub type RealField = Field<f64>;
/// Complex sampled function.
pub type ComplexField = Field<Complex64>;

impl<T: Copy> Field<T> {
    /// Wraps samples, checking the count against the grid.
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Data(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> T) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    /// Value at the node x = 0.
    pub fn at_center(&self) -> T {
        self.values[self.grid.center()]
    }
}

impl RealField {
    /// Largest deviation |v_j - v_{N-1-j}| from even symmetry.
    pub fn even_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|j| (self.values[j] - self.values[n - 1 - j]).abs())
            .fold(0.0, f64::max)
    }

    /// Sup norm.
    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    /// Returns an error if any sample is not finite.
    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Data("non-finite sample".into()))
        }
    }
}

impl ComplexField {
    /// Returns an error if any sample is not finite.
    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Data("non-finite sample".into()))
        }
    }
}

/// Two-component real function, the (f_1, f_2) pairs acted on by H.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    /// First component.
    pub first: RealField,
    /// Second component.
    pub second: RealField,
}

impl Spinor {
    /// Pairs two fields, checking that they share a grid.
    pub fn new(first: RealField, second: RealField) -> Result<Self> {
        if first.grid != second.grid {
            return Err(Error::Data("spinor components on different grids".into()));
        }
        Ok(Self { first, second })
    }

    /// The zero spinor.
    pub fn zeros(grid: Grid) -> Self {
        Self {
            first: Field::from_fn(grid, |_| 0.0),
            second: Field::from_fn(grid, |_| 0.0),
        }
    }

    /// Grid shared by both components.
    pub fn grid(&self) -> Grid {
        self.first.grid
    }

    /// Interleaves the components as (a_0, b_0, a_1, b_1, ...).
    pub fn interleaved(&self) -> Vec<f64> {
        self.first
            .values
            .iter()
            .zip(&self.second.values)
            .flat_map(|(a, b)| [*a, *b])
            .collect()
    }

    /// Inverse of [`Spinor::interleaved`].
    pub fn from_interleaved(grid: Grid, v: &[f64]) -> Result<Self> {
        if v.len() != 2 * grid.len() {
            return Err(Error::Data("interleaved vector has the wrong length".into()));
        }
        let a = v.iter().step_by(2).copied().collect();
        let b = v.iter().skip(1).step_by(2).copied().collect();
        Ok(Self {
            first: Field { grid, values: a },
            second: Field { grid, values: b },
        })
    }

    /// Sup norm over both components.
    pub fn sup_norm(&self) -> f64 {
        self.first.sup_norm().max(self.second.sup_norm())
    }
}

/// Largest absolute value of a slice.
pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Euclidean norm of a slice.
pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fourth-order first derivative; one-sided fourth-order formulas at the ends.
pub fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    assert!(n >= 5, "derivative needs at least five samples");
    let mut d = vec![0.0; n];
    for j in 2..n - 2 {
        d[j] = (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]) / (12.0 * h);
    }
    let fwd = |s: &[f64]| (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
    let fwd1 = |s: &[f64]| (-3.0 * s[0] - 10.0 * s[1] + 18.0 * s[2] - 6.0 * s[3] + s[4]) / (12.0 * h);
    d[0] = fwd(&v[0..5]);
    d[1] = fwd1(&v[0..5]);
    let r: Vec<f64> = v[n - 5..].iter().rev().copied().collect();
    d[n - 1] = -fwd(&r);
    d[n - 2] = -fwd1(&r);
    d
}

/// Fourth-order second difference with zero extension beyond the ends
/// (the homogeneous Dirichlet operator used by the banded discretizations).
pub fn second_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let at = |j: isize| if j < 0 || j >= n as isize { 0.0 } else { v[j as usize] };
    let c = 1.0 / (h * h);
    (0..n as isize)
        .map(|j| {
            c * (-(at(j - 2) + at(j + 2)) / 12.0 + 4.0 / 3.0 * (at(j - 1) + at(j + 1)) - 2.5 * at(j))
        })
        .collect()
}

/// Cubic Lagrange interpolation of grid samples at an arbitrary point;
/// returns 0 outside [-L, L].
pub fn interpolate(field: &RealField, x: f64) -> f64 {
    let g = field.grid;
    let n = g.len();
    let t = x / g.spacing() + g.center() as f64;
    if t < 0.0 || t > (n - 1) as f64 {
        return 0.0;
    }
    let i = (t.floor() as usize).clamp(1, n - 3);
    let s = t - i as f64;
    let v = &field.values;
    let (a, b, c, d) = (v[i - 1], v[i], v[i + 1], v[i + 2]);
    -s * (s - 1.0) * (s - 2.0) / 6.0 * a + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * b
        - (s + 1.0) * s * (s - 2.0) / 2.0 * c
        + (s + 1.0) * s * (s - 1.0) / 6.0 * d
}
