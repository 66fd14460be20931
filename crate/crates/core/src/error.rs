//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter lies outside the admissible domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    /// Sampled data contains NaN or infinity, or has the wrong shape.
    #[error("invalid data: {0}")]
    Data(String),
    /// The requested Taylor order is not supported.
    #[error("unsupported Taylor order {0} (maximum is 4)")]
    UnsupportedOrder(usize),
    /// An iteration did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    /// A computed eigenvalue falls outside (0, 1).
    #[error("eigenvalue {0} outside the spectral window (0, 1)")]
    SpectralWindow(f64),
    /// The symplectic pairing of a mode vanishes.
    #[error("degenerate mode: symplectic pairing {0:e}")]
    DegenerateMode(f64),
    /// No sign change was found on the bracketing interval.
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    /// A shifted solve was requested too close to a discrete eigenvalue.
    #[error("shift {shift} within {distance:e} of the eigenvalue {eigenvalue}")]
    NearSingular { shift: f64, eigenvalue: f64, distance: f64 },
    /// A shifted solve was requested inside the continuous spectrum.
    #[error("shift {0} lies in the continuous spectrum [1, inf)")]
    EmbeddedShift(f64),
    /// A banded factorization met a zero pivot.
    #[error("singular banded matrix at row {0}")]
    SingularMatrix(usize),
    /// A linear system is too ill-conditioned to trust.
    #[error("ill-conditioned system (estimate {0:e})")]
    IllConditioned(f64),
    /// The wavenumber lies outside the strip where the Jost function exists.
    #[error("wavenumber {re}+{im}i outside the admissible strip")]
    Strip { re: f64, im: f64 },
    /// The second component of f3 nearly vanishes, so the f1 kernel is singular.
    #[error("kernel singularity: |f3 second component| = {value:e} at x = {x}")]
    KernelSingularity { x: f64, value: f64 },
    /// The scattering determinant vanishes at an embedded energy.
    #[error("embedded eigenvalue candidate: |det D| = {0:e}")]
    EmbeddedEigenvalue(f64),
    /// The time stepper blew up.
    #[error("instability at t = {0}")]
    Instability(f64),
    /// Newton iteration for the modulation parameters diverged.
    #[error("modulation decomposition failed: {0}")]
    OutOfTube(String),
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
