//! Numerical toolkit for the internal mode, refined profiles, Jost functions and
//! Fermi Golden Rule constants of 1D pure-power NLS ground states.

pub mod banded;
pub mod dynamics;
pub mod error;
pub mod fgr;
pub mod grid;
pub mod jost;
pub mod operators;
pub mod p3_oracle;
pub mod quadrature;
pub mod refined_profile;
pub mod soliton;
pub mod taylor;
pub mod volterra;

pub use error::{Error, Result};
pub use grid::{ComplexField, Field, Grid, RealField, Spinor};
pub use operators::InternalMode;
pub use soliton::PowerParam;
pub use taylor::TaylorCoeffs;
