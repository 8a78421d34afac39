//! High-precision evaluation of the magnetic double integral `I2(f)`, the
//! weight-4 modular form behind it, and the arithmetic of its Fourier
//! coefficients.
//!
//! The crate is organised around the objects it computes:
//!
//! - [`precision`]: arbitrary-precision reals/complexes, AGM, gamma values;
//! - [`series`]: exact truncated power series over integers, rationals and
//!   [`piquad::PiQuadratic`] coefficients, with the operator `L`;
//! - [`integral`]: evaluation of `I2(f)` on the whole real line, its exact
//!   series data, and the series-level differential-equation checks;
//! - [`modular`]: eta quotients, the form `phi(tau)`, its Fourier
//!   coefficients `A(n)`, and CM special values;
//! - [`asymptotics`]: the exponential model for `A(n)` and the congruence
//!   arithmetic locating its singularities;
//! - [`laurent`]: the Laurent expansion of `phi` at its double pole and the
//!   rational coefficients `c_n`;
//! - [`certificates`]: exact-rational verification of the telescoping
//!   machinery behind the differential equation.

pub mod asymptotics;
pub mod certificates;
pub mod error;
pub mod integral;
pub mod laurent;
pub mod modular;
pub mod piquad;
pub mod precision;
pub mod qsqrt2;
pub mod quadrature;
pub mod report;
pub mod series;

pub use error::{MagError, Result};
pub use precision::{BigComplex, BigReal, Ctx, PrecisionContext, RealOps};
