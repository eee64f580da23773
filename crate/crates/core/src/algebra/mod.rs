//! Exact scalars and univariate polynomials over ℚ.

pub mod factor;
mod poly;
mod rational;

pub use poly::{determinant, sylvester_resultant, MobiusTransport, UniPoly};
pub use rational::{P1Value, Rational};
