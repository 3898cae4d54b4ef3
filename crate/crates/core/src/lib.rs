//! Exact moduli functions for Toda-type master equations of composite
//! fluxbrane and S-brane solutions.
//!
//! The pipeline runs from a declarative brane model ([`brane`]) through the
//! quasi-Cartan matrix to the moduli polynomials `H_s(z)` ([`toda`]), then to
//! the metric, scalar and form data of the solution ([`profile`]). The
//! [`numeric`] module re-derives `H_s` by direct ODE integration as an
//! independent check.

pub mod brane;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod profile;
pub mod rational;
pub mod series;
pub mod toda;

pub use matrix::RationalMatrix;
pub use poly::ParamPoly;
pub use rational::Rational;
pub use series::TruncatedSeries;
