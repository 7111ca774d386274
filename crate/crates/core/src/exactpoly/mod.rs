//! Exact rational scalars and univariate polynomials over them.

mod poly;
mod rational;

pub use poly::Poly;
pub use rational::{format_rational, int, parse_rational, rat, serde_rational, Rational};
