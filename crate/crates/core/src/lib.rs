//! Exact symbolic tools for the center-focus problem of polynomial Abel
//! equations `dy/dx + Σ aᵢ(x) y^{i+1} = 0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactpoly`]: arbitrary-precision rationals and univariate polynomials.
//! * [`yseries`]: truncated power series in `y` with polynomial coefficients in `x`.
//! * [`iterint`]: exact iterated integrals of polynomial one-forms and shuffles.
//! * [`centers`]: return-map coefficients (composition-weighted word integrals),
//!   the first-integral series oracle, and center / universal-center checks.
//! * [`composition`]: polynomial right factors, composition condition and moments.
//! * [`melnikov`]: first and second bifurcation functions as series in `1/h`.
//! * [`darboux`]: Darboux first integrals, the `Pᵖ = Q^q` construction and the
//!   master Liénard family, including the non-universal center certificate.
//! * [`numeric`]: floating-point transport map and quadrature cross-checks.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod centers;
pub mod composition;
pub mod darboux;
pub mod error;
pub mod exactpoly;
pub mod iterint;
pub mod melnikov;
pub mod numeric;
pub mod par;
pub mod yseries;

pub use error::{Error, Result};
pub use exactpoly::{Poly, Rational};
pub use yseries::YSeries;
