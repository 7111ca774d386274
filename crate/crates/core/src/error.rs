use thiserror::Error;

use crate::exactpoly::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// `divide_by_y_power` was asked to strip a nonzero low-order coefficient.
    #[error("series is not divisible by y^{power}: coefficient of y^{index} is nonzero")]
    Divisibility { power: usize, index: usize },

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("return-map coefficient c_{n} disagrees: word formula {word}, first-integral series {series}")]
    OracleMismatch {
        n: usize,
        word: Box<Rational>,
        series: Box<Rational>,
    },

    #[error("first Melnikov function is not certified zero: {0}")]
    M1NotZero(String),

    #[error("Françoise recursion is only implemented for order 2 (requested {0})")]
    UnsupportedOrder(usize),

    #[error("invalid base series: {0}")]
    InvalidBase(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("solution blew up near x = {x}")]
    BlowUp { x: f64 },

    #[error("integrator exceeded {0} steps")]
    MaxSteps(usize),

    #[error("certificate leg failed: {0}")]
    CertificateFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that indicate a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::OracleMismatch { .. } | Error::Divisibility { .. } | Error::CertificateFailed(_)
        )
    }
}
