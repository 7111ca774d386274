//! Truncated power series in `y` whose coefficients are polynomials in `x`.
//!
//! A [`YSeries`] carries its own truncation order `N`: every term of
//! `y`-degree above `N` is dropped, and binary operations produce the smaller
//! of the operands' orders. Bivariate polynomials are the special case
//! [`YSeries::UNTRUNCATED`], where nothing is ever dropped.
//!
//! One-forms `φ(x, y) dx` are represented by their coefficient `φ` alone.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{int, Poly, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YSeries {
    #[serde(
        default = "untruncated",
        skip_serializing_if = "is_untruncated"
    )]
    trunc: usize,
    coeffs: Vec<Poly>,
}

fn untruncated() -> usize {
    YSeries::UNTRUNCATED
}

fn is_untruncated(t: &usize) -> bool {
    *t == YSeries::UNTRUNCATED
}

impl YSeries {
    /// Truncation order meaning "exact polynomial in `y`".
    pub const UNTRUNCATED: usize = usize::MAX;

    pub fn new(coeffs: Vec<Poly>, trunc: usize) -> Self {
        let mut s = YSeries { trunc, coeffs };
        s.normalize();
        s
    }

    /// An exact bivariate polynomial `Σ coeffs[i](x) yⁱ`.
    pub fn exact(coeffs: Vec<Poly>) -> Self {
        Self::new(coeffs, Self::UNTRUNCATED)
    }

    pub fn zero(trunc: usize) -> Self {
        YSeries {
            trunc,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(p: Poly, trunc: usize) -> Self {
        Self::new(vec![p], trunc)
    }

    /// `c(x)·y^k`.
    pub fn monomial(c: Poly, k: usize, trunc: usize) -> Self {
        let mut coeffs = vec![Poly::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs, trunc)
    }

    /// The series `y`.
    pub fn y(trunc: usize) -> Self {
        Self::monomial(Poly::one(), 1, trunc)
    }

    fn normalize(&mut self) {
        if self.trunc != Self::UNTRUNCATED && self.coeffs.len() > self.trunc + 1 {
            self.coeffs.truncate(self.trunc + 1);
        }
        while self.coeffs.last().is_some_and(Poly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == Self::UNTRUNCATED
    }

    /// Same coefficients, new truncation order (dropping terms if it shrinks).
    pub fn with_trunc(&self, trunc: usize) -> Self {
        Self::new(self.coeffs.clone(), trunc)
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Coefficient of `y^i`.
    pub fn coeff(&self, i: usize) -> Poly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn y_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Largest `x`-degree among the coefficients.
    pub fn x_degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(Poly::degree).max()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|p| p.scale(c)).collect(), self.trunc)
    }

    /// Multiplies every coefficient by the `x`-polynomial `p`.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * p).collect(), self.trunc)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = YSeries::constant(Poly::one(), self.trunc);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// The operator `D = ∂/∂y`.
    pub fn dy(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&int(i as i64)))
            .collect();
        Self::new(coeffs, self.trunc)
    }

    /// `∂/∂x` applied coefficientwise.
    pub fn dx(&self) -> Self {
        Self::new(self.coeffs.iter().map(Poly::derivative).collect(), self.trunc)
    }

    /// Coefficientwise `x`-antiderivative with zero constant term.
    pub fn antiderivative_x(&self) -> Self {
        Self::new(
            self.coeffs.iter().map(Poly::antiderivative).collect(),
            self.trunc,
        )
    }

    /// Coefficientwise `∫_{x0}^{x}` with `y` held fixed.
    pub fn integrate_from(&self, x0: &Rational) -> Self {
        Self::new(
            self.coeffs.iter().map(|c| c.integrate_from(x0)).collect(),
            self.trunc,
        )
    }

    /// Evaluates every coefficient at `x`, giving the `y`-coefficients.
    pub fn eval_x(&self, x: &Rational) -> Vec<Rational> {
        self.coeffs.iter().map(|c| c.eval(x)).collect()
    }

    /// Same as [`eval_x`](Self::eval_x) but kept as a series with constant coefficients.
    pub fn at_x(&self, x: &Rational) -> Self {
        Self::new(
            self.coeffs.iter().map(|c| Poly::constant(c.eval(x))).collect(),
            self.trunc,
        )
    }

    /// Substitutes `x ↦ r(x)` in every coefficient.
    pub fn compose_x(&self, r: &Poly) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.compose(r)).collect(), self.trunc)
    }

    /// `y^m · self`; the truncation order grows by `m`.
    pub fn mul_by_y_power(&self, m: usize) -> Self {
        if self.is_zero() {
            return Self::zero(self.trunc.saturating_add(m));
        }
        let mut coeffs = vec![Poly::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs, self.trunc.saturating_add(m))
    }

    /// Exact division by `y^m`; fails if a coefficient below `y^m` is nonzero.
    pub fn divide_by_y_power(&self, m: usize) -> Result<Self> {
        if let Some(index) = self.coeffs.iter().take(m).position(|c| !c.is_zero()) {
            return Err(Error::Divisibility { power: m, index });
        }
        let trunc = if self.is_exact() {
            self.trunc
        } else {
            self.trunc.saturating_sub(m)
        };
        Ok(Self::new(self.coeffs.iter().skip(m).cloned().collect(), trunc))
    }

    /// `f(x, c0(x) + c1(x)·y)`.
    pub fn substitute_affine_y(&self, c0: &Poly, c1: &Poly) -> Self {
        let lin = YSeries::new(vec![c0.clone(), c1.clone()], self.trunc);
        self.coeffs.iter().rev().fold(YSeries::zero(self.trunc), |acc, c| {
            &(&acc * &lin) + &YSeries::constant(c.clone(), self.trunc)
        })
    }

    /// `y^d · f(x, 1/y)` for an exact polynomial of `y`-degree at most `d`.
    pub fn invert_y(&self, d: usize) -> Result<Self> {
        if !self.is_exact() {
            return Err(Error::InvalidInput(
                "y-inversion needs an exact polynomial".into(),
            ));
        }
        if self.coeffs.len() > d + 1 {
            return Err(Error::InvalidInput(format!(
                "y-degree {} exceeds inversion degree {d}",
                self.coeffs.len() - 1
            )));
        }
        let mut coeffs = vec![Poly::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c.clone();
        }
        Ok(Self::exact(coeffs))
    }

    /// Returns `Some(c)` if `self = c·other` for a rational `c`.
    pub fn proportionality(&self, other: &YSeries) -> Option<Rational> {
        if other.is_zero() {
            return self.is_zero().then(Rational::zero);
        }
        let (i, oc) = other
            .coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())?;
        let lead = oc.leading_coeff();
        let deg = oc.degree()?;
        let c = self.coeff(i).coeff(deg) / lead;
        (other.scale(&c) == self.with_trunc(other.trunc.min(self.trunc))).then_some(c)
    }
}

impl Add for &YSeries {
    type Output = YSeries;
    fn add(self, rhs: &YSeries) -> YSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => Poly::zero(),
            })
            .collect();
        YSeries::new(coeffs, self.trunc.min(rhs.trunc))
    }
}

impl Sub for &YSeries {
    type Output = YSeries;
    fn sub(self, rhs: &YSeries) -> YSeries {
        self + &(-rhs)
    }
}

impl Neg for &YSeries {
    type Output = YSeries;
    fn neg(self) -> YSeries {
        YSeries {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &YSeries {
    type Output = YSeries;
    fn mul(self, rhs: &YSeries) -> YSeries {
        let trunc = self.trunc.min(rhs.trunc);
        if self.is_zero() || rhs.is_zero() {
            return YSeries::zero(trunc);
        }
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = if trunc == YSeries::UNTRUNCATED {
            full
        } else {
            full.min(trunc + 1)
        };
        let mut coeffs = vec![Poly::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        YSeries::new(coeffs, trunc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for YSeries {
            type Output = YSeries;
            fn $m(self, rhs: YSeries) -> YSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for YSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YSeries({self})")
    }
}

impl fmt::Display for YSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*y")?,
                _ => write!(f, "({c})*y^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            write!(f, " + O(y^{})", self.trunc + 1)?;
        }
        Ok(())
    }
}

/// Helper for tests and fixtures: a series from integer coefficient lists.
pub fn yseries_from_ints(coeffs: &[&[i64]], trunc: usize) -> YSeries {
    YSeries::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect(), trunc)
}

impl YSeries {
    /// `true` when every coefficient is a rational constant.
    pub fn is_x_free(&self) -> bool {
        self.coeffs.iter().all(Poly::is_constant)
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(Poly::one(), trunc)
    }

    /// Coefficient of `x^j y^i`.
    pub fn term(&self, i: usize, j: usize) -> Rational {
        self.coeffs.get(i).map(|c| c.coeff(j)).unwrap_or_else(Rational::zero)
    }

    /// `f(x, 0) ≡ 0`.
    pub fn vanishes_at_y0(&self) -> bool {
        self.coeff(0).is_zero()
    }
}
