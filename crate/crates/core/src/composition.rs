//! Functional decomposition of univariate polynomials and the polynomial
//! moment problem.
//!
//! A right factor of degree `d` of `P` (with `d | deg P`) is found by
//! undetermined coefficients from the top: writing `P = P̃∘W` with `W` monic
//! and `W(0) = 0`, the top `d` coefficients of `P / lc(P)` coincide with those
//! of `W^e` (`e = deg P / d`), and each fixes one coefficient of `W`. The left
//! factor is then read off as the `W`-adic digits of `P`, and the candidate
//! is accepted only if it recomposes exactly.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::exactpoly::{int, Poly, Rational};
use crate::iterint::Interval;
use crate::par;

/// Common right composition factor of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionResult {
    /// Monic, zero constant term, degree `≥ 2`.
    pub w: Poly,
    pub left_p: Poly,
    pub left_q: Poly,
    /// `W(x0) = W(x1)`.
    pub closes: bool,
}

/// Canonical right factor of degree `d`: `P = P̃∘W`, `W` monic with `W(0) = 0`.
///
/// `d = deg P` is accepted and gives the trivial factor `W = (P − P(0))/lc(P)`.
pub fn right_factor(p: &Poly, d: usize) -> Option<(Poly, Poly)> {
    let n = p.degree()?;
    if d < 2 || d > n || n % d != 0 {
        return None;
    }
    let e = n / d;
    let lead = p.leading_coeff();
    let target = p.scale(&lead.recip());

    let mut w = vec![Rational::zero(); d + 1];
    w[d] = int(1);
    for j in 1..d {
        // coefficient of x^{n-j} in W^e is e·w_{d-j} + (terms in w_{d-1}, …, w_{d-j+1})
        let current = Poly::new(w.clone()).pow(e as u32).coeff(n - j);
        w[d - j] = (target.coeff(n - j) - current) / int(e as i64);
    }
    let w = Poly::new(w);

    let left = w_adic_digits(p, &w, e)?;
    (left.compose(&w) == *p).then_some((w, left))
}

/// Writes `p = Σ bᵢ wⁱ` with rational `bᵢ`, if possible.
fn w_adic_digits(p: &Poly, w: &Poly, e: usize) -> Option<Poly> {
    let mut digits = Vec::with_capacity(e + 1);
    let mut rest = p.clone();
    for _ in 0..=e {
        let (q, r) = rest.div_rem(w);
        if !r.is_constant() {
            return None;
        }
        digits.push(r.coeff(0));
        rest = q;
    }
    rest.is_zero().then(|| Poly::new(digits))
}

/// Divisors `d ≥ 2` of `n` in decreasing order.
fn divisors_desc(n: usize) -> Vec<usize> {
    (2..=n).rev().filter(|d| n.is_multiple_of(*d)).collect()
}

/// Largest common right factor of `P` and `Q`, tried over the divisors of
/// `gcd(deg P, deg Q)` in decreasing order.
pub fn common_factor(p: &Poly, q: &Poly, iv: &Interval) -> Option<DecompositionResult> {
    let (dp, dq) = (p.degree()?, q.degree()?);
    if dp < 2 || dq < 2 {
        return None;
    }
    let candidates = divisors_desc(dp.gcd(&dq));
    par::find_first(&candidates, |&d| {
        let (wp, left_p) = right_factor(p, d)?;
        let (wq, left_q) = right_factor(q, d)?;
        (wp == wq).then(|| {
            let closes = wp.eval(&iv.x0) == wp.eval(&iv.x1);
            DecompositionResult {
                w: wp,
                left_p,
                left_q,
                closes,
            }
        })
    })
}

/// `m_k = ∫_{x0}^{x1} q·A^k dx` for `k = 0..=kmax`.
pub fn moments(q: &Poly, a: &Poly, iv: &Interval, kmax: usize) -> Vec<Rational> {
    let mut integrands = Vec::with_capacity(kmax + 1);
    let mut cur = q.clone();
    for k in 0..=kmax {
        integrands.push(cur.clone());
        if k < kmax {
            cur = &cur * a;
        }
    }
    par::map(&integrands, |f| f.definite_integral(&iv.x0, &iv.x1))
}

/// Default moment cutoff `deg A · (deg Q + 1)`, with `Q = ∫q`. Heuristic:
/// there is no known general sufficiency bound.
pub fn default_kmax(q: &Poly, a: &Poly) -> usize {
    let da = a.degree().unwrap_or(0);
    let dq = q.antiderivative().degree().unwrap_or(0);
    (da * (dq + 1)).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum PccVerdict {
    /// `A = Ã∘W`, `B = B̃∘W` with `W(x0) = W(x1)`.
    #[serde(rename = "PCC")]
    Pcc { w: Poly, left_a: Poly, left_b: Poly },
    #[serde(rename = "NoPCC")]
    NoPcc,
}

impl PccVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PccVerdict::Pcc { .. })
    }
}

/// Canonical form `(P − P(0)) / lc(P)`.
pub fn canonical(p: &Poly) -> Poly {
    let shifted = p - &Poly::constant(p.coeff(0));
    shifted.monic()
}

/// A monic quadratic with zero constant term that closes on the interval.
fn closing_quadratic(iv: &Interval) -> Poly {
    Poly::new(vec![int(0), -(&iv.x0 + &iv.x1), int(1)])
}

/// Left factor expressing `p` through `w` (any degree), if it exists.
fn left_factor_through(p: &Poly, w: &Poly) -> Option<Poly> {
    let dw = w.degree()?;
    if dw == 0 {
        return p.is_constant().then(|| p.clone());
    }
    let dp = p.degree().unwrap_or(0);
    if !dp.is_multiple_of(dw) {
        return None;
    }
    let left = w_adic_digits(p, w, dp / dw)?;
    (left.compose(w) == *p).then_some(left)
}

/// Decides the composition condition for `(A, B)` on the interval.
///
/// Degenerate cases: if both are constant any closing `W` works; if exactly
/// one is constant, `W` is the canonical form of the other and must close.
/// On a degenerate interval every `W` closes, so `W = x` is returned when no
/// higher-degree factor exists.
pub fn pcc_check(a: &Poly, b: &Poly, iv: &Interval) -> PccVerdict {
    let closes = |w: &Poly| w.eval(&iv.x0) == w.eval(&iv.x1);
    match (a.is_constant(), b.is_constant()) {
        (true, true) => {
            let w = closing_quadratic(iv);
            return PccVerdict::Pcc {
                left_a: a.clone(),
                left_b: b.clone(),
                w,
            };
        }
        (true, false) | (false, true) => {
            let other = if a.is_constant() { b } else { a };
            let w = canonical(other);
            if !closes(&w) {
                return PccVerdict::NoPcc;
            }
            let left_a = left_factor_through(a, &w).expect("w is a right factor");
            let left_b = left_factor_through(b, &w).expect("w is a right factor");
            return PccVerdict::Pcc { w, left_a, left_b };
        }
        (false, false) => {}
    }
    if let Some(dec) = common_factor(a, b, iv) {
        if dec.closes {
            return PccVerdict::Pcc {
                w: dec.w,
                left_a: dec.left_p,
                left_b: dec.left_q,
            };
        }
    }
    if iv.is_degenerate() {
        return PccVerdict::Pcc {
            w: Poly::x(),
            left_a: a.clone(),
            left_b: b.clone(),
        };
    }
    PccVerdict::NoPcc
}

/// Whether `a = A'` is nonzero at both endpoints, the genericity hypothesis
/// under which vanishing moments force the composition condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndpointHypothesis {
    pub nonzero_at_x0: bool,
    pub nonzero_at_x1: bool,
}

impl EndpointHypothesis {
    pub fn of(big_a: &Poly, iv: &Interval) -> Self {
        let a = big_a.derivative();
        EndpointHypothesis {
            nonzero_at_x0: !a.eval(&iv.x0).is_zero(),
            nonzero_at_x1: !a.eval(&iv.x1).is_zero(),
        }
    }

    pub fn holds(&self) -> bool {
        self.nonzero_at_x0 && self.nonzero_at_x1
    }
}
