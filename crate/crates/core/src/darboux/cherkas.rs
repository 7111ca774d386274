//! Formal even-part test for the Liénard equation `y dy + (q + p y) dx = 0`
//! at the origin.
//!
//! With `Q = ∫₀ˣ q = Q₂x² + …` (`Q₂ ≠ 0`) there is a unique formal involution
//! `σ(x) = −x + …` with `Q∘σ = Q`. The origin is a Morse critical point iff
//! `P = ∫₀ˣ p` is `σ`-invariant as well.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactpoly::{int, Poly, Rational};

fn truncate(p: &Poly, n: usize) -> Poly {
    Poly::new(p.coeffs().iter().take(n + 1).cloned().collect())
}

/// `f∘g mod x^{n+1}`.
fn compose_trunc(f: &Poly, g: &Poly, n: usize) -> Poly {
    f.coeffs().iter().rev().fold(Poly::zero(), |acc, c| {
        truncate(&(&(&acc * g) + &Poly::constant(c.clone())), n)
    })
}

/// The involution fixing `Q`, to order `n`.
pub fn involution(big_q: &Poly, n: usize) -> Result<Poly> {
    let q2 = big_q.coeff(2);
    if !big_q.coeff(0).is_zero() || !big_q.coeff(1).is_zero() || q2.is_zero() {
        return Err(Error::InvalidInput(
            "Q must have a nondegenerate critical point at 0".into(),
        ));
    }
    let denom = -(&q2 * int(2));
    let mut sigma = vec![Rational::zero(), int(-1)];
    for m in 2..=n {
        sigma.push(Rational::zero());
        let partial = compose_trunc(big_q, &Poly::new(sigma.clone()), m + 1);
        sigma[m] = (big_q.coeff(m + 1) - partial.coeff(m + 1)) / &denom;
    }
    Ok(Poly::new(sigma))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvenPartVerdict {
    pub order: usize,
    /// Lowest power of `x` at which `P∘σ` and `P` differ.
    pub first_failure: Option<usize>,
    pub involution: Poly,
}

impl EvenPartVerdict {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `P∘σ ≡ P mod x^{n+1}`; requires `p(0) = q(0) = 0 ≠ q′(0)`.
pub fn even_part_check(p: &Poly, q: &Poly, n: usize) -> Result<EvenPartVerdict> {
    if !p.coeff(0).is_zero() {
        return Err(Error::InvalidInput("p(0) must vanish".into()));
    }
    let big_q = q.antiderivative();
    let big_p = p.antiderivative();
    let sigma = involution(&big_q, n)?;
    let moved = compose_trunc(&big_p, &sigma, n);
    let first_failure = (0..=n).find(|&i| moved.coeff(i) != big_p.coeff(i));
    Ok(EvenPartVerdict {
        order: n,
        first_failure,
        involution: sigma,
    })
}
