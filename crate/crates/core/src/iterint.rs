//! Exact iterated integrals of polynomial one-forms.
//!
//! Word convention: the leftmost form is the outermost integrand,
//!
//! ```text
//! ∫_{x0}^{x} ω_n ω_{n-1} … ω_1 = ∫_{x0}^{x} φ_n(t) (∫_{x0}^{t} ω_{n-1} … ω_1) dt
//! ```
//!
//! so `[ω_1, …, ω_n]` integrates over `x0 ≤ t_n ≤ … ≤ t_1 ≤ x` with `ω_1` at
//! `t_1`. This is the reverse of Chen's ordering. Evaluation is symbolic: the
//! inner integral is kept as a polynomial in its running upper limit.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactpoly::{serde_rational, Poly, Rational};
use crate::yseries::YSeries;

/// An ordered word of polynomial one-forms `fᵢ(x) dx`, leftmost outermost.
/// The empty word integrates to one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Poly>);

impl Word {
    pub fn new(forms: Vec<Poly>) -> Self {
        Word(forms)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn forms(&self) -> &[Poly] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }
}

/// Oriented integration interval; `x0 > x1` and `x0 == x1` are both allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "serde_rational")]
    pub x0: Rational,
    #[serde(with = "serde_rational")]
    pub x1: Rational,
}

impl Interval {
    pub fn new(x0: Rational, x1: Rational) -> Self {
        Interval { x0, x1 }
    }

    pub fn reversed(&self) -> Self {
        Interval::new(self.x1.clone(), self.x0.clone())
    }

    pub fn is_degenerate(&self) -> bool {
        self.x0 == self.x1
    }
}

/// `∫_{x0}^{x} w` as a polynomial in the upper limit `x`.
pub fn running_integral(w: &[Poly], x0: &Rational) -> Poly {
    w.iter()
        .rev()
        .fold(Poly::one(), |inner, form| (form * &inner).integrate_from(x0))
}

/// `∫_{x0}^{x1} w`, exact.
pub fn iterated_integral(w: &Word, iv: &Interval) -> Rational {
    running_integral(&w.0, &iv.x0).eval(&iv.x1)
}

/// Iterated integral of forms whose coefficients depend polynomially on a
/// parameter `y` (held fixed). Returns the result as a series in `y` with
/// constant coefficients, truncated at the smallest order among the forms.
pub fn iterated_integral_series(w: &[YSeries], iv: &Interval) -> YSeries {
    let trunc = w
        .iter()
        .map(YSeries::trunc)
        .min()
        .unwrap_or(YSeries::UNTRUNCATED);
    w.iter()
        .rev()
        .fold(YSeries::one(trunc), |inner, form| {
            (form * &inner).integrate_from(&iv.x0)
        })
        .at_x(&iv.x1)
}

/// All riffle interleavings of `a` and `b` that keep each word's internal
/// order. There are `C(|a|+|b|, |a|)` of them, counted with multiplicity.
pub fn shuffle_product<T: Clone>(a: &[T], b: &[T]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return vec![b.to_vec()];
    }
    if b.is_empty() {
        return vec![a.to_vec()];
    }
    let mut out = Vec::new();
    for mut tail in shuffle_product(&a[1..], b) {
        tail.insert(0, a[0].clone());
        out.push(tail);
    }
    for mut tail in shuffle_product(a, &b[1..]) {
        tail.insert(0, b[0].clone());
        out.push(tail);
    }
    out
}

/// Sum of `∫w` over every interleaving of `w1` and `w2`.
pub fn shuffle_sum(w1: &Word, w2: &Word, iv: &Interval) -> Rational {
    shuffle_product(&w1.0, &w2.0)
        .into_iter()
        .map(|w| iterated_integral(&Word(w), iv))
        .fold(Rational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{int, rat};

    fn unit() -> Interval {
        Interval::new(int(0), int(1))
    }

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn plain_integral() {
        assert_eq!(iterated_integral(&Word(vec![p(&[0, 2])]), &unit()), int(1));
    }

    #[test]
    fn repeated_form_is_half_square() {
        let w = Word(vec![p(&[0, 2]), p(&[0, 2])]);
        assert_eq!(iterated_integral(&w, &unit()), rat(1, 2));
    }

    #[test]
    fn outer_form_is_leftmost() {
        // ∫₀¹ t·(∫₀ᵗ 1 ds) dt = 1/3, whereas ∫₀¹ 1·(∫₀ᵗ s ds) dt = 1/6
        assert_eq!(
            iterated_integral(&Word(vec![p(&[0, 1]), p(&[1])]), &unit()),
            rat(1, 3)
        );
        assert_eq!(
            iterated_integral(&Word(vec![p(&[1]), p(&[0, 1])]), &unit()),
            rat(1, 6)
        );
    }

    #[test]
    fn empty_word_and_degenerate_interval() {
        assert_eq!(iterated_integral(&Word::empty(), &unit()), int(1));
        let iv = Interval::new(rat(2, 3), rat(2, 3));
        let w = Word(vec![p(&[1, 2]), p(&[3, 0, 1]), p(&[-1])]);
        assert!(iterated_integral(&w, &iv).is_zero());
    }

    #[test]
    fn shuffle_interleavings() {
        assert_eq!(shuffle_product(&['a'], &['b']), vec![vec!['a', 'b'], vec!['b', 'a']]);
        assert_eq!(shuffle_product(&['a'], &[]), vec![vec!['a']]);
        let mut s = shuffle_product(&['a', 'b'], &['c']);
        s.sort();
        assert_eq!(
            s,
            vec![vec!['a', 'b', 'c'], vec!['a', 'c', 'b'], vec!['c', 'a', 'b']]
        );
        assert_eq!(shuffle_product(&[1, 2, 3], &[4, 5]).len(), 10);
    }

    #[test]
    fn series_integral_matches_scalar_at_fixed_y() {
        // forms (1 + y x) and (y²) at y = 3 must agree with the scalar version.
        let f1 = YSeries::exact(vec![Poly::one(), Poly::x()]);
        let f2 = YSeries::exact(vec![Poly::zero(), Poly::zero(), Poly::one()]);
        let s = iterated_integral_series(&[f1, f2], &unit());
        let y = int(3);
        let val = s
            .eval_x(&int(0))
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, c)| acc + c * num_traits::pow(y.clone(), i));
        let scalar = iterated_integral(&Word(vec![p(&[1, 3]), p(&[9])]), &unit());
        assert_eq!(val, scalar);
    }
}
