//! Return-map coefficients of `dy/dx + Σ aᵢ(x) y^{i+1} = 0` and center tests.
//!
//! Two independent routes compute the coefficients `c_n` of
//! `φ(x0; x1, y) = y + Σ c_n y^{n+1}`:
//!
//! * [`brudnyi_coefficients`]: a sum over compositions `(i_1, …, i_k)` of `n`
//!   of `(i_k+1)(i_k+i_{k-1}+1)⋯(i_k+…+i_2+1) · ∫ a_{i_1}⋯a_{i_k}`;
//! * [`first_integral_series`]: the first integral
//!   `y + ∫ω + ∫ωDω + ∫ωDωDω + …`, built from the recursion
//!   `Φ_n = ∫_{x0}^{x} f · ∂_y Φ_{n-1}` with `x` left symbolic.
//!
//! `φ(x0; x1, ·)` maps `y(x1) ↦ y(x0)`: it is the inverse of the transport
//! map along `[x0, x1]`. Both are the identity exactly when there is a center.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{format_rational, int, parse_rational, Poly, Rational};
use crate::iterint::{Interval, Word};
use crate::par;
use crate::yseries::YSeries;

/// `dy/dx + Σᵢ species[i-1](x) · y^{i+1} = 0` on an oriented interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelEquation {
    species: Vec<Poly>,
    interval: Interval,
}

impl AbelEquation {
    /// Trailing zero species are dropped; the zero equation has no species.
    pub fn new(mut species: Vec<Poly>, interval: Interval) -> Self {
        while species.last().is_some_and(Poly::is_zero) {
            species.pop();
        }
        AbelEquation { species, interval }
    }

    /// Ingests `dy/dx = a·y² + b·y³` by negating into the normal form.
    pub fn from_abel_form(a: &Poly, b: &Poly, interval: Interval) -> Self {
        Self::new(vec![-a, -b], interval)
    }

    pub fn species(&self) -> &[Poly] {
        &self.species
    }

    /// `a_i` for `i ≥ 1` (zero beyond the last species).
    pub fn a(&self, i: usize) -> Poly {
        self.species.get(i - 1).cloned().unwrap_or_default()
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn with_interval(&self, interval: Interval) -> Self {
        AbelEquation {
            species: self.species.clone(),
            interval,
        }
    }

    /// `f(x, y) = Σ aᵢ(x) y^{i+1}` as a series truncated at `trunc`.
    pub fn rhs(&self, trunc: usize) -> YSeries {
        let mut coeffs = vec![Poly::zero(), Poly::zero()];
        coeffs.extend(self.species.iter().cloned());
        YSeries::new(coeffs, trunc)
    }

    /// The word `[a_{i_1}, …, a_{i_k}]` for 1-based species indices.
    pub fn word(&self, indices: &[usize]) -> Word {
        Word(indices.iter().map(|&i| self.a(i)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct AbelEquationFile {
    species: Vec<Poly>,
    interval: [String; 2],
}

impl Serialize for AbelEquation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AbelEquationFile {
            species: self.species.clone(),
            interval: [
                format_rational(&self.interval.x0),
                format_rational(&self.interval.x1),
            ],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbelEquation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = AbelEquationFile::deserialize(d)?;
        let x0 = parse_rational(&raw.interval[0]).map_err(serde::de::Error::custom)?;
        let x1 = parse_rational(&raw.interval[1]).map_err(serde::de::Error::custom)?;
        Ok(AbelEquation::new(raw.species, Interval::new(x0, x1)))
    }
}

/// `c_{i_1…i_k} = Π_{j=2..k} (i_j + … + i_k + 1)`.
pub fn composition_weight(parts: &[usize]) -> Rational {
    let mut weight = Rational::one();
    let mut suffix = 0usize;
    for &i in parts.iter().skip(1).rev() {
        suffix += i;
        weight *= int(suffix as i64 + 1);
    }
    weight
}

/// All compositions of `n` with parts in `1..=max_part`, in lexicographic order.
pub fn compositions(n: usize, max_part: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 || max_part == 0 {
        return out;
    }
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), n)];
    while let Some((prefix, rest)) = stack.pop() {
        if rest == 0 {
            out.push(prefix);
            continue;
        }
        // Push in reverse so the smallest first part is expanded first.
        for part in (1..=max_part.min(rest)).rev() {
            let mut next = prefix.clone();
            next.push(part);
            stack.push((next, rest - part));
        }
    }
    out
}

/// Memo of running iterated integrals `∫_{x0}^{x} a_{i_1}⋯a_{i_k}` keyed by
/// species-index words. Built level by level so that every entry's suffix is
/// already present; each level is evaluated in parallel against a read-only
/// table and merged afterwards.
pub struct WordTable<'a> {
    eq: &'a AbelEquation,
    running: HashMap<Vec<usize>, Poly>,
}

impl<'a> WordTable<'a> {
    pub fn new(eq: &'a AbelEquation) -> Self {
        let mut running = HashMap::new();
        running.insert(Vec::new(), Poly::one());
        WordTable { eq, running }
    }

    /// Adds a batch of words whose proper suffixes are all present.
    fn extend(&mut self, words: Vec<Vec<usize>>) {
        let x0 = &self.eq.interval.x0;
        let table = &self.running;
        let eq = self.eq;
        let todo: Vec<Vec<usize>> = words
            .into_iter()
            .filter(|w| !table.contains_key(w))
            .collect();
        let polys = par::map(&todo, |w| {
            let inner = &table[&w[1..]];
            (&eq.a(w[0]) * inner).integrate_from(x0)
        });
        self.running.extend(todo.into_iter().zip(polys));
    }

    /// Ensures every composition of every weight `≤ n` (parts `≤ m`) is present.
    pub fn fill_compositions(&mut self, n: usize) {
        let m = self.eq.species.len();
        for s in 1..=n {
            self.extend(compositions(s, m));
        }
    }

    /// Ensures every word of length `≤ len` over all species is present.
    pub fn fill_words(&mut self, len: usize) {
        let m = self.eq.species.len();
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..len {
            let next: Vec<Vec<usize>> = (1..=m)
                .flat_map(|i| {
                    level.iter().map(move |w| {
                        let mut v = Vec::with_capacity(w.len() + 1);
                        v.push(i);
                        v.extend_from_slice(w);
                        v
                    })
                })
                .collect();
            self.extend(next.clone());
            level = next;
        }
    }

    /// `∫_{x0}^{x1}` of the word; panics if it has not been filled.
    pub fn integral(&self, word: &[usize]) -> Rational {
        self.running[word].eval(&self.eq.interval.x1)
    }

    pub fn get(&self, word: &[usize]) -> Option<Rational> {
        self.running.get(word).map(|p| p.eval(&self.eq.interval.x1))
    }

    pub fn len(&self) -> usize {
        self.running.len()
    }

    pub fn is_empty(&self) -> bool {
        self.running.is_empty()
    }
}

/// `c_n` from the composition-weighted word formula.
pub fn brudnyi_coefficient(eq: &AbelEquation, n: usize) -> Rational {
    assert!(n >= 1, "coefficients are indexed from 1");
    let mut table = WordTable::new(eq);
    table.fill_compositions(n);
    coefficient_from_table(&table, n)
}

fn coefficient_from_table(table: &WordTable<'_>, n: usize) -> Rational {
    let m = table.eq.species.len();
    compositions(n, m)
        .iter()
        .map(|w| composition_weight(w) * table.integral(w))
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// `c_1, …, c_N` from the word formula, sharing one memo table.
pub fn brudnyi_coefficients(eq: &AbelEquation, order: usize) -> Vec<Rational> {
    let mut table = WordTable::new(eq);
    table.fill_compositions(order);
    par::map_range(order, |i| coefficient_from_table(&table, i + 1))
}

/// The first integral `φ(x0; x, y) = y + Σ_{n=1}^{N} Φ_n(x, y)` of
/// `dy + f(x, y) dx = 0`, with `Φ_1 = ∫_{x0}^{x} f` and
/// `Φ_n = ∫_{x0}^{x} f · ∂_y Φ_{n-1}`. The result is truncated at `y^{N+1}`.
pub fn first_integral_series(f: &YSeries, x0: &Rational, order: usize) -> Result<YSeries> {
    if order == 0 {
        return Err(Error::InvalidEquation("series order must be at least 1".into()));
    }
    if !f.vanishes_at_y0() {
        return Err(Error::InvalidEquation(
            "f(x, 0) must vanish identically".into(),
        ));
    }
    let trunc = order + 1;
    let f = f.with_trunc(trunc);
    let mut phi = YSeries::y(trunc);
    let mut term = f.integrate_from(x0);
    for n in 1..=order {
        phi = &phi + &term;
        if n < order {
            term = (&f * &term.dy()).integrate_from(x0);
        }
    }
    Ok(phi)
}

/// `c_1, …, c_N` read off the first-integral series at `x = x1`.
pub fn picard_coefficients(eq: &AbelEquation, order: usize) -> Result<Vec<Rational>> {
    let iv = eq.interval();
    let phi = first_integral_series(&eq.rhs(order + 1), &iv.x0, order)?;
    let at_x1 = phi.eval_x(&iv.x1);
    Ok((1..=order)
        .map(|n| at_x1.get(n + 1).cloned().unwrap_or_else(Rational::zero))
        .collect())
}

/// `y ↦ y + Σ_{n=1}^{N} c_n y^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnMapSeries {
    #[serde(with = "crate::exactpoly::serde_rational::vec")]
    pub coefficients: Vec<Rational>,
}

impl ReturnMapSeries {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        ReturnMapSeries { coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn identity(order: usize) -> Self {
        Self::new(vec![Rational::zero(); order])
    }

    pub fn is_identity(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    /// Smallest `n` with `c_n ≠ 0`.
    pub fn first_nonzero(&self) -> Option<(usize, Rational)> {
        self.coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i + 1, c.clone()))
    }

    /// As a `y`-series with constant coefficients, truncated at `y^{N+1}`.
    pub fn to_series(&self) -> YSeries {
        let mut coeffs = vec![Poly::zero(), Poly::one()];
        coeffs.extend(self.coefficients.iter().cloned().map(Poly::constant));
        YSeries::new(coeffs, self.order() + 1)
    }

    fn from_series(s: &YSeries, order: usize) -> Self {
        Self::new(
            (1..=order)
                .map(|n| s.coeff(n + 1).coeff(0))
                .collect(),
        )
    }

    /// `self ∘ inner`, truncated at the smaller order.
    pub fn compose(&self, inner: &ReturnMapSeries) -> ReturnMapSeries {
        let order = self.order().min(inner.order());
        let outer = self.to_series().with_trunc(order + 1);
        let g = inner.to_series().with_trunc(order + 1);
        let composed = outer
            .coeffs()
            .iter()
            .rev()
            .fold(YSeries::zero(order + 1), |acc, c| {
                &(&acc * &g) + &YSeries::constant(c.clone(), order + 1)
            });
        Self::from_series(&composed, order)
    }

    /// Compositional inverse, to the same order.
    pub fn inverse(&self) -> ReturnMapSeries {
        let order = self.order();
        let mut g = ReturnMapSeries::identity(order);
        // g ← g − (f(g) − y): each pass fixes one more coefficient.
        for _ in 0..order {
            let fg = self.compose(&g);
            g = ReturnMapSeries::new(
                g.coefficients
                    .iter()
                    .zip(&fg.coefficients)
                    .map(|(gc, fc)| gc - fc)
                    .collect(),
            );
        }
        g
    }

    /// `y + Σ c_n y^{n+1}` in floating point.
    pub fn eval_f64(&self, y: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coefficients.iter().rev() {
            acc = acc * y + num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
        }
        y + acc * y * y
    }
}

/// `φ(x0; x1, ·)` to order `N`. With `check_oracle`, the word-formula
/// coefficients are recomputed from the first-integral series and any
/// disagreement is reported as [`Error::OracleMismatch`].
pub fn return_map(eq: &AbelEquation, order: usize, check_oracle: bool) -> Result<ReturnMapSeries> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let coeffs = brudnyi_coefficients(eq, order);
    if check_oracle {
        let series = picard_coefficients(eq, order)?;
        for (i, (w, s)) in coeffs.iter().zip(&series).enumerate() {
            if w != s {
                return Err(Error::OracleMismatch {
                    n: i + 1,
                    word: Box::new(w.clone()),
                    series: Box::new(s.clone()),
                });
            }
        }
    }
    Ok(ReturnMapSeries::new(coeffs))
}

/// `∫a₁`, `∫a₂`, `∫a₁a₂` over the interval; all vanish at a center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NecessaryConditions {
    #[serde(with = "crate::exactpoly::serde_rational")]
    pub int_a1: Rational,
    #[serde(with = "crate::exactpoly::serde_rational")]
    pub int_a2: Rational,
    #[serde(with = "crate::exactpoly::serde_rational")]
    pub int_a1_a2: Rational,
}

impl NecessaryConditions {
    pub fn all_vanish(&self) -> bool {
        self.int_a1.is_zero() && self.int_a2.is_zero() && self.int_a1_a2.is_zero()
    }
}

pub fn necessary_conditions(eq: &AbelEquation) -> Result<NecessaryConditions> {
    if eq.species.len() > 2 {
        return Err(Error::InvalidEquation(format!(
            "necessary conditions apply to two-species equations, got {}",
            eq.species.len()
        )));
    }
    let iv = eq.interval();
    let int = |w: &[usize]| crate::iterint::iterated_integral(&eq.word(w), iv);
    Ok(NecessaryConditions {
        int_a1: int(&[1]),
        int_a2: int(&[2]),
        int_a1_a2: int(&[1, 2]),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum UniversalVerdict {
    /// Every word of length `≤ max_length` (and weight `≤ max_weight`) integrates to zero.
    UniversalUpTo {
        max_length: usize,
        max_weight: Option<usize>,
        words_checked: usize,
    },
    /// First word (by length, then lexicographically) with a nonzero integral.
    NotUniversal {
        word: Vec<usize>,
        #[serde(with = "crate::exactpoly::serde_rational")]
        value: Rational,
    },
}

/// Exhaustive search over species words for a nonzero iterated integral.
pub fn universal_check(
    eq: &AbelEquation,
    max_length: usize,
    max_weight: Option<usize>,
) -> UniversalVerdict {
    let m = eq.species.len();
    let mut table = WordTable::new(eq);
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut checked = 0;
    for _ in 0..max_length {
        let next: Vec<Vec<usize>> = level
            .iter()
            .flat_map(|w| {
                (1..=m).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .filter(|w| max_weight.is_none_or(|n| w.iter().sum::<usize>() <= n))
            .collect();
        if next.is_empty() {
            break;
        }
        // Every suffix of a word in `next` is a word of a previous level, so
        // fill by suffix length to respect the table's build order.
        let mut by_len: Vec<Vec<usize>> = Vec::new();
        for w in &next {
            for start in (0..w.len()).rev() {
                by_len.push(w[start..].to_vec());
            }
        }
        by_len.sort_by_key(Vec::len);
        by_len.dedup();
        let mut current = 0;
        let mut batch = Vec::new();
        for w in by_len {
            if w.len() != current {
                table.extend(std::mem::take(&mut batch));
                current = w.len();
            }
            batch.push(w);
        }
        table.extend(batch);

        checked += next.len();
        let hit = par::find_first(&next, |w| {
            let v = table.integral(w);
            (!v.is_zero()).then(|| (w.clone(), v))
        });
        if let Some((word, value)) = hit {
            return UniversalVerdict::NotUniversal { word, value };
        }
        level = next;
    }
    UniversalVerdict::UniversalUpTo {
        max_length,
        max_weight,
        words_checked: checked,
    }
}
