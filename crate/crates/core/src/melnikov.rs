//! Bifurcation functions of `dy/y² = a dx − ε ω₁ − ε² ω₂ − …` with
//! `ωⱼ = (pⱼ + y qⱼ) dx`, expanded at `h = ∞` along the level curves
//! `y = 1/(h − A(x))` of the unperturbed first integral.
//!
//! `A` is normalized to vanish at `x0`; a center of the unperturbed equation
//! forces `A(x1) = 0` as well.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::composition::{moments, pcc_check, PccVerdict};
use crate::error::{Error, Result};
use crate::exactpoly::{format_rational, int, parse_rational, serde_rational, Poly, Rational};
use crate::iterint::Interval;
use crate::yseries::YSeries;

/// One perturbation order `ω = (p + y q) dx`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationForm {
    pub p: Poly,
    pub q: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedAbel {
    a: Poly,
    big_a: Poly,
    orders: Vec<PerturbationForm>,
    interval: Interval,
}

impl PerturbedAbel {
    /// Fails unless `∫_{x0}^{x1} a = 0`.
    pub fn new(a: Poly, orders: Vec<PerturbationForm>, interval: Interval) -> Result<Self> {
        let big_a = a.integrate_from(&interval.x0);
        if !big_a.eval(&interval.x1).is_zero() {
            return Err(Error::InvalidEquation(format!(
                "A(x1) - A(x0) = {} is nonzero, so the unperturbed equation has no center",
                format_rational(&big_a.eval(&interval.x1))
            )));
        }
        Ok(PerturbedAbel {
            a,
            big_a,
            orders,
            interval,
        })
    }

    pub fn a(&self) -> &Poly {
        &self.a
    }

    /// Antiderivative of `a` with `A(x0) = A(x1) = 0`.
    pub fn big_a(&self) -> &Poly {
        &self.big_a
    }

    pub fn orders(&self) -> &[PerturbationForm] {
        &self.orders
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    /// Order `j ≥ 1`; missing orders are zero.
    pub fn form(&self, j: usize) -> PerturbationForm {
        self.orders.get(j - 1).cloned().unwrap_or(PerturbationForm {
            p: Poly::zero(),
            q: Poly::zero(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct PerturbedAbelFile {
    a: Poly,
    orders: Vec<PerturbationForm>,
    interval: [String; 2],
}

impl Serialize for PerturbedAbel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PerturbedAbelFile {
            a: self.a.clone(),
            orders: self.orders.clone(),
            interval: [
                format_rational(&self.interval.x0),
                format_rational(&self.interval.x1),
            ],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PerturbedAbel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PerturbedAbelFile::deserialize(d)?;
        let x0 = parse_rational(&raw.interval[0]).map_err(serde::de::Error::custom)?;
        let x1 = parse_rational(&raw.interval[1]).map_err(serde::de::Error::custom)?;
        PerturbedAbel::new(raw.a, raw.orders, Interval::new(x0, x1))
            .map_err(serde::de::Error::custom)
    }
}

/// `constant_term + boundary/h + Σ_k tail[k] · h^{−k−shift}`, truncated at `k = kmax`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentSeries {
    #[serde(with = "serde_rational")]
    pub constant_term: Rational,
    #[serde(with = "serde_rational")]
    pub boundary: Rational,
    #[serde(with = "serde_rational::vec")]
    pub tail: Vec<Rational>,
    pub shift: usize,
    pub kmax: usize,
}

impl MomentSeries {
    pub fn is_zero(&self) -> bool {
        self.constant_term.is_zero() && self.boundary.is_zero() && self.tail.iter().all(Zero::is_zero)
    }

    /// Coefficients of `h^0, h^{−1}, …` merged into one list.
    pub fn inverse_h_coefficients(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.tail.len() + self.shift];
        out[0] = self.constant_term.clone();
        if out.len() > 1 {
            out[1] = self.boundary.clone();
        }
        for (k, t) in self.tail.iter().enumerate() {
            out[k + self.shift] += t;
        }
        out
    }

    /// `Σ_k tail[k] · h^{−k−shift}`.
    pub fn eval_tail(&self, h: f64) -> f64 {
        let inv = 1.0 / h;
        let mut acc = 0.0;
        for t in self.tail.iter().rev() {
            acc = acc * inv + rational_to_f64(t);
        }
        acc * inv.powi(self.shift as i32)
    }

    pub fn eval(&self, h: f64) -> f64 {
        rational_to_f64(&self.constant_term) + rational_to_f64(&self.boundary) / h + self.eval_tail(h)
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// `M₁(h) = ∫ p₁ + Σ_k h^{−k−1} ∫ q₁ Aᵏ`.
pub fn melnikov1(sys: &PerturbedAbel, kmax: usize) -> Result<MomentSeries> {
    if sys.orders.is_empty() {
        return Err(Error::InvalidInput("system has no perturbation order".into()));
    }
    let w1 = sys.form(1);
    let iv = &sys.interval;
    Ok(MomentSeries {
        constant_term: w1.p.definite_integral(&iv.x0, &iv.x1),
        boundary: Rational::zero(),
        tail: moments(&w1.q, &sys.big_a, iv, kmax),
        shift: 1,
        kmax,
    })
}

/// Exact certificate that `M₁ ≡ 0`: `∫p₁ = 0` and `(Q₁, A)` satisfy the
/// composition condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct M1Certificate {
    pub pcc: PccVerdict,
}

pub fn certify_m1_zero(sys: &PerturbedAbel) -> Result<M1Certificate> {
    let w1 = sys.form(1);
    let iv = &sys.interval;
    let integral = w1.p.definite_integral(&iv.x0, &iv.x1);
    if !integral.is_zero() {
        return Err(Error::M1NotZero(format!(
            "constant term is {}",
            format_rational(&integral)
        )));
    }
    let pcc = pcc_check(&w1.q.antiderivative(), &sys.big_a, iv);
    if !pcc.holds() {
        return Err(Error::M1NotZero(
            "(Q1, A) admit no common closing composition factor".into(),
        ));
    }
    Ok(M1Certificate { pcc })
}

/// Sign of the `q₁P₁` cross term in the second-order integrand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossTermSign {
    /// `g = −q₁P₁ − Q₂a`: the `ε²` coefficient of `h ↦ 1/y(x1)` with `h = 1/y(x0)`.
    #[default]
    Negative,
    /// `g = q₁P₁ − Q₂a`: the cross term taken with the opposite orientation.
    Positive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct M2Options {
    /// Expand even when `M₁ ≡ 0` cannot be certified.
    pub force: bool,
    pub cross: CrossTermSign,
}

/// Outcome of [`melnikov2`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Melnikov2 {
    pub series: MomentSeries,
    /// `g = ∓q₁P₁ − Q₂a`.
    pub integrand: Poly,
    pub cross: CrossTermSign,
    /// `None` when forced past a failed certification.
    pub m1_certificate: Option<M1Certificate>,
    pub warnings: Vec<String>,
}

/// `M₂(h) = ∫p₂ + (Q₂(x1) − Q₂(x0))/h + Σ_k (k+1) h^{−k−2} ∫ g Aᵏ`,
/// `g = ∓q₁P₁ − Q₂a`, with `P₁` and `Q₂` vanishing at `x0`.
///
/// Valid only when `M₁ ≡ 0`; the iterated term `∫(y²q₁)(yq₁)` then vanishes
/// as a pull-back. With `force` the expansion is returned anyway and the
/// failed certification is reported as a warning.
pub fn melnikov2(sys: &PerturbedAbel, kmax: usize, opts: M2Options) -> Result<Melnikov2> {
    if sys.orders.is_empty() {
        return Err(Error::InvalidInput("system has no perturbation order".into()));
    }
    let mut warnings = Vec::new();
    let m1_certificate = match certify_m1_zero(sys) {
        Ok(c) => Some(c),
        Err(e) if opts.force => {
            warnings.push(format!("expansion forced: {e}"));
            None
        }
        Err(e) => return Err(e),
    };

    let iv = &sys.interval;
    let w1 = sys.form(1);
    let w2 = sys.form(2);
    let p1 = w1.p.integrate_from(&iv.x0);
    let q2 = w2.q.integrate_from(&iv.x0);
    let cross = &w1.q * &p1;
    let cross = match opts.cross {
        CrossTermSign::Negative => -cross,
        CrossTermSign::Positive => cross,
    };
    let g = &cross - &(&q2 * &sys.a);

    let boundary = q2.eval(&iv.x1);
    if !boundary.is_zero() {
        warnings.push(format!(
            "Q2(x1) - Q2(x0) = {} is nonzero; kept as the h^-1 boundary term",
            format_rational(&boundary)
        ));
    }
    let raw = moments(&g, &sys.big_a, iv, kmax);
    let tail = raw
        .iter()
        .enumerate()
        .map(|(k, m)| m * int(k as i64 + 1))
        .collect();
    Ok(Melnikov2 {
        series: MomentSeries {
            constant_term: w2.p.definite_integral(&iv.x0, &iv.x1),
            boundary,
            tail,
            shift: 2,
            kmax,
        },
        integrand: g,
        cross: opts.cross,
        m1_certificate,
        warnings,
    })
}

/// Françoise decomposition `ω₁ = dR₁ + r₁ dH` for the step from order 1 to
/// order 2, with `y` held as a formal parameter during `x`-integration:
/// `R₁ = ∫_{x0}^x ω₁ = P₁ + y Q₁` and `r₁ = ∫_{x0}^x ∂_h ω₁ = −y² Q₁`,
/// where `∂_h y = −y²` on the level curves.
///
/// Only `target_order = 2` is supported.
pub fn francoise_step(sys: &PerturbedAbel, target_order: usize) -> Result<(YSeries, YSeries)> {
    if target_order != 2 {
        return Err(Error::UnsupportedOrder(target_order));
    }
    let x0 = &sys.interval.x0;
    let w1 = sys.form(1);
    let omega = YSeries::exact(vec![w1.p.clone(), w1.q.clone()]);
    let big_r = omega.integrate_from(x0);
    let r = dh(&omega).integrate_from(x0);
    Ok((big_r, r))
}

/// `∂_h = −y² ∂_y` along `y = 1/(h − A)`.
pub fn dh(s: &YSeries) -> YSeries {
    s.dy().mul_by_y_power(2).scale(&-Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    fn form(pp: &[i64], qq: &[i64]) -> PerturbationForm {
        PerturbationForm { p: p(pp), q: p(qq) }
    }

    fn unit() -> Interval {
        Interval::new(int(0), int(1))
    }

    #[test]
    fn requires_closing_a() {
        assert!(PerturbedAbel::new(p(&[1]), vec![], unit()).is_err());
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![], unit()).unwrap();
        assert_eq!(sys.big_a(), &p(&[0, -1, 1]));
        assert!(melnikov1(&sys, 3).is_err());
    }

    #[test]
    fn melnikov1_examples() {
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[1], &[])], unit()).unwrap();
        let m = melnikov1(&sys, 4).unwrap();
        assert_eq!(m.constant_term, int(1));
        assert!(m.tail.iter().all(Zero::is_zero));

        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[], &[0, 1])], unit()).unwrap();
        assert_eq!(melnikov1(&sys, 1).unwrap().tail, vec![rat(1, 2), rat(-1, 12)]);

        // q₁ = W′·(g∘W) with W = A
        let w = p(&[0, -1, 1]);
        let q1 = &w.derivative() * &p(&[1, 0, 3]).compose(&w);
        let sys = PerturbedAbel::new(
            w.derivative(),
            vec![PerturbationForm { p: p(&[-1, 2]), q: q1 }],
            unit(),
        )
        .unwrap();
        assert!(melnikov1(&sys, 10).unwrap().is_zero());
        assert!(certify_m1_zero(&sys).is_ok());
    }

    #[test]
    fn melnikov2_requires_certificate() {
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[0, 1], &[])], unit()).unwrap();
        assert!(matches!(melnikov2(&sys, 3, M2Options::default()), Err(Error::M1NotZero(_))));
        let forced = melnikov2(&sys, 3, M2Options { force: true, ..M2Options::default() }).unwrap();
        assert!(forced.m1_certificate.is_none());
        assert!(!forced.warnings.is_empty());
    }

    #[test]
    fn melnikov2_telescoping_integrand() {
        // p₁ = 2x − 1: g = (2x − 1)(x² − x) = A′A and every moment telescopes
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[-1, 2], &[-1, 2])], unit()).unwrap();
        for cross in [CrossTermSign::Negative, CrossTermSign::Positive] {
            let m = melnikov2(&sys, 4, M2Options { force: false, cross }).unwrap();
            assert!(m.series.is_zero());
        }
        let m = melnikov2(&sys, 4, M2Options::default()).unwrap();
        assert_eq!(m.integrand, -(&p(&[-1, 2]) * &p(&[0, -1, 1])));
    }

    #[test]
    fn melnikov2_zero_integrand() {
        // ω₁ = 0 and ω₂ = 0
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[], &[])], unit()).unwrap();
        assert!(melnikov2(&sys, 4, M2Options::default()).unwrap().series.is_zero());
    }

    #[test]
    fn melnikov2_with_vanishing_first_order_matches_m1_of_second() {
        let w2 = form(&[1, 1], &[2, 0, -3, 1]);
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[], &[]), w2.clone()], unit()).unwrap();
        let m2 = melnikov2(&sys, 8, M2Options::default()).unwrap();
        let as_first = PerturbedAbel::new(p(&[-1, 2]), vec![w2], unit()).unwrap();
        let m1 = melnikov1(&as_first, 8).unwrap();
        let lhs = m2.series.inverse_h_coefficients();
        let rhs = m1.inverse_h_coefficients();
        assert_eq!(lhs[..rhs.len()], rhs[..]);
    }

    #[test]
    fn francoise_examples() {
        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[], &[])], unit()).unwrap();
        assert!(francoise_step(&sys, 2).unwrap().1.is_zero());

        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[], &[5])], unit()).unwrap();
        let (_, r) = francoise_step(&sys, 2).unwrap();
        assert_eq!(r, YSeries::exact(vec![Poly::zero(), Poly::zero(), p(&[0, -5])]));

        let sys = PerturbedAbel::new(p(&[-1, 2]), vec![form(&[3], &[-1, 2])], unit()).unwrap();
        let (big_r, r) = francoise_step(&sys, 2).unwrap();
        assert_eq!(r, YSeries::exact(vec![Poly::zero(), Poly::zero(), p(&[0, 1, -1])]));
        assert_eq!(big_r.dx(), YSeries::exact(vec![p(&[3]), p(&[-1, 2])]));
        assert_eq!(r, dh(&big_r));

        assert!(matches!(francoise_step(&sys, 3), Err(Error::UnsupportedOrder(3))));
    }

    #[test]
    fn json_round_trip() {
        let sys: PerturbedAbel = serde_json::from_str(
            r#"{"a": ["-1","2"], "orders": [{"p": ["-1","2"], "q": ["0","1"]}], "interval": ["0","1"]}"#,
        )
        .unwrap();
        let back: PerturbedAbel = serde_json::from_str(&serde_json::to_string(&sys).unwrap()).unwrap();
        assert_eq!(sys, back);
        assert!(serde_json::from_str::<PerturbedAbel>(
            r#"{"a": ["1"], "orders": [], "interval": ["0","1"]}"#
        )
        .is_err());
    }
}
