//! Darboux-type first integrals `H = Π fᵢ^{λᵢ}` of planar polynomial
//! foliations, truncated solutions of `Pᵖ = Q^q`, and the reduced
//! foliations they induce.
//!
//! Bivariate polynomials are exact [`YSeries`] (coefficient `i` is the
//! polynomial in `x` multiplying `yⁱ`).

mod cherkas;
mod master;

pub use cherkas::{even_part_check, EvenPartVerdict};
pub use master::{
    abel_first_integral, generate_master, ggs_abel_factors, ggs_coefficients, ggs_pipeline,
    lienard_form, master_pair, pull_back, AbelIntegral, EndpointLeg, GgsCertificate, GgsOptions,
    LienardSystem, MasterSystem, TransportLeg,
};

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{int, serde_rational, Poly, Rational};
use crate::yseries::YSeries;

/// `ω = P dy − Q dx`, i.e. the vector field `ẋ = P`, `ẏ = Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Foliation {
    #[serde(rename = "P", with = "bivariate")]
    pub p: YSeries,
    #[serde(rename = "Q", with = "bivariate")]
    pub q: YSeries,
}

impl Foliation {
    pub fn new(p: YSeries, q: YSeries) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidInput("foliation with both components zero".into()));
        }
        Ok(Foliation {
            p: p.with_trunc(YSeries::UNTRUNCATED),
            q: q.with_trunc(YSeries::UNTRUNCATED),
        })
    }

    /// Same leaves, vector field multiplied by `c`.
    pub fn scale(&self, c: &Rational) -> Foliation {
        Foliation {
            p: self.p.scale(c),
            q: self.q.scale(c),
        }
    }
}

/// One factor `f^λ` of a Darboux integral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DarbouxFactor {
    #[serde(with = "bivariate")]
    pub f: YSeries,
    #[serde(with = "serde_rational")]
    pub exponent: Rational,
}

/// `H = Π fᵢ^{λᵢ}` with nonzero rational exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DarbouxIntegral {
    pub factors: Vec<DarbouxFactor>,
}

impl DarbouxIntegral {
    pub fn new(factors: Vec<(YSeries, Rational)>) -> Result<Self> {
        let mut out = Vec::with_capacity(factors.len());
        for (f, exponent) in factors {
            if exponent.is_zero() {
                return Err(Error::InvalidInput("zero exponent in Darboux integral".into()));
            }
            if f.is_zero() {
                return Err(Error::InvalidInput("zero factor in Darboux integral".into()));
            }
            out.push(DarbouxFactor {
                f: f.with_trunc(YSeries::UNTRUNCATED),
                exponent,
            });
        }
        Ok(DarbouxIntegral { factors: out })
    }

    /// `H^c`.
    pub fn power(&self, c: &Rational) -> DarbouxIntegral {
        DarbouxIntegral {
            factors: self
                .factors
                .iter()
                .map(|fa| DarbouxFactor {
                    f: fa.f.clone(),
                    exponent: &fa.exponent * c,
                })
                .collect(),
        }
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.factors
            .iter()
            .map(|fa| {
                let v = fa
                    .f
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * y + c.eval_f64(x));
                v.powf(fa.exponent.to_f64().unwrap_or(f64::NAN))
            })
            .product()
    }
}

/// `Σ λᵢ (Π_{j≠i} f_j)(P ∂ₓfᵢ + Q ∂ᵧfᵢ)`, the cleared numerator of `dH/dt / H`.
pub fn lie_derivative_numerator(fol: &Foliation, h: &DarbouxIntegral) -> YSeries {
    let n = h.factors.len();
    let mut total = YSeries::zero(YSeries::UNTRUNCATED);
    for i in 0..n {
        let fi = &h.factors[i];
        let deriv = &(&fol.p * &fi.f.dx()) + &(&fol.q * &fi.f.dy());
        let others = (0..n)
            .filter(|&j| j != i)
            .fold(YSeries::one(YSeries::UNTRUNCATED), |acc, j| &acc * &h.factors[j].f);
        total = &total + &(&others * &deriv).scale(&fi.exponent);
    }
    total
}

/// Exact check that `H` is constant along the leaves of `fol`.
pub fn verify_first_integral(fol: &Foliation, h: &DarbouxIntegral) -> bool {
    lie_derivative_numerator(fol, h).is_zero()
}

/// `Pᵖ ≡ Q^q mod y^{n+1}` with `gcd(p, q) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedPair {
    #[serde(rename = "P", with = "bivariate")]
    pub p_series: YSeries,
    #[serde(rename = "Q", with = "bivariate")]
    pub q_series: YSeries,
    pub p: u32,
    pub q: u32,
    pub n: usize,
}

fn check_exponents(p: u32, q: u32) -> Result<()> {
    if p == 0 || q == 0 || p.gcd(&q) != 1 {
        return Err(Error::InvalidInput(format!(
            "exponents ({p}, {q}) must be positive and coprime"
        )));
    }
    Ok(())
}

impl TruncatedPair {
    /// Validates the invariant; `P` and `Q` are cut to `y`-degree `n`.
    pub fn new(p_series: YSeries, q_series: YSeries, p: u32, q: u32, n: usize) -> Result<Self> {
        check_exponents(p, q)?;
        let cut = |s: &YSeries| s.with_trunc(n).with_trunc(YSeries::UNTRUNCATED);
        let pair = TruncatedPair {
            p_series: cut(&p_series),
            q_series: cut(&q_series),
            p,
            q,
            n,
        };
        if !pair.holds() {
            return Err(Error::InvalidInput(format!(
                "P^{p} and Q^{q} differ below y^{}",
                n + 1
            )));
        }
        Ok(pair)
    }

    pub fn holds(&self) -> bool {
        let t = self.n;
        self.p_series.with_trunc(t).pow(self.p) == self.q_series.with_trunc(t).pow(self.q)
    }
}

/// `P = R^q`, `Q = R^p` modulo `y^{n+1}`, so that `Pᵖ = R^{pq} = Q^q`.
pub fn solve_pq(r: &YSeries, p: u32, q: u32, n: usize) -> Result<TruncatedPair> {
    check_exponents(p, q)?;
    if r.coeff(0).is_zero() {
        return Err(Error::InvalidBase("y^0 coefficient of R is zero".into()));
    }
    let base = r.with_trunc(n);
    TruncatedPair::new(base.pow(q), base.pow(p), p, q, n)
}

/// `ω = p·Q dP − q·P dQ` as `(dy coefficient, dx coefficient)`.
pub fn pair_one_form(tp: &TruncatedPair) -> (YSeries, YSeries) {
    let (big_p, big_q) = (&tp.p_series, &tp.q_series);
    let (p, q) = (int(tp.p as i64), int(tp.q as i64));
    let dy = &(big_q * &big_p.dy()).scale(&p) - &(big_p * &big_q.dy()).scale(&q);
    let dx = &(big_q * &big_p.dx()).scale(&p) - &(big_p * &big_q.dx()).scale(&q);
    (dy, dx)
}

/// Divides `p·Q dP − q·P dQ` by `yⁿ` and returns the reduced foliation.
///
/// The reduced `dx` coefficient vanishes on `y = 0`. For `n = 2` the result is
/// cross-checked against [`closed_form_coefficients`].
pub fn reduce_foliation(tp: &TruncatedPair) -> Result<Foliation> {
    let (dy, dx) = pair_one_form(tp);
    if dy.is_zero() && dx.is_zero() {
        return Err(Error::InvalidInput(
            "P^p / Q^q is constant, so the pair defines no foliation".into(),
        ));
    }
    let dy = dy.divide_by_y_power(tp.n)?;
    let dx = dx.divide_by_y_power(tp.n)?;
    if !dx.coeff(0).is_zero() {
        return Err(Error::Divisibility {
            power: tp.n + 1,
            index: tp.n,
        });
    }
    if tp.n == 2 {
        let r = closed_form_coefficients(tp, R4Form::Complete);
        let expect_dy = YSeries::exact(vec![r.r2.clone(), r.r1.clone()]);
        let expect_dx = YSeries::exact(vec![Poly::zero(), r.r4.clone(), r.r3.clone()]);
        if dy != expect_dy || dx != expect_dx {
            return Err(Error::CertificateFailed(
                "reduced foliation disagrees with the closed-form r1..r4".into(),
            ));
        }
    }
    Foliation::new(dy, -&dx)
}

/// Which expression to use for `r₄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum R4Form {
    /// `p(a₁′b₂ + a₂′b₁) − q(b₁′a₂ + b₂′a₁)`, valid for all quadratic pairs.
    Complete,
    /// `p a₁′b₂ − q b₁′a₂`, which agrees with `Complete` only when `a₂`, `b₂` are constant.
    ConstantLeading,
}

/// `(r₁y + r₂) dy + y(r₃y + r₄) dx` for `n = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedCoefficients {
    pub r1: Poly,
    pub r2: Poly,
    pub r3: Poly,
    pub r4: Poly,
}

pub fn closed_form_coefficients(tp: &TruncatedPair, form: R4Form) -> ReducedCoefficients {
    let a = |i| tp.p_series.coeff(i);
    let b = |i| tp.q_series.coeff(i);
    let (p, q) = (int(tp.p as i64), int(tp.q as i64));
    let (a1, a2, b1, b2) = (a(1), a(2), b(1), b(2));
    let r1 = (&a2 * &b2).scale(&(int(2) * (&p - &q)));
    let r2 = &(&a1 * &b2).scale(&(&p - &q * int(2))) - &(&b1 * &a2).scale(&(&q - &p * int(2)));
    let r3 = &(&a2.derivative() * &b2).scale(&p) - &(&b2.derivative() * &a2).scale(&q);
    let mut r4 = &(&a1.derivative() * &b2).scale(&p) - &(&b1.derivative() * &a2).scale(&q);
    if form == R4Form::Complete {
        r4 += &(&(&a2.derivative() * &b1).scale(&p) - &(&b2.derivative() * &a1).scale(&q));
    }
    ReducedCoefficients { r1, r2, r3, r4 }
}

/// The quadratic foliation `(−αx² − 2y² − αy + x) dx + (xy − αx + 1) dy`
/// with first integral `(x² + 2y + α)³ / (x³ + 3xy + 1)²`.
pub fn q4_fixture(alpha: &Rational) -> (Foliation, DarbouxIntegral) {
    let c = |v: Vec<Rational>| Poly::new(v);
    let fol = Foliation::new(
        YSeries::exact(vec![c(vec![int(1), -alpha.clone()]), Poly::x()]),
        YSeries::exact(vec![
            c(vec![int(0), int(-1), alpha.clone()]),
            Poly::constant(alpha.clone()),
            Poly::constant(int(2)),
        ]),
    )
    .expect("nonzero");
    let f1 = YSeries::exact(vec![c(vec![alpha.clone(), int(0), int(1)]), Poly::constant(int(2))]);
    let f2 = YSeries::exact(vec![Poly::from_ints(&[1, 0, 0, 1]), Poly::from_ints(&[0, 3])]);
    let h = DarbouxIntegral::new(vec![(f1, int(3)), (f2, int(-2))]).expect("valid");
    (fol, h)
}

/// Serde for exact bivariate polynomials as `[[c00, c01, …], [c10, …], …]`,
/// outer index the power of `y`.
pub mod bivariate {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &YSeries, ser: S) -> std::result::Result<S::Ok, S::Error> {
        s.coeffs().serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<YSeries, D::Error> {
        Ok(YSeries::exact(Vec::<Poly>::deserialize(d)?))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;
    use crate::yseries::yseries_from_ints;

    fn exact(c: &[&[i64]]) -> YSeries {
        yseries_from_ints(c, YSeries::UNTRUNCATED)
    }

    #[test]
    fn q4_integral_holds() {
        for alpha in [rat(-1, 2), int(0), int(3), rat(7, 5), rat(-11, 3)] {
            let (fol, h) = q4_fixture(&alpha);
            assert!(verify_first_integral(&fol, &h), "alpha = {alpha}");
        }
    }

    #[test]
    fn q4_integral_fails_for_wrong_alpha() {
        let (fol, _) = q4_fixture(&int(1));
        let (_, h) = q4_fixture(&int(2));
        assert!(!verify_first_integral(&fol, &h));
    }

    #[test]
    fn master_k1_cubic() {
        // ẋ = y + 3x(1 − x²), ẏ = −y(1 + 3x²)
        let fol = Foliation::new(exact(&[&[0, 3, 0, -3], &[1]]), exact(&[&[], &[-1, 0, -3]])).unwrap();
        let num = exact(&[&[1, 0, -2, 0, 1], &[0, 2, 0, -2], &[1]]);
        let den = YSeries::exact(vec![
            Poly::from_ints(&[1, 0, -1]),
            Poly::x(),
            Poly::constant(rat(1, 2)),
        ]);
        let h = DarbouxIntegral::new(vec![(num, int(1)), (den, int(-2))]).unwrap();
        assert!(verify_first_integral(&fol, &h));
        assert!(verify_first_integral(&fol, &h.power(&rat(-3, 7))));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(Foliation::new(YSeries::zero(YSeries::UNTRUNCATED), YSeries::zero(5)).is_err());
        assert!(DarbouxIntegral::new(vec![(exact(&[&[1]]), int(0))]).is_err());
        assert!(matches!(
            solve_pq(&exact(&[&[], &[1]]), 2, 3, 2),
            Err(Error::InvalidBase(_))
        ));
        assert!(solve_pq(&exact(&[&[1], &[1]]), 2, 4, 2).is_err());
    }

    #[test]
    fn solve_pq_examples() {
        let tp = solve_pq(&exact(&[&[1], &[1]]), 2, 3, 2).unwrap();
        assert_eq!(tp.p_series, exact(&[&[1], &[3], &[3]]));
        assert_eq!(tp.q_series, exact(&[&[1], &[2], &[1]]));
        let tp = solve_pq(&exact(&[&[5]]), 2, 3, 4).unwrap();
        assert_eq!(tp.p_series, exact(&[&[125]]));
        assert_eq!(tp.q_series, exact(&[&[25]]));
    }

    #[test]
    fn reduction_of_binomial_pair() {
        let tp = solve_pq(&exact(&[&[1], &[1]]), 2, 3, 2).unwrap();
        let fol = reduce_foliation(&tp).unwrap();
        assert!(fol.q.coeff(0).is_zero());
        // x-free pair: r₁ = 2(p − q)·3·1, r₂ = (p − 2q)·3·1 − (q − 2p)·2·3
        assert_eq!(fol.p, exact(&[&[-6], &[-6]]));
    }

    #[test]
    fn y_free_base_has_no_foliation() {
        let tp = solve_pq(&exact(&[&[1, 1]]), 2, 3, 2).unwrap();
        assert!(matches!(reduce_foliation(&tp), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn broken_pair_is_rejected() {
        let bad = TruncatedPair {
            p_series: exact(&[&[1], &[1]]),
            q_series: exact(&[&[1], &[1]]),
            p: 2,
            q: 3,
            n: 2,
        };
        assert!(!bad.holds());
        assert!(matches!(reduce_foliation(&bad), Err(Error::Divisibility { .. })));
    }

    #[test]
    fn json_forms() {
        let (fol, h) = q4_fixture(&rat(-1, 2));
        let s = serde_json::to_string(&fol).unwrap();
        assert!(s.starts_with(r#"{"P":[["1","1/2"],["0","1"]]"#), "{s}");
        assert_eq!(serde_json::from_str::<Foliation>(&s).unwrap(), fol);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<DarbouxIntegral>(&s).unwrap(), h);
    }
}
