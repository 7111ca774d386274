//! The master Liénard family `H_k = N^{2k−1} / D^{2k}`, its pull-backs, and
//! the passage Liénard → Abel used to build a center that is not universal.

use num_traits::Zero;
use serde::Serialize;

use super::{reduce_foliation, verify_first_integral, DarbouxIntegral, Foliation, TruncatedPair};
use crate::centers::{return_map, universal_check, AbelEquation, UniversalVerdict};
use crate::composition::common_factor;
use crate::error::{Error, Result};
use crate::exactpoly::{int, rat, serde_rational, Poly, Rational};
use crate::iterint::Interval;
use crate::numeric::{transport, NumericConfig};
use crate::par;
use crate::yseries::YSeries;

fn exact(coeffs: Vec<Poly>) -> YSeries {
    YSeries::exact(coeffs)
}

/// `(N, D)` with `N^{2k−1} ≡ D^{2k} mod y³`, all `x`-dependence through `r`.
pub fn master_pair(k: u32, r: &Poly) -> Result<TruncatedPair> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let s = &Poly::one() - &r.pow(2);
    let kk = int(k as i64);
    let k2 = int(2 * k as i64 - 1);
    let num = exact(vec![
        s.pow(2 * k),
        (r * &s.pow(k)).scale(&(&kk * int(2))),
        Poly::constant(kk.clone()),
    ]);
    let den = exact(vec![
        s.pow(2 * k - 1),
        (r * &s.pow(k - 1)).scale(&k2),
        Poly::constant(&k2 / int(2)),
    ]);
    TruncatedPair::new(num, den, 2 * k - 1, 2 * k, 2)
}

/// `ẋ = −y + r₂(x)`, `ẏ = y·r₄(x)` with first integral `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MasterSystem {
    pub k: u32,
    pub r: Poly,
    pub foliation: Foliation,
    pub integral: DarbouxIntegral,
    pub r2: Poly,
    pub r4: Poly,
}

/// Builds the pair, reduces it, normalizes time so that `ẋ = −y + …`, and
/// checks the first integral exactly.
pub fn generate_master(k: u32, r: &Poly) -> Result<MasterSystem> {
    let pair = master_pair(k, r)?;
    let reduced = reduce_foliation(&pair)?;
    // reduced: (r₁y + r₂) dy + y(r₃y + r₄) dx with r₁ constant and r₃ = 0
    let r1 = reduced.p.coeff(1);
    if !r1.is_constant() || r1.is_zero() || !reduced.q.coeff(2).is_zero() {
        return Err(Error::CertificateFailed("master reduction is not of Liénard type".into()));
    }
    let foliation = reduced.scale(&-r1.coeff(0).recip());
    let r2 = foliation.p.coeff(0);
    let r4 = foliation.q.coeff(1);
    let integral = DarbouxIntegral::new(vec![
        (pair.p_series.clone(), int(pair.p as i64)),
        (pair.q_series.clone(), -int(pair.q as i64)),
    ])?;
    if !verify_first_integral(&foliation, &integral) {
        return Err(Error::CertificateFailed("master first integral".into()));
    }
    Ok(MasterSystem {
        k,
        r: r.clone(),
        foliation,
        integral,
        r2,
        r4,
    })
}

/// Pull-back of `ω = P dy − Q dx` under `x ↦ r(x)`: `P∘r dy − (Q∘r)·r′ dx`.
pub fn pull_back(fol: &Foliation, r: &Poly) -> Foliation {
    Foliation {
        p: fol.p.compose_x(r),
        q: fol.q.compose_x(r).mul_poly(&r.derivative()),
    }
}

/// `ẋ = u`, `u̇ = −q(x) − p(x)·u`, reached from `ẋ = −y + s(x)`, `ẏ = y·t(x)`
/// by `y = s − u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LienardSystem {
    pub p: Poly,
    pub q: Poly,
    pub shift: Poly,
    pub foliation: Foliation,
}

pub fn lienard_form(fol: &Foliation) -> Result<LienardSystem> {
    let shape_ok = fol.p.y_degree().unwrap_or(0) <= 1
        && fol.p.coeff(1) == Poly::constant(int(-1))
        && fol.q.y_degree().unwrap_or(0) <= 1
        && fol.q.coeff(0).is_zero();
    if !shape_ok {
        return Err(Error::InvalidInput(
            "expected x' = -y + s(x), y' = y t(x)".into(),
        ));
    }
    let s = fol.p.coeff(0);
    let minus_one = Poly::constant(int(-1));
    let p_u = fol.p.substitute_affine_y(&s, &minus_one);
    if p_u != YSeries::y(YSeries::UNTRUNCATED) {
        return Err(Error::CertificateFailed("Liénard substitution in x'".into()));
    }
    let q_u = &p_u.mul_poly(&s.derivative()) - &fol.q.substitute_affine_y(&s, &minus_one);
    if q_u.y_degree().unwrap_or(0) > 1 {
        return Err(Error::CertificateFailed("Liénard substitution in u'".into()));
    }
    Ok(LienardSystem {
        q: -&q_u.coeff(0),
        p: -&q_u.coeff(1),
        shift: s,
        foliation: Foliation { p: p_u, q: q_u },
    })
}

/// `dz/dx = p z² + q z³` (`z = 1/u`) with first integral `z² Ñ^{2k−1} / D̃^{2k}`,
/// `Ñ`, `D̃` normalized to `z⁰`-coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelIntegral {
    pub equation: AbelEquation,
    #[serde(with = "super::bivariate")]
    pub n_tilde: YSeries,
    #[serde(with = "super::bivariate")]
    pub d_tilde: YSeries,
    pub integral: DarbouxIntegral,
}

pub fn abel_first_integral(
    master: &MasterSystem,
    lienard: &LienardSystem,
    interval: Interval,
) -> Result<AbelIntegral> {
    let minus_one = Poly::constant(int(-1));
    let to_abel = |f: &YSeries| -> Result<YSeries> {
        let inverted = f.substitute_affine_y(&lienard.shift, &minus_one).invert_y(2)?;
        let lead = inverted.coeff(0);
        if !lead.is_constant() || lead.is_zero() {
            return Err(Error::CertificateFailed("Abel factor normalization".into()));
        }
        Ok(inverted.scale(&lead.coeff(0).recip()))
    };
    let n_tilde = to_abel(&master.integral.factors[0].f)?;
    let d_tilde = to_abel(&master.integral.factors[1].f)?;
    let k = master.k as i64;
    let integral = DarbouxIntegral::new(vec![
        (YSeries::y(YSeries::UNTRUNCATED), int(2)),
        (n_tilde.clone(), int(2 * k - 1)),
        (d_tilde.clone(), int(-2 * k)),
    ])?;
    let abel_fol = Foliation::new(
        YSeries::one(YSeries::UNTRUNCATED),
        exact(vec![Poly::zero(), Poly::zero(), lienard.p.clone(), lienard.q.clone()]),
    )?;
    if !verify_first_integral(&abel_fol, &integral) {
        return Err(Error::CertificateFailed("Abel first integral".into()));
    }
    Ok(AbelIntegral {
        equation: AbelEquation::from_abel_form(&lienard.p, &lienard.q, interval),
        n_tilde,
        d_tilde,
        integral,
    })
}

/// `2(20x⁴ − 15x² + 1)` and `x(x − 1)(x + 1)(5x² − 3)(15x⁴ − 6x² − 1)`.
pub fn ggs_coefficients() -> (Poly, Poly) {
    let p = Poly::from_ints(&[2, 0, -30, 0, 40]);
    let q = [
        Poly::from_ints(&[0, 1]),
        Poly::from_ints(&[-1, 1]),
        Poly::from_ints(&[1, 1]),
        Poly::from_ints(&[-3, 0, 5]),
        Poly::from_ints(&[-1, 0, -6, 0, 15]),
    ]
    .iter()
    .fold(Poly::one(), |acc, f| &acc * f);
    (p, q)
}

/// Expected `Ñ`, `D̃` for `k = 2`, `r = x`.
pub fn ggs_abel_factors() -> (YSeries, YSeries) {
    let s = Poly::from_ints(&[1, 0, -1]);
    let t = Poly::from_ints(&[-1, 0, -6, 0, 15]);
    let half = Poly::new(vec![rat(-1, 2), int(0), int(1)]);
    let f52 = Poly::from_ints(&[-2, 0, 5]);
    let x = Poly::x();
    let n = exact(vec![
        Poly::one(),
        (&(&x * &s) * &half).scale(&int(-8)),
        &(&s.pow(2) * &half) * &t,
    ]);
    let d = exact(vec![
        Poly::one(),
        (&(&x * &s) * &f52).scale(&int(-2)),
        (&(&s.pow(2) * &f52) * &t).scale(&rat(1, 3)),
    ]);
    (n, d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportLeg {
    pub y0: f64,
    pub y1: f64,
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndpointLeg {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "super::bivariate")]
    pub n_tilde: YSeries,
    #[serde(with = "super::bivariate")]
    pub d_tilde: YSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GgsCertificate {
    pub equation: AbelEquation,
    pub abel: AbelIntegral,
    pub order: usize,
    #[serde(with = "serde_rational::vec")]
    pub coefficients: Vec<Rational>,
    pub endpoints: Vec<EndpointLeg>,
    pub common_factor: Option<crate::composition::DecompositionResult>,
    pub witness: UniversalVerdict,
    pub transport: TransportLeg,
}

#[derive(Clone, Debug)]
pub struct GgsOptions {
    pub order: usize,
    pub max_word_length: usize,
    pub y0: f64,
    pub tolerance: f64,
}

impl Default for GgsOptions {
    fn default() -> Self {
        GgsOptions {
            order: 10,
            max_word_length: 3,
            y0: 1e-3,
            tolerance: 1e-9,
        }
    }
}

fn leg(name: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::CertificateFailed(name.into()))
    }
}

/// Derives the Abel equation from the `k = 2` master system and certifies a
/// center on `[−1, 1]` with no common composition factor.
pub fn ggs_pipeline(opts: &GgsOptions) -> Result<GgsCertificate> {
    let master = generate_master(2, &Poly::x())?;
    let lienard = lienard_form(&master.foliation)?;
    let (p, q) = ggs_coefficients();
    leg("Liénard coefficients", lienard.p == p && lienard.q == q)?;
    let iv = Interval::new(int(-1), int(1));
    let abel = abel_first_integral(&master, &lienard, iv.clone())?;
    let (n_exp, d_exp) = ggs_abel_factors();
    leg("Abel first-integral factors", abel.n_tilde == n_exp && abel.d_tilde == d_exp)?;
    let eq = abel.equation.clone();

    let endpoints: Vec<EndpointLeg> = [int(-1), int(1)]
        .into_iter()
        .map(|x| EndpointLeg {
            n_tilde: abel.n_tilde.at_x(&x),
            d_tilde: abel.d_tilde.at_x(&x),
            x,
        })
        .collect();
    let one = YSeries::one(YSeries::UNTRUNCATED);
    leg(
        "H(±1, y) = y^2",
        endpoints.iter().all(|e| e.n_tilde == one && e.d_tilde == one),
    )?;

    let big_p = p.integrate_from(&iv.x0);
    let big_q = q.integrate_from(&iv.x0);
    let factor = common_factor(&big_p, &big_q, &iv);
    leg("no common composition factor", factor.is_none())?;

    let cfg = NumericConfig::default();
    let (center, (witness, y1)) = par::join(
        || return_map(&eq, opts.order, true),
        || {
            par::join(
                || universal_check(&eq, opts.max_word_length, None),
                || transport(&eq, opts.y0, &cfg),
            )
        },
    );
    let coefficients = center?.coefficients;
    leg("c_n = 0", coefficients.iter().all(Zero::is_zero))?;
    leg("nonzero witness word", matches!(witness, UniversalVerdict::NotUniversal { .. }))?;
    let y1 = y1?;
    let deviation = (y1 - opts.y0).abs();
    leg("numeric transport is the identity", deviation <= opts.tolerance)?;

    Ok(GgsCertificate {
        equation: eq,
        abel,
        order: opts.order,
        coefficients,
        endpoints,
        common_factor: factor,
        witness,
        transport: TransportLeg {
            y0: opts.y0,
            y1,
            deviation,
            tolerance: opts.tolerance,
        },
    })
}
