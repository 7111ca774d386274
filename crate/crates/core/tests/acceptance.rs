//! Acceptance harness: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Every random input is drawn from a fixed ChaCha seed, so a run is reproducible.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use abel_core::centers::*;
use abel_core::composition::{moments, pcc_check, PccVerdict};
use abel_core::darboux::*;
use abel_core::exactpoly::{int, rat, Poly};
use abel_core::iterint::{iterated_integral, shuffle_sum, Word};
use abel_core::melnikov::*;
use abel_core::numeric::{quadrature, transport, NumericConfig};
use abel_core::yseries::YSeries;
use abel_core::Rational;
use common::*;
use num_traits::{One, Zero};
use rand::Rng;

/// Numeric transport deviation bound for the certified center.
const TRANSPORT_TOL: f64 = 1e-9;
/// Wall-clock budget for the full center certificate.
const GGS_BUDGET: Duration = Duration::from_secs(120);
/// Relative error of truncated second-order series against quadrature.
const M2_REL_TOL: f64 = 1e-6;
/// Quadrature tolerances used as the reference value.
const QUAD_ABS: f64 = 1e-16;
const QUAD_REL: f64 = 1e-13;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn brudnyi_matches_picard() -> Outcome {
    let mut r = rng(101);
    for i in 0..50 {
        let m = r.gen_range(1..=3);
        let iv = rand_interval(&mut r);
        let eq = rand_equation(&mut r, m, 4, iv);
        let picard = picard_coefficients(&eq, 6).map_err(|e| e.to_string())?;
        check(brudnyi_coefficients(&eq, 6) == picard, || format!("equation {i} differs"))?;
    }
    Ok("50 equations, c_1..c_6 equal".into())
}

fn worked_examples() -> Outcome {
    let mut factorial = Rational::one();
    for alpha in [int(2), rat(-1, 3), rat(5, 2)] {
        let f = YSeries::monomial(Poly::constant(alpha.clone()), 1, YSeries::UNTRUNCATED);
        let phi = first_integral_series(&f, &int(0), 8).map_err(|e| e.to_string())?;
        let expected: Vec<Rational> = (0..=8)
            .map(|k| {
                if k > 0 {
                    factorial *= int(k);
                } else {
                    factorial = Rational::one();
                }
                num_traits::pow(alpha.clone(), k as usize) / &factorial
            })
            .collect();
        check(phi.coeff(1) == Poly::new(expected), || format!("linear α = {alpha}"))?;
        check((2..=9).all(|j| phi.coeff(j).is_zero()), || "linear: stray y-powers".into())?;
    }
    let f = YSeries::monomial(Poly::from_ints(&[0, 2]), 2, YSeries::UNTRUNCATED);
    for x0 in [int(0), rat(1, 2), int(-1)] {
        let phi = first_integral_series(&f, &x0, 10).map_err(|e| e.to_string())?;
        let base = Poly::new(vec![-&x0 * &x0, int(0), int(1)]);
        for n in 0..=10u32 {
            check(phi.coeff(n as usize + 1) == base.pow(n), || format!("quadratic x0 = {x0}, n = {n}"))?;
        }
    }
    Ok("exp series to order 8; (x²−x0²)ⁿ to order 10".into())
}

fn fourth_coefficient_weights() -> Outcome {
    // the c₄ expansion, word by word
    let expected: [(&[usize], i64); 8] = [
        (&[4], 1),
        (&[3, 1], 2),
        (&[2, 2], 3),
        (&[1, 3], 4),
        (&[2, 1, 1], 6),
        (&[1, 2, 1], 8),
        (&[1, 1, 2], 12),
        (&[1, 1, 1, 1], 24),
    ];
    let words = compositions(4, 4);
    check(words.len() == expected.len(), || format!("{} compositions", words.len()))?;
    for (w, weight) in expected {
        check(words.iter().any(|c| c == w), || format!("{w:?} missing"))?;
        check(composition_weight(w) == int(weight), || format!("{w:?} has weight {}", composition_weight(w)))?;
    }
    Ok("weights 2, 3, 4, 6, 8, 12, 24 on their words".into())
}

fn shuffle_and_reversal() -> Outcome {
    let mut r = rng(104);
    for i in 0..100 {
        let total = r.gen_range(0..=5);
        let split = r.gen_range(0..=total);
        let mut form = || rand_poly(&mut r, 3, 4);
        let w1 = Word::new((0..split).map(|_| form()).collect());
        let w2 = Word::new((split..total).map(|_| form()).collect());
        let iv = rand_interval(&mut r);
        let product = iterated_integral(&w1, &iv) * iterated_integral(&w2, &iv);
        check(product == shuffle_sum(&w1, &w2, &iv), || format!("shuffle, sample {i}"))?;
        let joined = Word::new([w1.forms(), w2.forms()].concat());
        let sign = if total % 2 == 0 { int(1) } else { int(-1) };
        check(
            iterated_integral(&joined.reversed(), &iv.reversed()) == sign * iterated_integral(&joined, &iv),
            || format!("reversal, sample {i}"),
        )?;
    }
    Ok("100 word pairs".into())
}

fn ggs_certificate() -> Outcome {
    let start = Instant::now();
    let cert = ggs_pipeline(&GgsOptions::default()).map_err(|e| e.to_string())?;
    check(cert.coefficients.len() == 10 && cert.coefficients.iter().all(Zero::is_zero), || {
        "c_n ≠ 0 for some n ≤ 10".into()
    })?;
    let one = YSeries::one(YSeries::UNTRUNCATED);
    check(cert.endpoints.len() == 2, || "endpoint legs missing".into())?;
    for e in &cert.endpoints {
        check(e.n_tilde == one && e.d_tilde == one, || format!("H({}, y) ≠ y²", e.x))?;
    }
    check(cert.common_factor.is_none(), || "common factor found".into())?;
    let witness = match &cert.witness {
        UniversalVerdict::NotUniversal { word, value } if word.len() <= 3 && !value.is_zero() => {
            format!("{word:?} = {value}")
        }
        v => return Err(format!("no witness word: {v:?}")),
    };
    let mut worst: f64 = 0.0;
    for y0 in [1e-3, -1e-3, 1e-2, -1e-2] {
        let y1 = transport(&cert.equation, y0, &NumericConfig::default()).map_err(|e| e.to_string())?;
        worst = worst.max((y1 - y0).abs());
    }
    check(worst < TRANSPORT_TOL, || format!("transport deviation {worst:e}"))?;
    let elapsed = start.elapsed();
    check(elapsed < GGS_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("witness {witness}, max |y(1) − y0| = {worst:.1e}, {elapsed:.2?}"))
}

fn q4_integrals() -> Outcome {
    for alpha in [rat(-1, 2), rat(1, 3), int(2), int(-5)] {
        let (fol, h) = q4_fixture(&alpha);
        check(verify_first_integral(&fol, &h), || format!("α = {alpha}"))?;
    }
    Ok("α ∈ {−1/2, 1/3, 2, −5}".into())
}

fn master_family() -> Outcome {
    for k in 1..=2 {
        let m = generate_master(k, &Poly::x()).map_err(|e| e.to_string())?;
        check(verify_first_integral(&m.foliation, &m.integral), || format!("k = {k}"))?;
    }
    let m = generate_master(2, &Poly::x()).map_err(|e| e.to_string())?;
    let l = lienard_form(&m.foliation).map_err(|e| e.to_string())?;
    let p = Poly::from_ints(&[2, 0, -30, 0, 40]);
    let q = [[0, 1, 0, 0, 0], [-1, 1, 0, 0, 0], [1, 1, 0, 0, 0], [-3, 0, 5, 0, 0], [-1, 0, -6, 0, 15]]
        .iter()
        .fold(Poly::one(), |acc, c| &acc * &Poly::from_ints(c));
    check(l.p == p, || format!("p = {}", l.p))?;
    check(l.q == q, || format!("q = {}", l.q))?;
    Ok("k = 1, 2 verify; Liénard p, q match".into())
}

fn moment_problem() -> Outcome {
    let mut r = rng(108);
    for i in 0..50 {
        let iv = rand_interval(&mut r);
        let w = &closing_w(&iv) * &rand_poly(&mut r, 1, 2);
        let w = if w.degree().unwrap_or(0) < 2 { closing_w(&iv) } else { w };
        let outer_a = { let d = r.gen_range(1..=2); rand_poly_exact(&mut r, d, 3) };
        let outer_q = { let d = r.gen_range(1..=2); rand_poly_exact(&mut r, d, 3) };
        let big_a = outer_a.compose(&w);
        let q = outer_q.compose(&w).derivative();
        let m = moments(&q, &big_a, &iv, 20);
        check(m.iter().all(Zero::is_zero), || format!("composite triple {i}"))?;
    }
    let mut found = 0;
    let mut drawn = 0;
    while found < 20 {
        drawn += 1;
        check(drawn < 1000, || "could not draw non-composite pairs".into())?;
        let iv = unit();
        let big_a = &closing_w(&iv) * &{ let d = r.gen_range(1..=2); rand_poly_exact(&mut r, d, 3) };
        let big_q = { let d = r.gen_range(2..=4); rand_poly_exact(&mut r, d, 3) };
        let big_q = &big_q - &Poly::constant(big_q.eval(&iv.x0));
        if big_q.degree().unwrap_or(0) < 1 || !matches!(pcc_check(&big_q, &big_a, &iv), PccVerdict::NoPcc) {
            continue;
        }
        let bound = big_a.degree().unwrap() + big_q.degree().unwrap();
        let m = moments(&big_q.derivative(), &big_a, &iv, bound);
        check(m.iter().any(|v| !v.is_zero()), || format!("non-composite pair {found} has vanishing moments"))?;
        found += 1;
    }
    Ok("50 composite triples m_0..m_20 = 0; 20 non-composite pairs nonzero".into())
}

fn pq_reduction() -> Outcome {
    let mut r = rng(109);
    let pairs = [(1u32, 2u32), (2, 3), (3, 4)];
    let (mut literal_ok, mut second_order) = (0, 0);
    for i in 0..30 {
        let (p, q) = pairs[r.gen_range(0..pairs.len())];
        let n = r.gen_range(1..=4);
        let mut coeffs: Vec<Poly> = (0..=n).map(|_| rand_poly(&mut r, 2, 3)).collect();
        if coeffs[0].is_zero() {
            coeffs[0] = Poly::one();
        }
        if coeffs[n].is_zero() {
            coeffs[n] = Poly::x();
        }
        let base = YSeries::exact(coeffs);
        let tp = solve_pq(&base, p, q, n).map_err(|e| format!("sample {i}: {e}"))?;
        check(tp.holds(), || format!("sample {i}: P^p ≠ Q^q mod y^(n+1)"))?;
        let (dy, dx) = pair_one_form(&tp);
        check((0..n).all(|j| dy.coeff(j).is_zero() && dx.coeff(j).is_zero()), || {
            format!("sample {i}: not divisible by y^{n}")
        })?;
        let fol = reduce_foliation(&tp).map_err(|e| format!("sample {i}: {e}"))?;
        check(fol.q.coeff(0).is_zero(), || format!("sample {i}: reduced form nonzero on y = 0"))?;
        if n == 2 {
            second_order += 1;
            let c = closed_form_coefficients(&tp, R4Form::Complete);
            check(fol.p == YSeries::exact(vec![c.r2.clone(), c.r1.clone()]), || format!("sample {i}: r1, r2"))?;
            check(-&fol.q == YSeries::exact(vec![Poly::zero(), c.r4.clone(), c.r3.clone()]), || {
                format!("sample {i}: r3, r4")
            })?;
            if closed_form_coefficients(&tp, R4Form::ConstantLeading).r4 == c.r4 {
                literal_ok += 1;
            }
        }
    }
    Ok(format!(
        "30 pairs reduce; {second_order} at n = 2 match the complete r4 \
         (the constant-leading r4 matches {literal_ok} of {second_order})"
    ))
}

/// Random systems with `M₁ ≡ 0`: `a`, `q₁` pulled back through a closing `W`, `∫p₁ = 0`.
fn m1_free_system(r: &mut impl Rng) -> PerturbedAbel {
    let iv = unit();
    let w = closing_w(&iv);
    let pull = |p: Poly| &p.compose(&w) * &w.derivative();
    let a = pull(rand_poly_exact(r, 1, 2));
    let q1 = pull(rand_poly(r, 1, 2));
    let p1 = (&w * &rand_poly(r, 1, 2)).derivative();
    let p2 = rand_poly(r, 2, 2);
    let q2 = rand_poly(r, 2, 2);
    PerturbedAbel::new(
        a,
        vec![PerturbationForm { p: p1, q: q1 }, PerturbationForm { p: p2, q: q2 }],
        iv,
    )
    .expect("closing a")
}

fn melnikov_consistency() -> Outcome {
    let mut r = rng(110);
    for i in 0..20 {
        let iv = rand_interval(&mut r);
        let w = closing_w(&iv);
        let a = &rand_poly_exact(&mut r, 1, 2).compose(&w) * &w.derivative();
        let form = PerturbationForm { p: rand_poly(&mut r, 3, 3), q: rand_poly(&mut r, 3, 3) };
        let sys = PerturbedAbel::new(a, vec![form.clone()], iv.clone()).map_err(|e| e.to_string())?;
        let m1 = melnikov1(&sys, 10).map_err(|e| e.to_string())?;
        check(m1.tail == moments(&form.q, sys.big_a(), &iv, 10), || format!("M1 tail, system {i}"))?;
    }
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let sys = m1_free_system(&mut r);
        let big_a = sys.big_a().clone();
        for cross in [CrossTermSign::Negative, CrossTermSign::Positive] {
            let m2 = melnikov2(&sys, 12, M2Options { force: false, cross }).map_err(|e| format!("system {i}: {e}"))?;
            for h in [10.0, 100.0] {
                let g = &m2.integrand;
                let exact = quadrature(|x| g.eval_f64(x) / (h - big_a.eval_f64(x)).powi(2), 0.0, 1.0, QUAD_ABS, QUAD_REL);
                let partial = m2.series.eval_tail(h);
                let err = if exact == 0.0 { partial.abs() } else { ((partial - exact) / exact).abs() };
                worst = worst.max(err);
                check(err <= M2_REL_TOL, || format!("system {i}, {cross:?}, h = {h}: rel err {err:e}"))?;
            }
        }
    }
    Ok(format!("M1 tail = moments; M2 max rel err {worst:.1e} (both cross-term signs)"))
}

fn necessary_conditions_hold() -> Outcome {
    let mut fixtures: Vec<AbelEquation> = Vec::new();
    let cert_eq = ggs_pipeline(&GgsOptions::default()).map_err(|e| e.to_string())?.equation;
    fixtures.push(cert_eq);
    let mut r = rng(111);
    for _ in 0..20 {
        let iv = rand_interval(&mut r);
        let w = closing_w(&iv);
        fixtures.push(AbelEquation::new(
            (0..2).map(|_| &rand_poly(&mut r, 2, 3).compose(&w) * &w.derivative()).collect(),
            iv,
        ));
    }
    for _ in 0..40 {
        fixtures.push(rand_equation(&mut r, 2, 2, unit()));
    }
    let mut certified = 0;
    for (i, eq) in fixtures.iter().enumerate() {
        if !return_map(eq, 3, true).map_err(|e| e.to_string())?.is_identity() {
            continue;
        }
        certified += 1;
        let nc = necessary_conditions(eq).map_err(|e| e.to_string())?;
        check(nc.all_vanish(), || format!("fixture {i}: {nc:?}"))?;
    }
    check(certified >= 21, || format!("only {certified} fixtures certified"))?;
    Ok(format!("{certified} of {} fixtures certified; all conditions vanish", fixtures.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("word formula equals first-integral series", brudnyi_matches_picard),
        ("worked first-integral examples", worked_examples),
        ("fourth coefficient weights", fourth_coefficient_weights),
        ("shuffle and reversal", shuffle_and_reversal),
        ("non-universal center certificate", ggs_certificate),
        ("quartic Darboux fixture", q4_integrals),
        ("master family", master_family),
        ("moments under composition", moment_problem),
        ("P^p = Q^q reduction", pq_reduction),
        ("bifurcation function consistency", melnikov_consistency),
        ("necessary center conditions", necessary_conditions_hold),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.2?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
