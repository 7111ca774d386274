//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use abel_core::centers::AbelEquation;
use abel_core::exactpoly::{int, rat, Poly};
use abel_core::iterint::Interval;
use abel_core::yseries::YSeries;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer coefficients in `[-r, r]`, degree at most `deg`.
pub fn rand_poly(rng: &mut impl Rng, deg: usize, r: i64) -> Poly {
    Poly::from_ints(&(0..=deg).map(|_| rng.gen_range(-r..=r)).collect::<Vec<_>>())
}

/// Exactly degree `deg`.
pub fn rand_poly_exact(rng: &mut impl Rng, deg: usize, r: i64) -> Poly {
    loop {
        let p = rand_poly(rng, deg, r);
        if p.degree() == Some(deg) {
            return p;
        }
    }
}

/// Monic, zero constant term, degree `deg`.
pub fn rand_inner(rng: &mut impl Rng, deg: usize, r: i64) -> Poly {
    let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(-r..=r)).collect();
    c[0] = 0;
    c.push(1);
    Poly::from_ints(&c)
}

pub fn unit() -> Interval {
    Interval::new(int(0), int(1))
}

pub fn rand_interval(rng: &mut impl Rng) -> Interval {
    let choices = [
        (int(0), int(1)),
        (int(-1), int(1)),
        (rat(-1, 2), int(2)),
        (int(1), rat(1, 3)),
    ];
    let (a, b) = choices[rng.gen_range(0..choices.len())].clone();
    Interval::new(a, b)
}

pub fn rand_equation(rng: &mut impl Rng, m: usize, deg: usize, iv: Interval) -> AbelEquation {
    AbelEquation::new((0..m).map(|_| rand_poly(rng, deg, 3)).collect(), iv)
}

/// `(x − x0)(x − x1)`, equal at both endpoints.
pub fn closing_w(iv: &Interval) -> Poly {
    &Poly::new(vec![-iv.x0.clone(), int(1)]) * &Poly::new(vec![-iv.x1.clone(), int(1)])
}

pub fn exact(coeffs: Vec<Poly>) -> YSeries {
    YSeries::exact(coeffs)
}

pub fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 0..=max_deg + 1).prop_map(|c| Poly::from_ints(&c))
}
