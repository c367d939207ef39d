#![allow(dead_code)]

use num_rational::BigRational;
use rand::Rng;

use hironaka::{Exponent, IdealPresentation, LinearForm, Precision, PrecisionSeries};

pub fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn rand_exponent(rng: &mut impl Rng, n: usize, max_deg: u32) -> Exponent {
    let deg = rng.gen_range(0..=max_deg);
    let mut v = vec![0u32; n];
    for _ in 0..deg {
        v[rng.gen_range(0..n)] += 1;
    }
    Exponent::new(v)
}

pub fn rand_coeff(rng: &mut impl Rng) -> BigRational {
    let num = loop {
        let c: i64 = rng.gen_range(-6..=6);
        if c != 0 {
            break c;
        }
    };
    BigRational::new(num.into(), rng.gen_range(1i64..=3).into())
}

/// Exact polynomial with up to `terms` terms of degree at most `max_deg`.
pub fn rand_poly(rng: &mut impl Rng, form: &LinearForm, terms: usize, max_deg: u32) -> PrecisionSeries {
    let n = form.dim();
    let t: Vec<_> = (0..terms)
        .map(|_| (rand_exponent(rng, n, max_deg), rand_coeff(rng)))
        .collect();
    PrecisionSeries::from_terms(form.clone(), Precision::Exact, t)
}

/// Nonzero, without constant term, with a term of degree at most `low`.
pub fn rand_nonunit(rng: &mut impl Rng, form: &LinearForm, terms: usize, low: u32, max_deg: u32) -> PrecisionSeries {
    let n = form.dim();
    loop {
        let mut t: Vec<_> = (0..terms)
            .map(|_| (rand_exponent(rng, n, max_deg), rand_coeff(rng)))
            .collect();
        let mut lead = rand_exponent(rng, n, low);
        if lead.is_zero() {
            lead = Exponent::unit(n, rng.gen_range(0..n));
        }
        t.push((lead, rand_coeff(rng)));
        let p = PrecisionSeries::from_terms(form.clone(), Precision::Exact, t);
        if !p.is_empty() && p.constant_term() == q(0) {
            return p;
        }
    }
}

pub fn ideal(gens: Vec<PrecisionSeries>) -> IdealPresentation {
    IdealPresentation::with_default_names(gens).unwrap()
}

pub fn monomial(form: &LinearForm, e: &[u32]) -> PrecisionSeries {
    PrecisionSeries::monomial(form.clone(), Exponent::new(e.to_vec()), q(1))
}
