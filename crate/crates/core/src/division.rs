//! Hironaka division by a finite list of series at a finite precision.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{accumulate, Exponent, Precision, PrecisionSeries};
use crate::order::{initial_exponent, LinearForm, OrderKey};

/// Which part of the partition `{Δ_1, …, Δ_t, Δ}` an exponent falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `Δ_i` (0-based index into the divisor list).
    Delta(usize),
    Complement,
}

/// The partition of `ℕⁿ` determined by an ordered list of head exponents:
/// `Δ_1 = α¹ + ℕⁿ`, `Δ_i = (αⁱ + ℕⁿ) ∖ ∪_{j<i} Δ_j`, `Δ = ℕⁿ ∖ ∪ Δ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionPartition {
    heads: Vec<Exponent>,
}

impl RegionPartition {
    pub fn new(heads: Vec<Exponent>) -> Self {
        RegionPartition { heads }
    }

    pub fn heads(&self) -> &[Exponent] {
        &self.heads
    }

    /// The first listed head dividing `β` wins.
    pub fn region_of(&self, beta: &Exponent) -> Region {
        self.heads
            .iter()
            .position(|a| beta.is_multiple_of(a))
            .map(Region::Delta)
            .unwrap_or(Region::Complement)
    }
}

pub fn region_of(p: &RegionPartition, beta: &Exponent) -> Region {
    p.region_of(beta)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionResult {
    pub quotients: Vec<PrecisionSeries>,
    pub remainder: PrecisionSeries,
    /// `F ≡ Σ Q_i G_i + R` holds for every exponent with L-value at most this.
    pub certified_prec: BigRational,
    pub partition: RegionPartition,
    /// Number of reduction steps taken.
    pub steps: usize,
}

struct Divisor {
    head: Exponent,
    head_coeff: BigRational,
    tail: Vec<(Exponent, u64, BigRational)>,
}

fn check_cover(s: &PrecisionSeries, form: &LinearForm, mu: &BigRational) -> Result<()> {
    let p = s.precision_under(form);
    if !p.covers(mu) {
        return Err(Error::PrecisionShortfall {
            needed: mu.to_string(),
            available: p.to_string(),
        });
    }
    Ok(())
}

/// Divides `f` by `divisors` (in the given order) relative to `form`,
/// processing every exponent with L-value at most `mu`.
///
/// The running series is reduced term by term in increasing order: a term in
/// `Δ_i` is cancelled by a monomial multiple of `G_i`, a term in `Δ` moves to
/// the remainder. Every cancellation only introduces strictly larger
/// exponents, so the loop visits each exponent of `{L ≤ μ}` at most once.
pub fn hironaka_divide(
    f: &PrecisionSeries,
    divisors: &[PrecisionSeries],
    form: &LinearForm,
    mu: &BigRational,
) -> Result<DivisionResult> {
    if divisors.is_empty() {
        return Err(Error::EmptyDivisors);
    }
    let n = form.dim();
    for s in std::iter::once(f).chain(divisors) {
        if s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.dim(),
            });
        }
        check_cover(s, form, mu)?;
    }
    let bound = form.scaled_bound(mu);
    let mut prepared = Vec::with_capacity(divisors.len());
    for g in divisors {
        let head = initial_exponent(form, g)?;
        let head_coeff = g.coeff(&head);
        let tail = g
            .terms()
            .iter()
            .filter(|(e, _)| **e != head)
            .map(|(e, c)| (e.clone(), form.key(e), c.clone()))
            .collect();
        prepared.push(Divisor {
            head,
            head_coeff,
            tail,
        });
    }
    let partition = RegionPartition::new(prepared.iter().map(|d| d.head.clone()).collect());

    let mut truncated = false;
    let mut work: BTreeMap<OrderKey, BigRational> = BTreeMap::new();
    for (e, c) in f.terms() {
        if form.key(e) > bound {
            truncated = true;
            continue;
        }
        work.insert(form.order_key(e), c.clone());
    }
    let mut quotients: Vec<BTreeMap<Exponent, BigRational>> = vec![BTreeMap::new(); divisors.len()];
    let mut remainder: BTreeMap<Exponent, BigRational> = BTreeMap::new();
    let mut steps = 0usize;

    while let Some((key, c)) = work.pop_first() {
        steps += 1;
        let beta = key.exponent();
        match partition.region_of(&beta) {
            Region::Delta(i) => {
                let d = &prepared[i];
                let gamma = beta.checked_sub(&d.head).expect("region membership implies divisibility");
                let gamma_key = form.key(&gamma);
                let q = &c / &d.head_coeff;
                for (e, k, ce) in &d.tail {
                    if k + gamma_key > bound {
                        truncated = true;
                        continue;
                    }
                    let target = form.order_key(&e.add(&gamma));
                    let delta = &q * ce;
                    match work.entry(target) {
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(-delta);
                        }
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            *o.get_mut() -= delta;
                            if o.get().is_zero() {
                                o.remove();
                            }
                        }
                    }
                }
                accumulate(&mut quotients[i], gamma, q);
            }
            Region::Complement => {
                remainder.insert(beta, c);
            }
        }
    }

    let all_exact = f.is_exact() && divisors.iter().all(|g| g.is_exact());
    let exact = all_exact && !truncated;
    let quotients = quotients
        .into_iter()
        .zip(&prepared)
        .map(|(terms, d)| {
            let prec = if exact {
                Precision::Exact
            } else {
                Precision::Upto(mu - form.value_of_key(form.key(&d.head)))
            };
            PrecisionSeries::from_terms(form.clone(), prec, terms)
        })
        .collect();
    let remainder = PrecisionSeries::from_terms(
        form.clone(),
        if exact {
            Precision::Exact
        } else {
            Precision::Upto(mu.clone())
        },
        remainder,
    );
    Ok(DivisionResult {
        quotients,
        remainder,
        certified_prec: mu.clone(),
        partition,
        steps,
    })
}

impl DivisionResult {
    /// Checks the support conditions and `F ≡ Σ Q_i G_i + R` up to the
    /// certified precision. Returns a description of the first violation.
    pub fn verify(&self, f: &PrecisionSeries, divisors: &[PrecisionSeries]) -> std::result::Result<(), String> {
        let form = self.remainder.form().clone();
        for (i, q) in self.quotients.iter().enumerate() {
            let head = &self.partition.heads()[i];
            for e in q.terms().keys() {
                let shifted = e.add(head);
                if self.partition.region_of(&shifted) != Region::Delta(i) {
                    return Err(format!("quotient {i} term {e} leaves region {i}"));
                }
            }
        }
        for e in self.remainder.terms().keys() {
            if self.partition.region_of(e) != Region::Complement {
                return Err(format!("remainder term {e} lies in a divisor region"));
            }
        }
        let mu = &self.certified_prec;
        let mut acc = self.remainder.as_polynomial();
        for (q, g) in self.quotients.iter().zip(divisors) {
            let prod = q.as_polynomial().mul(&g.truncate(mu).as_polynomial()).map_err(|e| e.to_string())?;
            acc = acc.add(&prod).map_err(|e| e.to_string())?;
        }
        let diff = acc
            .sub(&f.with_form(&form).map_err(|e| e.to_string())?.truncate(mu).as_polynomial())
            .map_err(|e| e.to_string())?
            .truncate(mu);
        if !diff.is_zero() {
            return Err(format!("reconstruction fails: residual {diff}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expression, ParseContext};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn exact_monomial_division() {
        let ctx = ParseContext::standard(&["x", "y"], 10);
        let f = parse_expression("x^2*y", &ctx).unwrap();
        let g = parse_expression("x^2", &ctx).unwrap();
        let r = hironaka_divide(&f, &[g.clone()], &ctx.form, &q(10)).unwrap();
        assert_eq!(r.quotients[0], parse_expression("y", &ctx).unwrap());
        assert!(r.remainder.is_exact_zero());
        r.verify(&f, &[g]).unwrap();
    }

    #[test]
    fn geometric_quotient() {
        let ctx = ParseContext::standard(&["x"], 5);
        let f = parse_expression("x", &ctx).unwrap();
        let g = parse_expression("x - x^2", &ctx).unwrap();
        let r = hironaka_divide(&f, &[g.clone()], &ctx.form, &q(5)).unwrap();
        let expect = parse_expression("1 + x + x^2 + x^3 + x^4", &ctx).unwrap();
        assert_eq!(r.quotients[0].terms(), expect.terms());
        assert!(r.remainder.is_zero());
        assert_eq!(r.remainder.precision(), &Precision::upto(5));
        r.verify(&f, &[g]).unwrap();
    }

    #[test]
    fn regions() {
        let p = RegionPartition::new(vec![Exponent::from([2, 0])]);
        assert_eq!(region_of(&p, &Exponent::from([3, 1])), Region::Delta(0));
        let p = RegionPartition::new(vec![Exponent::from([2, 0]), Exponent::from([0, 3])]);
        assert_eq!(region_of(&p, &Exponent::from([1, 1])), Region::Complement);
        assert_eq!(region_of(&p, &Exponent::from([2, 3])), Region::Delta(0));
        assert_eq!(region_of(&p, &Exponent::from([1, 3])), Region::Delta(1));
    }

    #[test]
    fn errors() {
        let ctx = ParseContext::standard(&["x"], 5);
        let f = parse_expression("x", &ctx).unwrap();
        assert_eq!(
            hironaka_divide(&f, &[], &ctx.form, &q(5)),
            Err(Error::EmptyDivisors)
        );
        let zero = PrecisionSeries::zero(ctx.form.clone(), Precision::upto(5));
        assert_eq!(
            hironaka_divide(&f, &[zero], &ctx.form, &q(5)),
            Err(Error::ZeroUpToPrecision)
        );
        let jet = parse_expression("exp(x) - 1", &ctx).unwrap();
        assert!(matches!(
            hironaka_divide(&f, &[jet], &ctx.form, &q(6)),
            Err(Error::PrecisionShortfall { .. })
        ));
    }

    #[test]
    fn divisor_order_matters() {
        // x*y divided by (x, y) goes to the first divisor only
        let ctx = ParseContext::standard(&["x", "y"], 4);
        let f = parse_expression("x*y", &ctx).unwrap();
        let gx = parse_expression("x", &ctx).unwrap();
        let gy = parse_expression("y", &ctx).unwrap();
        let a = hironaka_divide(&f, &[gx.clone(), gy.clone()], &ctx.form, &q(4)).unwrap();
        let b = hironaka_divide(&f, &[gy, gx], &ctx.form, &q(4)).unwrap();
        assert_eq!(a.quotients[0], parse_expression("y", &ctx).unwrap());
        assert!(a.quotients[1].is_zero());
        assert_eq!(b.quotients[0], parse_expression("x", &ctx).unwrap());
    }
}
