//! Expression trees for generator input. Transcendental builtins are only
//! meaningful as jets, so expansion always happens against a linear form and a
//! target precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{Exponent, Precision, PrecisionSeries};
use crate::order::LinearForm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigRational),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `exp(u)` for `u` without constant term.
    Exp(Box<Expr>),
    /// `geom(u) = Σ_{k≥0} u^k` for `u` without constant term.
    Geom(Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Num(BigRational::from_integer(BigInt::from(v)))
    }

    /// True when no builtin occurs, i.e. the expression is a polynomial.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_polynomial() && b.is_polynomial()
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.is_polynomial(),
            Expr::Exp(_) | Expr::Geom(_) => false,
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Geom(a) => a.max_var(),
        }
    }

    /// The sum of the terms of `f`, as an expression.
    pub fn from_terms(f: &PrecisionSeries) -> Expr {
        let mut acc: Option<Expr> = None;
        for (e, c) in f.terms() {
            let mut t = Expr::Num(c.clone());
            for (i, &a) in e.iter().enumerate() {
                if a > 0 {
                    t = Expr::Mul(Box::new(t), Box::new(Expr::Pow(Box::new(Expr::Var(i)), a)));
                }
            }
            acc = Some(match acc {
                None => t,
                Some(prev) => Expr::Add(Box::new(prev), Box::new(t)),
            });
        }
        acc.unwrap_or_else(|| Expr::int(0))
    }

    /// Sets every variable of index `≥ k` to zero.
    pub fn evaluate_tail_zero(&self, k: usize) -> Expr {
        let b = |x: &Expr| Box::new(x.evaluate_tail_zero(k));
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(i) if *i >= k => Expr::int(0),
            Expr::Var(_) => self.clone(),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Neg(x) => Expr::Neg(b(x)),
            Expr::Pow(x, e) => Expr::Pow(b(x), *e),
            Expr::Exp(x) => Expr::Exp(b(x)),
            Expr::Geom(x) => Expr::Geom(b(x)),
        }
    }

    /// Expands to a series under `form`. Polynomials come out exact; anything
    /// involving a builtin comes out certified to at most `prec`.
    pub fn expand(&self, form: &LinearForm, prec: &BigRational) -> Result<PrecisionSeries> {
        let s = self.expand_inner(form, prec)?;
        Ok(if s.is_exact() { s } else { s.truncate(prec) })
    }

    fn expand_inner(&self, form: &LinearForm, prec: &BigRational) -> Result<PrecisionSeries> {
        let n = form.dim();
        Ok(match self {
            Expr::Num(c) => PrecisionSeries::constant(form.clone(), c.clone()),
            Expr::Var(i) => {
                if *i >= n {
                    return Err(Error::IndexOutOfRange {
                        index: *i,
                        allowed: format!("0..{n}"),
                    });
                }
                PrecisionSeries::variable(form.clone(), *i)
            }
            Expr::Add(a, b) => a.expand_inner(form, prec)?.add(&b.expand_inner(form, prec)?)?,
            Expr::Sub(a, b) => a.expand_inner(form, prec)?.sub(&b.expand_inner(form, prec)?)?,
            Expr::Mul(a, b) => {
                let p = a.expand_inner(form, prec)?.mul(&b.expand_inner(form, prec)?)?;
                cap(p, prec)
            }
            Expr::Neg(a) => a.expand_inner(form, prec)?.neg(),
            Expr::Pow(a, k) => {
                let base = a.expand_inner(form, prec)?;
                let mut acc = PrecisionSeries::one(form.clone());
                for _ in 0..*k {
                    acc = cap(acc.mul(&base)?, prec);
                }
                acc
            }
            Expr::Exp(u) => {
                let u = u.expand_inner(form, prec)?;
                builtin_series(&u, form, prec, "exp", |k| {
                    BigRational::new(BigInt::one(), factorial(k))
                })?
            }
            Expr::Geom(u) => {
                let u = u.expand_inner(form, prec)?;
                builtin_series(&u, form, prec, "geom", |_| BigRational::one())?
            }
        })
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Non-exact intermediate results never need to be kept beyond the target.
fn cap(s: PrecisionSeries, prec: &BigRational) -> PrecisionSeries {
    if s.is_exact() {
        s
    } else {
        s.truncate(prec)
    }
}

/// `Σ_k coeff(k)·u^k` truncated at `prec`; `u` must vanish at the origin.
fn builtin_series(
    u: &PrecisionSeries,
    form: &LinearForm,
    prec: &BigRational,
    name: &str,
    coeff: impl Fn(u32) -> BigRational,
) -> Result<PrecisionSeries> {
    if !u.constant_term().is_zero() {
        return Err(Error::BuiltinOnUnit(name.to_string()));
    }
    let n = form.dim();
    // An error O(L > p_u) in u perturbs the sum only above p_u.
    let target = match u.precision().bound() {
        Some(pu) if pu < prec => pu.clone(),
        _ => prec.clone(),
    };
    let mut acc = PrecisionSeries::from_terms(
        form.clone(),
        Precision::Upto(target.clone()),
        [(Exponent::zero(n), coeff(0))],
    );
    let Some(order_key) = u.lowest_key() else {
        return Ok(acc);
    };
    let bound = form.scaled_bound(&target);
    let u = u.truncate(&target).as_polynomial();
    let mut power = PrecisionSeries::one(form.clone());
    let mut k = 1u32;
    while order_key * k as u64 <= bound {
        power = power.mul(&u)?.truncate(&target).as_polynomial();
        acc = acc.add(&power.scale(&coeff(k)))?;
        k += 1;
    }
    Ok(acc.with_precision(Precision::Upto(target)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn exp_jet_coefficients() {
        let form = LinearForm::standard(1);
        let e = Expr::Exp(Box::new(Expr::Var(0)));
        let s = e.expand(&form, &q(4, 1)).unwrap();
        assert_eq!(s.precision(), &Precision::upto(4));
        assert_eq!(s.len(), 5);
        assert_eq!(s.coeff(&Exponent::from([3])), q(1, 6));
        assert_eq!(s.coeff(&Exponent::from([4])), q(1, 24));
    }

    #[test]
    fn polynomial_stays_exact() {
        let form = LinearForm::standard(2);
        let e = Expr::Pow(
            Box::new(Expr::Add(Box::new(Expr::Var(0)), Box::new(Expr::Var(1)))),
            3,
        );
        let s = e.expand(&form, &q(1, 1)).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn builtin_on_unit_rejected() {
        let form = LinearForm::standard(1);
        let e = Expr::Exp(Box::new(Expr::Add(
            Box::new(Expr::int(1)),
            Box::new(Expr::Var(0)),
        )));
        assert_eq!(
            e.expand(&form, &q(3, 1)),
            Err(Error::BuiltinOnUnit("exp".into()))
        );
    }

    #[test]
    fn weighted_expansion_counts_levels() {
        // geom(z) with weight 3 on z, to L-value 7: 1 + z + z^2
        let form = LinearForm::from_integers(&[1, 3]).unwrap();
        let s = Expr::Geom(Box::new(Expr::Var(1))).expand(&form, &q(7, 1)).unwrap();
        assert_eq!(s.len(), 3);
    }
}
