//! Weierstrass preparation `f = u·P` in the standard degree filtration.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{Exponent, Precision, PrecisionSeries};
use crate::order::LinearForm;

/// `f ≡ unit·poly` up to total degree `mu`, with `poly` monic of degree `p`
/// in `x_var` and its other coefficients vanishing at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prepared {
    pub var: usize,
    pub p: u32,
    pub mu: u64,
    pub poly: PrecisionSeries,
    pub unit: PrecisionSeries,
    /// `a_1, …, a_p`, where `a_j` multiplies `x_var^{p−j}`, as series in the
    /// remaining variables.
    pub coeffs: Vec<PrecisionSeries>,
    #[serde(serialize_with = "crate::diagram::ser_rational")]
    pub unit_constant: BigRational,
    /// True when `f = unit·poly` holds exactly with both factors polynomial.
    pub exact: bool,
}

fn trunc(s: &PrecisionSeries, b: u64) -> PrecisionSeries {
    s.truncate(&BigRational::from_integer(b.into())).as_polynomial()
}

fn y_degree(e: &Exponent, var: usize) -> u64 {
    e.degree() - e[var] as u64
}

/// Prepares `f` with respect to `x_var`.
///
/// The factors of the polynomial `j^μ f` are lifted degree by degree in the
/// variables other than `x_var`. Division by `x_var^p` loses `p` degrees at
/// each step, so the lifting runs to degree `μ·p + p + 1` internally and is
/// cut back to `μ` at the end.
pub fn weierstrass_prepare(f: &PrecisionSeries, var: usize, mu: u64) -> Result<Prepared> {
    let n = f.dim();
    if var >= n {
        return Err(Error::IndexOutOfRange {
            index: var,
            allowed: format!("0..{n}"),
        });
    }
    let form = LinearForm::standard(n);
    let fs = f.with_form(&form)?;
    let mu_r = BigRational::from_integer(mu.into());
    if !fs.precision().covers(&mu_r) {
        return Err(Error::PrecisionShortfall {
            needed: mu.to_string(),
            available: fs.precision().to_string(),
        });
    }
    let p = fs
        .terms()
        .keys()
        .filter(|e| y_degree(e, var) == 0)
        .map(|e| e[var])
        .min()
        .filter(|&p| p as u64 <= mu)
        .ok_or_else(|| Error::NotRegular {
            var,
            prec: mu.to_string(),
        })?;
    let big = mu * p as u64 + p as u64 + 1;
    let source = if fs.is_exact() { trunc(&fs, big) } else { trunc(&fs, mu) };

    let mut groups = vec![PrecisionSeries::exact_zero(n); mu as usize + 1];
    for (e, c) in source.terms() {
        let d = y_degree(e, var) as usize;
        if d <= mu as usize {
            groups[d] = groups[d].add(&PrecisionSeries::monomial(form.clone(), e.clone(), c.clone()))?;
        }
    }

    // f(0, t) = t^p·e(t); invert e as a series in t alone
    let mut e_coeffs = vec![BigRational::zero(); big as usize + 1];
    for (e, c) in groups[0].terms() {
        let k = (e[var] - p) as usize;
        if k <= big as usize {
            e_coeffs[k] = c.clone();
        }
    }
    let mut inv = vec![BigRational::zero(); big as usize + 1];
    inv[0] = BigRational::one() / &e_coeffs[0];
    for k in 1..=big as usize {
        let mut s = BigRational::zero();
        for i in 1..=k {
            s += &e_coeffs[i] * &inv[k - i];
        }
        inv[k] = -s * &inv[0];
    }
    let t_series = |v: &[BigRational]| {
        PrecisionSeries::from_terms(
            form.clone(),
            Precision::Exact,
            v.iter().enumerate().map(|(k, c)| {
                let mut x = vec![0u32; n];
                x[var] = k as u32;
                (Exponent::new(x), c.clone())
            }),
        )
    };
    let u0 = t_series(&e_coeffs);
    let u0_inv = t_series(&inv);

    let mut t_p = vec![0u32; n];
    t_p[var] = p;
    let mut ps = vec![PrecisionSeries::monomial(form.clone(), Exponent::new(t_p.clone()), BigRational::one())];
    let mut us = vec![u0.clone()];
    for d in 1..=mu as usize {
        let mut h = groups[d].clone();
        for a in 1..d {
            h = h.sub(&trunc(&us[a].mul(&ps[d - a])?, big))?;
        }
        let q = trunc(&h.mul(&u0_inv)?, big);
        let mut pd = Vec::new();
        let mut rest = Vec::new();
        for (e, c) in q.terms() {
            if e[var] < p {
                pd.push((e.clone(), c.clone()));
            } else {
                let mut v = e.entries().to_vec();
                v[var] -= p;
                rest.push((Exponent::new(v), c.clone()));
            }
        }
        ps.push(PrecisionSeries::from_terms(form.clone(), Precision::Exact, pd));
        let rest = PrecisionSeries::from_terms(form.clone(), Precision::Exact, rest);
        us.push(trunc(&u0.mul(&rest)?, big));
    }

    let sum = |parts: &[PrecisionSeries]| -> Result<PrecisionSeries> {
        let mut acc = PrecisionSeries::exact_zero(n);
        for s in parts {
            acc = acc.add(&trunc(s, mu))?;
        }
        Ok(acc)
    };
    let poly = sum(&ps)?;
    let unit = sum(&us)?;
    let product = unit.mul(&poly)?;
    if trunc(&product, mu).sub(&trunc(&fs, mu))?.len() != 0 {
        return Err(Error::InvalidArgument("preparation failed to reproduce f".into()));
    }
    let exact = fs.is_exact() && product.sub(&fs)?.is_empty();
    let prec = if exact { Precision::Exact } else { Precision::Upto(mu_r) };
    let poly = poly.with_precision(prec.clone());
    let unit = unit.with_precision(prec);
    let coeffs = (1..=p).map(|j| poly.coefficient_of_power(var, p - j)).collect();
    Ok(Prepared {
        var,
        p,
        mu,
        unit_constant: unit.constant_term(),
        poly,
        unit,
        coeffs,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expression, ParseContext};

    fn prep(src: &str, names: &[&str], var: usize, mu: u64) -> Result<Prepared> {
        let ctx = ParseContext::standard(names, mu as i64 + 4);
        weierstrass_prepare(&parse_expression(src, &ctx).unwrap(), var, mu)
    }

    #[test]
    fn monomial_times_unit() {
        let w = prep("-4*x^3", &["x"], 0, 10).unwrap();
        assert_eq!(w.p, 3);
        assert!(w.exact);
        assert_eq!(w.unit_constant, BigRational::from_integer((-4).into()));
        assert!(w.coeffs.iter().all(|c| c.is_exact_zero()));
    }

    #[test]
    fn already_distinguished() {
        let w = prep("y^2 - x^3", &["x", "y"], 1, 10).unwrap();
        assert!(w.exact);
        assert_eq!(w.p, 2);
        assert_eq!(w.coeffs[0].len(), 0);
        assert_eq!(w.coeffs[1].len(), 1);
    }

    #[test]
    fn genuine_unit() {
        // (1 + x) y^2 + x^3: unit 1 + x, polynomial y^2 + x^3 - x^4 + ...
        let w = prep("y^2 + x*y^2 + x^3", &["x", "y"], 1, 10).unwrap();
        assert_eq!(w.p, 2);
        assert!(!w.exact);
        assert_eq!(w.unit.len(), 2);
        assert_eq!(w.coeffs[1].len(), 8);
        assert_eq!(w.unit_constant, BigRational::one());
        let w = prep("y^2 + y^3 + x*y + x^5", &["x", "y"], 1, 10).unwrap();
        assert!(!w.exact);
        for c in &w.coeffs {
            assert!(c.constant_term().is_zero());
        }
    }

    #[test]
    fn not_regular() {
        assert!(matches!(prep("x*y", &["x", "y"], 1, 6), Err(Error::NotRegular { .. })));
        assert!(matches!(prep("y^9", &["x", "y"], 1, 6), Err(Error::NotRegular { .. })));
    }
}
