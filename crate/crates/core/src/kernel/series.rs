use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Exponent;
use crate::order::LinearForm;

/// Certification bound of a series: every coefficient with L-value at most
/// the bound is known exactly; nothing is claimed above it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    /// A genuine polynomial; all coefficients are known.
    Exact,
    Upto(BigRational),
}

impl Precision {
    pub fn upto(v: i64) -> Self {
        Precision::Upto(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn bound(&self) -> Option<&BigRational> {
        match self {
            Precision::Exact => None,
            Precision::Upto(p) => Some(p),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Precision::Exact)
    }

    /// True when this precision certifies every exponent with L-value ≤ `mu`.
    pub fn covers(&self, mu: &BigRational) -> bool {
        match self {
            Precision::Exact => true,
            Precision::Upto(p) => p >= mu,
        }
    }
}

impl PartialOrd for Precision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Precision {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Precision::Exact, Precision::Exact) => Ordering::Equal,
            (Precision::Exact, _) => Ordering::Greater,
            (_, Precision::Exact) => Ordering::Less,
            (Precision::Upto(a), Precision::Upto(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Exact => write!(f, "exact"),
            Precision::Upto(p) => write!(f, "{p}"),
        }
    }
}

/// A sparse truncated power series in `n` variables over `ℚ`.
///
/// Invariants: no stored coefficient is zero, and when the precision is finite
/// every stored exponent has L-value at most the precision under `form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionSeries {
    n: usize,
    terms: BTreeMap<Exponent, BigRational>,
    prec: Precision,
    form: LinearForm,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl PrecisionSeries {
    /// Zero with the given certification (exact zero when `prec` is `Exact`).
    pub fn zero(form: LinearForm, prec: Precision) -> Self {
        PrecisionSeries {
            n: form.dim(),
            terms: BTreeMap::new(),
            prec,
            form,
        }
    }

    pub fn exact_zero(n: usize) -> Self {
        Self::zero(LinearForm::standard(n), Precision::Exact)
    }

    pub fn constant(form: LinearForm, c: BigRational) -> Self {
        let n = form.dim();
        Self::from_terms(form, Precision::Exact, [(Exponent::zero(n), c)])
    }

    pub fn one(form: LinearForm) -> Self {
        Self::constant(form, BigRational::one())
    }

    pub fn variable(form: LinearForm, i: usize) -> Self {
        let n = form.dim();
        Self::from_terms(form, Precision::Exact, [(Exponent::unit(n, i), BigRational::one())])
    }

    pub fn monomial(form: LinearForm, e: Exponent, c: BigRational) -> Self {
        Self::from_terms(form, Precision::Exact, [(e, c)])
    }

    /// Builds a series, summing repeated exponents, dropping zeros and any
    /// term beyond the precision.
    pub fn from_terms<I>(form: LinearForm, prec: Precision, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let n = form.dim();
        let bound = prec.bound().map(|p| form.scaled_bound(p));
        let mut map: BTreeMap<Exponent, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.dim(), n, "exponent dimension must match the form");
            if let Some(b) = bound {
                if form.key(&e) > b {
                    continue;
                }
            }
            accumulate(&mut map, e, c);
        }
        PrecisionSeries {
            n,
            terms: map,
            prec,
            form,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, BigRational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Exponent, BigRational> {
        self.terms
    }

    pub fn form(&self) -> &LinearForm {
        &self.form
    }

    pub fn precision(&self) -> &Precision {
        &self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_exact()
    }

    /// No stored terms: zero up to the precision (or exactly zero).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_exact()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Exponent::zero(self.n))
    }

    /// The smallest scaled L-level over the support.
    pub fn lowest_key(&self) -> Option<u64> {
        self.terms.keys().map(|e| self.form.key(e)).min()
    }

    /// Order (minimal L-value of the support) under the own form.
    pub fn order(&self) -> Option<BigRational> {
        self.lowest_key().map(|k| self.form.value_of_key(k))
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// The certification bound re-expressed under another form on the same
    /// variables: the largest `q` with `{L' ≤ q} ⊂ {L ≤ p}`.
    pub fn precision_under(&self, other: &LinearForm) -> Precision {
        match &self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Upto(p) if *other == self.form => Precision::Upto(p.clone()),
            Precision::Upto(p) => Precision::Upto(p * self.form.min_ratio_to(other)),
        }
    }

    /// Reinterprets the series under another linear form, recasting the
    /// precision conservatively.
    pub fn with_form(&self, form: &LinearForm) -> Result<PrecisionSeries> {
        if form.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: form.dim(),
            });
        }
        let prec = self.precision_under(form);
        Ok(Self::from_terms(form.clone(), prec, self.terms.clone()))
    }

    /// Drops every term with L-value above `mu`; the precision becomes
    /// `min(prec, mu)`.
    pub fn truncate(&self, mu: &BigRational) -> PrecisionSeries {
        let prec = std::cmp::min(self.prec.clone(), Precision::Upto(mu.clone()));
        Self::from_terms(self.form.clone(), prec, self.terms.clone())
    }

    /// The same terms declared as an exact polynomial.
    pub fn as_polynomial(&self) -> PrecisionSeries {
        PrecisionSeries {
            prec: Precision::Exact,
            ..self.clone()
        }
    }

    pub fn with_precision(&self, prec: Precision) -> PrecisionSeries {
        Self::from_terms(self.form.clone(), prec, self.terms.clone())
    }

    fn combined_form(&self, other: &PrecisionSeries) -> Result<LinearForm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.form == other.form || other.is_exact() {
            Ok(self.form.clone())
        } else if self.is_exact() {
            Ok(other.form.clone())
        } else {
            Err(Error::FormMismatch)
        }
    }

    pub fn add(&self, other: &PrecisionSeries) -> Result<PrecisionSeries> {
        let form = self.combined_form(other)?;
        let prec = std::cmp::min(self.prec.clone(), other.prec.clone());
        let terms = self.terms.iter().chain(&other.terms).map(|(e, c)| (e.clone(), c.clone()));
        Ok(Self::from_terms(form, prec, terms))
    }

    pub fn sub(&self, other: &PrecisionSeries) -> Result<PrecisionSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PrecisionSeries {
        PrecisionSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &BigRational) -> PrecisionSeries {
        if c.is_zero() {
            return Self::zero(self.form.clone(), self.prec.clone());
        }
        PrecisionSeries {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
            ..self.clone()
        }
    }

    /// Multiplication by `c·x^γ`. The precision shifts by `L(γ)`.
    pub fn mul_monomial(&self, gamma: &Exponent, c: &BigRational) -> PrecisionSeries {
        if c.is_zero() {
            return Self::zero(self.form.clone(), self.prec.clone());
        }
        let shift = self.form.value_of_key(self.form.key(gamma));
        let prec = match &self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Upto(p) => Precision::Upto(p + shift),
        };
        PrecisionSeries {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.add(gamma), v * c)).collect(),
            prec,
            form: self.form.clone(),
        }
    }

    /// Product with precision bookkeeping.
    ///
    /// Writing `a = A + O(L > μ_a)` and `b = B + O(L > μ_b)`, the product is
    /// certified to `min(μ_a + ord B, μ_b + ord A)`, where the order of an
    /// empty part is replaced by its own precision and exact operands
    /// contribute no bound. A product with an exact zero is an exact zero.
    pub fn mul(&self, other: &PrecisionSeries) -> Result<PrecisionSeries> {
        let form = self.combined_form(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(form, Precision::Exact));
        }
        let prec = product_precision(self, other, &form);
        let bound = prec.bound().map(|p| form.scaled_bound(p));
        let mut map: BTreeMap<Exponent, BigRational> = BTreeMap::new();
        let b_keyed: Vec<(u64, &Exponent, &BigRational)> =
            other.terms.iter().map(|(e, c)| (form.key(e), e, c)).collect();
        for (ea, ca) in &self.terms {
            let ka = form.key(ea);
            for (kb, eb, cb) in &b_keyed {
                if let Some(b) = bound {
                    if ka + kb > b {
                        continue;
                    }
                }
                accumulate(&mut map, ea.add(eb), ca * *cb);
            }
        }
        Ok(PrecisionSeries {
            n: self.n,
            terms: map,
            prec,
            form,
        })
    }

    pub fn pow(&self, k: u32) -> Result<PrecisionSeries> {
        let mut acc = Self::one(self.form.clone());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `f(Mx)`: each variable `x_i` is replaced by `Σ_j M[i][j]·x_j`.
    ///
    /// The precision is rescaled by `min λ / max λ` (unchanged for forms with
    /// equal weights).
    pub fn substitute_linear(&self, m: &[Vec<i64>]) -> Result<PrecisionSeries> {
        let n = self.n;
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.len(),
            });
        }
        if determinant(m).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let prec = match &self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Upto(p) => {
                let w = self.form.weights();
                let lo = w.iter().min().cloned().unwrap_or_else(BigRational::one);
                let hi = w.iter().max().cloned().unwrap_or_else(BigRational::one);
                Precision::Upto(p * lo / hi)
            }
        };
        let form = self.form.clone();
        let images: Vec<PrecisionSeries> = m
            .iter()
            .map(|row| {
                Self::from_terms(
                    form.clone(),
                    Precision::Exact,
                    row.iter()
                        .enumerate()
                        .map(|(j, &a)| (Exponent::unit(n, j), rat(a))),
                )
            })
            .collect();
        let mut powers: Vec<Vec<PrecisionSeries>> = images
            .iter()
            .map(|img| vec![Self::one(form.clone()), img.clone()])
            .collect();
        let mut acc = Self::zero(form.clone(), prec.clone());
        for (e, c) in &self.terms {
            let mut term = Self::constant(form.clone(), c.clone()).with_precision(prec.clone());
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    let next = match &prec {
                        Precision::Upto(p) => next.truncate(p).as_polynomial(),
                        Precision::Exact => next,
                    };
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][ei as usize])?;
                if let Precision::Upto(p) = &prec {
                    term = term.truncate(p);
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc.with_precision(prec))
    }

    /// `F(0)`: keeps the terms with `β_{k+1} = … = β_n = 0`, as a series in the
    /// first `k` variables.
    pub fn evaluate_tail_zero(&self, k: usize) -> Result<PrecisionSeries> {
        if k == 0 || k >= self.n {
            return Err(Error::IndexOutOfRange {
                index: k,
                allowed: format!("1..{}", self.n),
            });
        }
        let form = self.form.restrict(k);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.tail_is_zero(k))
            .map(|(e, c)| (e.head(k), c.clone()));
        Ok(Self::from_terms(form, self.prec.clone(), terms))
    }

    /// Coefficient of `x_var^d` as a series in the remaining variables.
    pub fn coefficient_of_power(&self, var: usize, d: u32) -> PrecisionSeries {
        let form = self.form.without(var);
        let shift = self.form.value_of_key(self.form.scaled_weights()[var] * d as u64);
        let prec = match &self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Upto(p) => Precision::Upto(p - shift),
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] == d)
            .map(|(e, c)| (remove_coordinate(e, var), c.clone()))
            .collect::<Vec<_>>();
        Self::from_terms(form, prec, terms)
    }

    /// Embeds a series in `n` variables into `n + 1` variables by inserting a
    /// new coordinate (with weight `weight`) at position `var`.
    pub fn insert_variable(&self, var: usize, form: &LinearForm) -> PrecisionSeries {
        assert_eq!(form.dim(), self.n + 1);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut v = e.entries().to_vec();
                v.insert(var, 0);
                (Exponent::new(v), c.clone())
            })
            .collect::<Vec<_>>();
        // Terms involving the new coordinate are known to vanish.
        let prec = self.precision_under(&form.without(var));
        Self::from_terms(form.clone(), prec, terms)
    }

    /// Highest power of `x_var` occurring.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn is_free_of(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] == 0)
    }

    /// Writes the series in parseable syntax using `names` for the variables.
    pub fn to_expr_string(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&Exponent, &BigRational)> = self.terms.iter().collect();
        ordered.sort_by_key(|(e, _)| self.form.order_key(e));
        let mut out = String::new();
        for (i, (e, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(j, &p)| {
                    let name = names.get(j).cloned().unwrap_or_else(|| format!("x{}", j + 1));
                    if p == 1 {
                        name
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{abs}*{}", mono.join("*")));
            }
        }
        out
    }

    pub fn default_names(n: usize) -> Vec<String> {
        match n {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            _ => (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn to_repr(&self) -> SeriesRepr {
        SeriesRepr {
            n: self.n,
            weights: self.form.weights().iter().map(|w| w.to_string()).collect(),
            precision: self.prec.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.entries().to_vec(), c.to_string()))
                .collect(),
        }
    }

    pub fn from_repr(r: &SeriesRepr) -> Result<PrecisionSeries> {
        let parse = |s: &str| {
            s.parse::<BigRational>()
                .map_err(|_| Error::InvalidArgument(format!("bad rational `{s}`")))
        };
        let weights = r.weights.iter().map(|w| parse(w)).collect::<Result<Vec<_>>>()?;
        let form = LinearForm::new(weights)?;
        if form.dim() != r.n {
            return Err(Error::DimensionMismatch {
                expected: r.n,
                found: form.dim(),
            });
        }
        let prec = if r.precision == "exact" {
            Precision::Exact
        } else {
            Precision::Upto(parse(&r.precision)?)
        };
        let terms = r
            .terms
            .iter()
            .map(|(e, c)| {
                if e.len() != r.n {
                    return Err(Error::DimensionMismatch {
                        expected: r.n,
                        found: e.len(),
                    });
                }
                Ok((Exponent::new(e.clone()), parse(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(form, prec, terms))
    }
}

/// Serializable form of a series with rationals written as `p/q` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRepr {
    pub n: usize,
    pub weights: Vec<String>,
    pub precision: String,
    pub terms: Vec<(Vec<u32>, String)>,
}

impl Serialize for PrecisionSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrecisionSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::deserialize(d)?;
        PrecisionSeries::from_repr(&r).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PrecisionSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string(&Self::default_names(self.n)))?;
        if let Precision::Upto(p) = &self.prec {
            write!(f, " + O(L>{p})")?;
        }
        Ok(())
    }
}

fn product_precision(a: &PrecisionSeries, b: &PrecisionSeries, form: &LinearForm) -> Precision {
    let order_or_prec = |s: &PrecisionSeries| -> Option<BigRational> {
        match s.terms.keys().map(|e| form.key(e)).min() {
            Some(k) => Some(form.value_of_key(k)),
            None => s.precision_under(form).bound().cloned(),
        }
    };
    let pa = a.precision_under(form);
    let pb = b.precision_under(form);
    let mut best: Option<BigRational> = None;
    if let Some(p) = pa.bound() {
        if let Some(o) = order_or_prec(b) {
            best = Some(p + o);
        }
    }
    if let Some(p) = pb.bound() {
        if let Some(o) = order_or_prec(a) {
            let cand = p + o;
            best = Some(match best {
                Some(b) if b <= cand => b,
                _ => cand,
            });
        }
    }
    match best {
        Some(p) => Precision::Upto(p),
        None => Precision::Exact,
    }
}

pub(crate) fn accumulate(map: &mut BTreeMap<Exponent, BigRational>, e: Exponent, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub(crate) fn remove_coordinate(e: &Exponent, var: usize) -> Exponent {
    let mut v = e.entries().to_vec();
    v.remove(var);
    Exponent::new(v)
}

/// Determinant of an integer matrix by exact rational elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&v| rat(v)).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}
