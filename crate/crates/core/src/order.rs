//! Total orders on `ℕⁿ` induced by positive linear forms.
//!
//! A form `L(β) = Σ λ_j β_j` with all `λ_j > 0` orders exponents by the
//! lexicographic order of the tuple `(L(β), β_n, …, β_{1})`. The initial
//! exponent of a series is the minimum of its support in this order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::kernel::{Exponent, PrecisionSeries};

/// A positive linear form on `ℚⁿ`.
///
/// Weights are stored both as rationals and scaled to a common denominator so
/// that comparisons run on machine integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    weights: Vec<BigRational>,
    scaled: Vec<u64>,
    denom: u64,
}

/// `L(β) = Σ_{i≤k} β_i + Σ_{j>k} l·β_j`, the weighting used by the flatness
/// criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightedSplitForm {
    pub k: usize,
    pub l: u64,
}

impl WeightedSplitForm {
    pub fn new(k: usize, l: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidForm("split weight l must be at least 1".into()));
        }
        Ok(WeightedSplitForm { k, l })
    }

    pub fn to_form(self, n: usize) -> Result<LinearForm> {
        if self.k == 0 || self.k > n {
            return Err(Error::IndexOutOfRange {
                index: self.k,
                allowed: format!("1..={n}"),
            });
        }
        let w = (0..n)
            .map(|j| if j < self.k { 1 } else { self.l })
            .collect::<Vec<_>>();
        LinearForm::from_integers(&w)
    }
}

/// Sort key realising the order: compare `(L(β), β_n, …, β_1)` lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderKey {
    pub level: u64,
    rev: Vec<u32>,
}

impl OrderKey {
    pub fn exponent(&self) -> Exponent {
        Exponent::new(self.rev.iter().rev().copied().collect())
    }
}

impl LinearForm {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidForm("all weights must be strictly positive".into()));
        }
        let mut denom = BigInt::one();
        for w in &weights {
            denom = denom.lcm(w.denom());
        }
        let scaled = weights
            .iter()
            .map(|w| {
                (w * BigRational::from_integer(denom.clone()))
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| Error::InvalidForm("weights too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let denom = denom
            .to_u64()
            .ok_or_else(|| Error::InvalidForm("weight denominators too large".into()))?;
        Ok(LinearForm {
            weights,
            scaled,
            denom,
        })
    }

    pub fn from_integers(weights: &[u64]) -> Result<Self> {
        Self::new(
            weights
                .iter()
                .map(|&w| BigRational::from_integer(BigInt::from(w)))
                .collect(),
        )
    }

    /// `L(β) = |β|`.
    pub fn standard(n: usize) -> Self {
        Self::from_integers(&vec![1; n]).expect("standard form is valid")
    }

    pub fn split(n: usize, k: usize, l: u64) -> Result<Self> {
        WeightedSplitForm::new(k, l)?.to_form(n)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn is_standard(&self) -> bool {
        self.scaled.iter().all(|&w| w == 1) && self.denom == 1
    }

    /// True when all weights are equal (the order is then degree-compatible in
    /// the usual sense and linear coordinate changes preserve L-levels).
    pub fn is_homogeneous(&self) -> bool {
        self.scaled.windows(2).all(|w| w[0] == w[1])
    }

    /// Integer weights scaled by the common denominator.
    pub fn scaled_weights(&self) -> &[u64] {
        &self.scaled
    }

    pub fn denominator(&self) -> u64 {
        self.denom
    }

    /// `L(β)·denominator`, an integer.
    pub fn key(&self, beta: &[u32]) -> u64 {
        debug_assert_eq!(beta.len(), self.scaled.len());
        beta.iter()
            .zip(&self.scaled)
            .map(|(&b, &w)| b as u64 * w)
            .sum()
    }

    pub fn order_key(&self, beta: &[u32]) -> OrderKey {
        OrderKey {
            level: self.key(beta),
            rev: beta.iter().rev().copied().collect(),
        }
    }

    /// Largest scaled key whose L-value does not exceed `bound`.
    pub fn scaled_bound(&self, bound: &BigRational) -> u64 {
        if bound.is_negative() {
            return 0;
        }
        (bound * BigRational::from_integer(BigInt::from(self.denom)))
            .floor()
            .to_integer()
            .to_u64()
            .unwrap_or(u64::MAX)
    }

    pub fn value_of_key(&self, key: u64) -> BigRational {
        BigRational::new(BigInt::from(key), BigInt::from(self.denom))
    }

    fn check_dim(&self, beta: &[u32]) -> Result<()> {
        if beta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: beta.len(),
            });
        }
        Ok(())
    }

    /// The first `k` weights as a form on `ℚᵏ`.
    pub fn restrict(&self, k: usize) -> LinearForm {
        LinearForm::new(self.weights[..k].to_vec()).expect("restriction of a positive form")
    }

    /// The form on the remaining coordinates after deleting `var`.
    pub fn without(&self, var: usize) -> LinearForm {
        let mut w = self.weights.clone();
        w.remove(var);
        LinearForm::new(w).expect("sub-form of a positive form")
    }

    /// Smallest ratio `λ'_j / λ_j` of `other` against `self`.
    pub(crate) fn min_ratio_to(&self, other: &LinearForm) -> BigRational {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| b / a)
            .min()
            .unwrap_or_else(BigRational::one)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_standard() {
            return write!(f, "std");
        }
        write!(f, "w:")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Textual form descriptor: `std`, `w:1,1,7` or `split:k=2,l=7`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormSpec {
    Standard,
    Weights(Vec<BigRational>),
    Split(WeightedSplitForm),
}

impl FormSpec {
    pub fn to_form(&self, n: usize) -> Result<LinearForm> {
        match self {
            FormSpec::Standard => Ok(LinearForm::standard(n)),
            FormSpec::Weights(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: w.len(),
                    });
                }
                LinearForm::new(w.clone())
            }
            FormSpec::Split(s) => s.to_form(n),
        }
    }
}

impl FromStr for FormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "std" {
            return Ok(FormSpec::Standard);
        }
        if let Some(rest) = s.strip_prefix("w:") {
            let w = rest
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<BigRational>()
                        .map_err(|_| Error::InvalidForm(format!("bad weight `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(FormSpec::Weights(w));
        }
        if let Some(rest) = s.strip_prefix("split:") {
            let mut k = None;
            let mut l = None;
            for part in rest.split(',') {
                let (name, val) = part
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidForm(format!("bad split field `{part}`")))?;
                let v: u64 = val
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidForm(format!("bad split value `{val}`")))?;
                match name.trim() {
                    "k" => k = Some(v as usize),
                    "l" => l = Some(v),
                    other => return Err(Error::InvalidForm(format!("unknown split field `{other}`"))),
                }
            }
            let (k, l) = k
                .zip(l)
                .ok_or_else(|| Error::InvalidForm("split needs k= and l=".into()))?;
            return Ok(FormSpec::Split(WeightedSplitForm::new(k, l)?));
        }
        Err(Error::InvalidForm(format!("unknown order `{s}`")))
    }
}

pub fn lvalue(form: &LinearForm, beta: &Exponent) -> Result<BigRational> {
    form.check_dim(beta)?;
    Ok(form.value_of_key(form.key(beta)))
}

pub fn compare(form: &LinearForm, a: &Exponent, b: &Exponent) -> Result<Ordering> {
    form.check_dim(a)?;
    form.check_dim(b)?;
    Ok(form.order_key(a).cmp(&form.order_key(b)))
}

/// The L-minimal exponent of `supp f`, certified against the precision of `f`
/// measured under `form`.
pub fn initial_exponent(form: &LinearForm, f: &PrecisionSeries) -> Result<Exponent> {
    if f.dim() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            found: f.dim(),
        });
    }
    let head = f
        .terms()
        .keys()
        .min_by_key(|e| form.order_key(e))
        .ok_or(Error::ZeroUpToPrecision)?;
    let prec = f.precision_under(form);
    if let Some(p) = prec.bound() {
        if form.key(head) > form.scaled_bound(p) {
            return Err(Error::ZeroUpToPrecision);
        }
    }
    Ok(head.clone())
}
