//! Symmetric polynomials in `T_1, …, T_p`, their reduction to elementary
//! symmetric functions, and the generalized discriminants `Δ_j`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::PrecisionSeries;

/// Dense-keyed sparse polynomial over the rationals.
pub type Poly = BTreeMap<Vec<u32>, BigRational>;

pub const DEFAULT_DEGREE_CAP: usize = 6;

fn add_into(acc: &mut Poly, e: Vec<u32>, c: BigRational) {
    let v = acc.entry(e).or_insert_with(BigRational::zero);
    *v += c;
    if v.is_zero() {
        let zero_keys: Vec<_> = acc.iter().filter(|(_, c)| c.is_zero()).map(|(k, _)| k.clone()).collect();
        for k in zero_keys {
            acc.remove(&k);
        }
    }
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_one(p: usize) -> Poly {
    Poly::from([(vec![0; p], BigRational::one())])
}

/// `e_i(T_1, …, T_p)`.
pub fn elementary(p: usize, i: usize) -> Poly {
    let mut out = Poly::new();
    fn rec(p: usize, left: usize, start: usize, cur: &mut Vec<u32>, out: &mut Poly) {
        if left == 0 {
            out.insert(cur.clone(), BigRational::one());
            return;
        }
        for k in start..p {
            cur[k] = 1;
            rec(p, left - 1, k + 1, cur, out);
            cur[k] = 0;
        }
    }
    rec(p, i, 0, &mut vec![0; p], &mut out);
    out
}

/// The raw expansion `Σ_{|R| = j−1} ∏_{k≠l; k,l ∉ R} (T_k − T_l)`, summing
/// over subsets `R ⊂ {1,…,p}`.
pub fn expand_delta(p: usize, j: usize) -> Poly {
    let mut total = Poly::new();
    let mut subset = Vec::new();
    fn subsets(p: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..p {
            cur.push(k);
            subsets(p, size, k + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(p, j - 1, 0, &mut subset, &mut all);
    for r in all {
        let rest: Vec<usize> = (0..p).filter(|k| !r.contains(k)).collect();
        let mut prod = poly_one(p);
        for &k in &rest {
            for &l in &rest {
                if k == l {
                    continue;
                }
                let mut f = Poly::new();
                let mut ek = vec![0; p];
                ek[k] = 1;
                let mut el = vec![0; p];
                el[l] = 1;
                f.insert(ek, BigRational::one());
                f.insert(el, -BigRational::one());
                prod = poly_mul(&prod, &f);
            }
        }
        for (e, c) in prod {
            add_into(&mut total, e, c);
        }
    }
    total
}

/// A polynomial in `A_0, …, A_{p−1}`, where `A_k` is the elementary
/// symmetric function of degree `p − k` (so `A_0 = T_1⋯T_p` and
/// `A_{p−1} = T_1 + ⋯ + T_p`). Keys are exponent vectors over the `A_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricReduction {
    pub p: usize,
    #[serde(serialize_with = "ser_poly")]
    pub expr: Poly,
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.len()))?;
    for (e, c) in p {
        seq.serialize_element(&(e, c.to_string()))?;
    }
    seq.end()
}

struct PowerCache {
    p: usize,
    powers: HashMap<(usize, u32), Poly>,
}

impl PowerCache {
    fn get(&mut self, i: usize, k: u32) -> Poly {
        if k == 0 {
            return poly_one(self.p);
        }
        if let Some(v) = self.powers.get(&(i, k)) {
            return v.clone();
        }
        let v = poly_mul(&self.get(i, k - 1), &elementary(self.p, i));
        self.powers.insert((i, k), v.clone());
        v
    }
}

/// Rewrites a symmetric polynomial in the elementary symmetric functions by
/// repeatedly cancelling the lexicographically leading term.
pub fn reduce_symmetric(p: usize, poly: &Poly) -> Result<SymmetricReduction> {
    let mut rest = poly.clone();
    rest.retain(|_, c| !c.is_zero());
    let mut cache = PowerCache {
        p,
        powers: HashMap::new(),
    };
    let mut expr = Poly::new();
    while let Some((lead, c)) = rest.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
        if lead.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "not symmetric: leading exponent {lead:?} is not a partition"
            )));
        }
        // T^α is the leading term of e_1^{α1−α2} ⋯ e_p^{αp}
        let mut a_exp = vec![0u32; p];
        let mut term = poly_one(p);
        for i in 1..=p {
            let next = if i < p { lead[i] } else { 0 };
            let k = lead[i - 1] - next;
            a_exp[p - i] = k;
            if k > 0 {
                term = poly_mul(&term, &cache.get(i, k));
            }
        }
        for (e, v) in term {
            add_into(&mut rest, e, -(&c * v));
        }
        add_into(&mut expr, a_exp, c);
    }
    Ok(SymmetricReduction { p, expr })
}

impl SymmetricReduction {
    /// Substitutes `A_k = e_{p−k}(T)` back, giving a polynomial in `T`.
    pub fn substitute_elementary(&self) -> Poly {
        let p = self.p;
        let mut cache = PowerCache {
            p,
            powers: HashMap::new(),
        };
        let mut out = Poly::new();
        for (a, c) in &self.expr {
            let mut term = poly_one(p);
            for (k, &m) in a.iter().enumerate() {
                if m > 0 {
                    term = poly_mul(&term, &cache.get(p - k, m));
                }
            }
            for (e, v) in term {
                *out.entry(e).or_insert_with(BigRational::zero) += c * v;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Value at `A_k = a[k]`, where `a[k]` is the coefficient of `X^k` in a
    /// monic polynomial of degree `p`. Every `Δ_j` has even degree in `T`,
    /// so the sign change between coefficients and elementary functions of
    /// the roots cancels.
    pub fn evaluate(&self, a: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (e, c) in &self.expr {
            let mut t = c.clone();
            for (k, &m) in e.iter().enumerate() {
                for _ in 0..m {
                    t *= &a[k];
                }
            }
            total += t;
        }
        total
    }

    /// Same as [`evaluate`](Self::evaluate) with series coefficients.
    pub fn evaluate_series(&self, a: &[PrecisionSeries]) -> Result<PrecisionSeries> {
        let Some(first) = a.first() else {
            return Err(Error::InvalidArgument("no coefficients".into()));
        };
        let form = first.form().clone();
        let mut powers: HashMap<(usize, u32), PrecisionSeries> = HashMap::new();
        let mut total = PrecisionSeries::zero(form.clone(), crate::kernel::Precision::Exact);
        for (e, c) in &self.expr {
            let mut t = PrecisionSeries::constant(form.clone(), c.clone());
            for (k, &m) in e.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let pw = match powers.get(&(k, m)) {
                    Some(v) => v.clone(),
                    None => {
                        let v = a[k].pow(m)?;
                        powers.insert((k, m), v.clone());
                        v
                    }
                };
                t = t.mul(&pw)?;
            }
            total = total.add(&t)?;
        }
        Ok(total)
    }
}

/// Caches `Δ_j` per `(p, j)`.
pub struct DiscriminantCache {
    cap: usize,
    table: HashMap<(usize, usize), SymmetricReduction>,
}

impl Default for DiscriminantCache {
    fn default() -> Self {
        Self::with_cap(DEFAULT_DEGREE_CAP)
    }
}

impl DiscriminantCache {
    pub fn with_cap(cap: usize) -> Self {
        DiscriminantCache {
            cap,
            table: HashMap::new(),
        }
    }

    pub fn get(&mut self, p: usize, j: usize) -> Result<SymmetricReduction> {
        if p > self.cap {
            return Err(Error::DegreeCap { p, cap: self.cap });
        }
        if j == 0 || j > p {
            return Err(Error::IndexOutOfRange {
                index: j,
                allowed: format!("1..={p}"),
            });
        }
        if let Some(r) = self.table.get(&(p, j)) {
            return Ok(r.clone());
        }
        let r = reduce_symmetric(p, &expand_delta(p, j))?;
        self.table.insert((p, j), r.clone());
        Ok(r)
    }
}

/// `Δ_j` for `p` roots, reduced to `A_0, …, A_{p−1}`, from a process-wide
/// cache.
pub fn generalized_discriminant(p: usize, j: usize) -> Result<SymmetricReduction> {
    static CACHE: OnceLock<Mutex<DiscriminantCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(DiscriminantCache::default()));
    cache.lock().unwrap_or_else(|e| e.into_inner()).get(p, j)
}

/// For `X^p + a_{p−1}X^{p−1} + ⋯ + a_0` given as `[a_0, …, a_{p−1}]`, the
/// `j` with `Δ_1 = ⋯ = Δ_j = 0 ≠ Δ_{j+1}`; the polynomial then has `p − j`
/// distinct roots.
pub fn distinct_root_count_check(coeffs: &[BigRational], p: usize) -> Result<usize> {
    if coeffs.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: coeffs.len(),
        });
    }
    for j in 1..=p {
        if !generalized_discriminant(p, j)?.evaluate(coeffs).is_zero() {
            return Ok(j - 1);
        }
    }
    unreachable!("Δ_p = p never vanishes")
}

/// Number of distinct complex roots of a monic polynomial, via
/// `deg f − deg gcd(f, f')`. Independent of the discriminants.
pub fn distinct_roots_by_gcd(coeffs: &[BigRational]) -> usize {
    let mut f: Vec<BigRational> = coeffs.to_vec();
    f.push(BigRational::one());
    let df: Vec<BigRational> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer((k as i64).into()))
        .collect();
    let g = poly_gcd(f.clone(), df);
    (f.len() - 1) - (g.len() - 1)
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_gcd(a: Vec<BigRational>, b: Vec<BigRational>) -> Vec<BigRational> {
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        // a mod b
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let q = a.last().unwrap() / &lb;
            for (i, c) in b.iter().enumerate() {
                a[i + shift] -= &q * c;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}
