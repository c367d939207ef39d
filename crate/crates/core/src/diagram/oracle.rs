//! Brute-force linear algebra in the jet space `K[x]/m^{η+1}`, independent of
//! division and standard bases.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{enumerate_sublevel, Exponent, IdealPresentation, PrecisionSeries};
use crate::order::LinearForm;

/// The span of `x^γ·g` (truncated at degree `η`) for a list of generators,
/// plus optionally a monomial ideal, inside the jet space of order `η`.
///
/// Rows are kept in echelon form keyed by their smallest column.
pub struct JetSpace {
    eta: u64,
    form: LinearForm,
    index: HashMap<Exponent, usize>,
    monomials: Vec<Exponent>,
    killed: Vec<bool>,
    rows: HashMap<usize, BTreeMap<usize, BigRational>>,
}

impl JetSpace {
    pub fn new(n: usize, eta: u64) -> Self {
        let form = LinearForm::standard(n);
        let mut monomials = enumerate_sublevel(&vec![1; n], eta);
        monomials.sort_by_key(|e| form.order_key(e));
        let index = monomials.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let killed = vec![false; monomials.len()];
        JetSpace {
            eta,
            form,
            index,
            monomials,
            killed,
            rows: HashMap::new(),
        }
    }

    pub fn eta(&self) -> u64 {
        self.eta
    }

    pub fn columns(&self) -> usize {
        self.monomials.len()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds the monomial ideal generated by `gens`. Must be called before any
    /// generator rows are added.
    pub fn add_monomial_ideal(&mut self, gens: &[Exponent]) {
        assert!(self.rows.is_empty(), "monomial ideals go in first");
        for (i, e) in self.monomials.iter().enumerate() {
            if gens.iter().any(|g| e.is_multiple_of(g)) {
                self.killed[i] = true;
            }
        }
    }

    /// Adds every monomial multiple of `g` that is visible at order `η`.
    pub fn add_generator(&mut self, g: &PrecisionSeries) -> Result<()> {
        let g = g.with_form(&self.form)?;
        let eta = BigRational::from_integer(self.eta.into());
        if !g.precision().covers(&eta) {
            return Err(Error::PrecisionShortfall {
                needed: eta.to_string(),
                available: g.precision().to_string(),
            });
        }
        let Some(ord) = g.terms().keys().map(|e| e.degree()).min() else {
            return Ok(());
        };
        if ord > self.eta {
            return Ok(());
        }
        let n = g.dim();
        for gamma in enumerate_sublevel(&vec![1; n], self.eta - ord) {
            let row: BTreeMap<usize, BigRational> = g
                .terms()
                .iter()
                .filter_map(|(e, c)| {
                    let m = e.add(&gamma);
                    self.index.get(&m).map(|&i| (i, c.clone()))
                })
                .collect();
            self.insert(row);
        }
        Ok(())
    }

    fn strip(&self, mut v: BTreeMap<usize, BigRational>) -> BTreeMap<usize, BigRational> {
        v.retain(|i, c| !self.killed[*i] && !c.is_zero());
        v
    }

    /// Reduces `v` against the echelon rows; returns what is left.
    fn reduce(&self, v: BTreeMap<usize, BigRational>) -> BTreeMap<usize, BigRational> {
        let mut v = self.strip(v);
        let mut out = BTreeMap::new();
        while let Some((c, a)) = v.pop_first() {
            match self.rows.get(&c) {
                Some(row) => {
                    for (j, b) in row.iter().skip(1) {
                        let e = v.entry(*j).or_insert_with(BigRational::zero);
                        *e -= &a * b;
                        if e.is_zero() {
                            v.remove(j);
                        }
                    }
                }
                None => {
                    out.insert(c, a);
                }
            }
        }
        out
    }

    fn insert(&mut self, v: BTreeMap<usize, BigRational>) {
        let mut v = self.strip(v);
        while let Some((&c, a)) = v.iter().next() {
            let a = a.clone();
            match self.rows.get(&c) {
                Some(row) => {
                    for (j, b) in row {
                        let e = v.entry(*j).or_insert_with(BigRational::zero);
                        *e -= &a * b;
                        if e.is_zero() {
                            v.remove(j);
                        }
                    }
                }
                None => {
                    let inv = BigRational::one() / a;
                    for x in v.values_mut() {
                        *x *= &inv;
                    }
                    self.rows.insert(c, v);
                    return;
                }
            }
        }
    }

    /// `dim K[x]/(J + m^{η+1})`.
    pub fn quotient_dim(&self) -> usize {
        self.killed.iter().filter(|k| !**k).count() - self.rank()
    }

    /// Whether the jet of `f` lies in `J + m^{η+1}`.
    pub fn contains(&self, f: &PrecisionSeries) -> bool {
        let v = f
            .terms()
            .iter()
            .filter_map(|(e, c)| self.index.get(e).map(|&i| (i, c.clone())))
            .collect();
        self.reduce(v).is_empty()
    }

    pub fn contains_monomial(&self, e: &Exponent) -> bool {
        match self.index.get(e) {
            None => true,
            Some(&i) => {
                self.killed[i] || self.reduce(BTreeMap::from([(i, BigRational::one())])).is_empty()
            }
        }
    }
}

/// Builds the jet space of `I + (monomials)` at order `η`.
pub fn jet_space(ideal: &IdealPresentation, eta: u64, monomials: &[Exponent]) -> Result<JetSpace> {
    let n = ideal.dim();
    let form = LinearForm::standard(n);
    let gens = ideal.generators_at(&form, &BigRational::from_integer(eta.into()))?;
    let mut space = JetSpace::new(n, eta);
    space.add_monomial_ideal(monomials);
    for g in &gens {
        space.add_generator(g)?;
    }
    Ok(space)
}

/// `dim K[x]/(I + m^{η+1})` by exact row reduction over the monomial basis.
pub fn oracle_jet_quotient_dim(ideal: &IdealPresentation, eta: u64) -> Result<usize> {
    Ok(jet_space(ideal, eta, &[])?.quotient_dim())
}

/// Every monomial of degree exactly `d` in `n` variables.
pub fn monomials_of_degree(n: usize, d: u64) -> Vec<Exponent> {
    enumerate_sublevel(&vec![1; n], d)
        .into_iter()
        .filter(|e| e.degree() == d)
        .collect()
}

/// Generators of `(x̃)^m · m^d`, where `x̃ = (x_{k+1}, …, x_n)`.
pub fn tail_power_times_max_power(n: usize, k: usize, m: u64, d: u64) -> Vec<Exponent> {
    monomials_of_degree(n, d + m)
        .into_iter()
        .filter(|e| e.entries()[k..].iter().map(|&v| v as u64).sum::<u64>() >= m)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expression, ParseContext};

    fn ideal(vars: &[&str], gens: &[&str]) -> IdealPresentation {
        let ctx = ParseContext::standard(vars, 20);
        IdealPresentation::new(
            vars.iter().map(|s| s.to_string()).collect(),
            gens.iter().map(|g| parse_expression(g, &ctx).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn monomial_ideal_values() {
        let i = ideal(&["x", "y"], &["x^2", "y^3"]);
        let h: Vec<usize> = (0..6).map(|e| oracle_jet_quotient_dim(&i, e).unwrap()).collect();
        assert_eq!(h, vec![1, 3, 5, 6, 6, 6]);
    }

    #[test]
    fn unit_ideal_is_zero() {
        let i = ideal(&["x", "y"], &["1 + x"]);
        assert_eq!(oracle_jet_quotient_dim(&i, 3).unwrap(), 0);
    }

    #[test]
    fn zero_like_ideal() {
        // x^9 is invisible at order 4
        let i = ideal(&["x"], &["x^9"]);
        assert_eq!(oracle_jet_quotient_dim(&i, 4).unwrap(), 5);
    }

    #[test]
    fn membership() {
        let i = ideal(&["x", "y"], &["x - y^2"]);
        let s = jet_space(&i, 4, &[]).unwrap();
        assert!(!s.contains_monomial(&Exponent::from([1, 0])));
        let ctx = ParseContext::standard(&["x", "y"], 4);
        assert!(s.contains(&parse_expression("x*y - y^3", &ctx).unwrap()));
        let with_y = jet_space(&i, 4, &[Exponent::from([0, 1])]).unwrap();
        assert!(with_y.contains_monomial(&Exponent::from([1, 0])));
    }

    #[test]
    fn tail_monomials() {
        let g = tail_power_times_max_power(2, 1, 1, 1);
        assert_eq!(g, vec![Exponent::from([0, 2]), Exponent::from([1, 1])]);
    }
}
