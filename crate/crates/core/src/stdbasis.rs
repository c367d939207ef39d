//! s-series, standard representations, Becker's criterion and completion of
//! a generator list to a standard basis at a fixed precision.
//!
//! All work happens modulo the monomials with L-value above `μ`. In that
//! quotient the usual pair criterion is exact, so a verified basis gives the
//! true diagram of initial exponents on `{L ≤ μ}`.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::division::{hironaka_divide, DivisionResult};
use crate::error::{Error, Result};
use crate::kernel::{Exponent, IdealPresentation, Precision, PrecisionSeries};
use crate::order::{initial_exponent, LinearForm};

/// Outcome of one pair in a Becker check or a completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub lcm: Exponent,
    /// Skipped because the heads are coprime.
    pub coprime: bool,
    pub reduces: bool,
    /// Head of the nonzero remainder, when the pair fails.
    pub remainder_head: Option<Exponent>,
}

/// Where an element of a completed basis came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Input generator with this index.
    Input(usize),
    /// Normalized remainder of the s-series of two earlier elements
    /// (indices into the unpruned list).
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedBasis {
    pub gens: Vec<PrecisionSeries>,
    pub form: LinearForm,
    pub mu: BigRational,
    pub verified: bool,
    pub provenance: Vec<Provenance>,
    pub pairs: Vec<PairReport>,
    /// `cofactors[k][i]` is the coefficient of input generator `i` in
    /// `gens[k]`, modulo L-values above `mu`. Only filled on request.
    pub cofactors: Option<Vec<Vec<PrecisionSeries>>>,
    /// Set when completion stopped at the size budget.
    pub budget_exhausted: bool,
}

impl CertifiedBasis {
    pub fn heads(&self) -> Vec<Exponent> {
        self.gens
            .iter()
            .map(|g| initial_exponent(&self.form, g).expect("basis elements have certified heads"))
            .collect()
    }

    /// Number of elements adjoined by completion.
    pub fn adjoined(&self) -> usize {
        self.provenance
            .iter()
            .filter(|p| matches!(p, Provenance::Pair(..)))
            .count()
    }
}

/// `S(F,G) = g_β x^{γ−α} F − f_α x^{γ−β} G` with `x^γ` the lcm of the heads.
pub fn s_series(f: &PrecisionSeries, g: &PrecisionSeries, form: &LinearForm) -> Result<PrecisionSeries> {
    let f = f.with_form(form)?;
    let g = g.with_form(form)?;
    let a = initial_exponent(form, &f)?;
    let b = initial_exponent(form, &g)?;
    let gamma = a.lcm(&b);
    let fa = f.coeff(&a);
    let gb = g.coeff(&b);
    let left = f.mul_monomial(&gamma.checked_sub(&a).unwrap(), &gb);
    let right = g.mul_monomial(&gamma.checked_sub(&b).unwrap(), &fa);
    left.sub(&right)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardRepresentation {
    pub holds: bool,
    /// The division witnessing the answer; absent for an exact zero input.
    pub division: Option<DivisionResult>,
}

/// Whether `f` reduces to zero modulo `{L > μ}` by division through `s`.
/// The division quotients then form a standard representation.
pub fn has_standard_representation(
    f: &PrecisionSeries,
    s: &[PrecisionSeries],
    form: &LinearForm,
    mu: &BigRational,
) -> Result<StandardRepresentation> {
    if s.is_empty() {
        return Err(Error::EmptyDivisors);
    }
    if f.is_exact_zero() {
        return Ok(StandardRepresentation {
            holds: true,
            division: None,
        });
    }
    let div = hironaka_divide(f, s, form, mu)?;
    Ok(StandardRepresentation {
        holds: div.remainder.is_empty(),
        division: Some(div),
    })
}

fn check_heads(s: &[PrecisionSeries], form: &LinearForm, mu: &BigRational) -> Result<Vec<Exponent>> {
    let bound = form.scaled_bound(mu);
    s.iter()
        .map(|g| {
            let h = initial_exponent(form, g)?;
            if form.key(&h) > bound {
                return Err(Error::PrecisionShortfall {
                    needed: form.value_of_key(form.key(&h)).to_string(),
                    available: mu.to_string(),
                });
            }
            Ok(h)
        })
        .collect()
}

/// Checks every pair of `s` for a standard representation of its s-series at
/// precision `μ`. With `coprime` set, pairs with coprime heads are accepted
/// without computation.
pub fn becker_check(
    s: &[PrecisionSeries],
    form: &LinearForm,
    mu: &BigRational,
    coprime: bool,
) -> Result<CertifiedBasis> {
    let gens = s.iter().map(|g| g.with_form(form)).collect::<Result<Vec<_>>>()?;
    let heads = check_heads(&gens, form, mu)?;
    let mut pairs = Vec::new();
    for j in 0..gens.len() {
        for i in 0..j {
            pairs.push(check_pair(&gens, &heads, i, j, form, mu, coprime)?.0);
        }
    }
    Ok(CertifiedBasis {
        verified: pairs.iter().all(|p| p.reduces),
        provenance: (0..gens.len()).map(Provenance::Input).collect(),
        gens,
        form: form.clone(),
        mu: mu.clone(),
        pairs,
        cofactors: None,
        budget_exhausted: false,
    })
}

fn check_pair(
    gens: &[PrecisionSeries],
    heads: &[Exponent],
    i: usize,
    j: usize,
    form: &LinearForm,
    mu: &BigRational,
    coprime: bool,
) -> Result<(PairReport, Option<DivisionResult>)> {
    let lcm = heads[i].lcm(&heads[j]);
    if coprime && heads[i].is_coprime(&heads[j]) {
        let r = PairReport {
            i,
            j,
            lcm,
            coprime: true,
            reduces: true,
            remainder_head: None,
        };
        return Ok((r, None));
    }
    let s = s_series(&gens[i], &gens[j], form)?;
    let rep = has_standard_representation(&s, gens, form, mu)?;
    let remainder_head = rep
        .division
        .as_ref()
        .filter(|d| !d.remainder.is_empty())
        .map(|d| initial_exponent(form, &d.remainder))
        .transpose()?;
    let r = PairReport {
        i,
        j,
        lcm,
        coprime: false,
        reduces: rep.holds,
        remainder_head,
    };
    Ok((r, rep.division))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionOptions {
    pub coprime_criterion: bool,
    pub track_cofactors: bool,
    /// Maximal number of basis elements before giving up.
    pub max_basis: usize,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            coprime_criterion: true,
            track_cofactors: false,
            max_basis: 400,
        }
    }
}

pub fn complete(ideal: &IdealPresentation, form: &LinearForm, mu: &BigRational) -> Result<CertifiedBasis> {
    complete_with(ideal, form, mu, &CompletionOptions::default())
}

/// Buchberger-style closure modulo `{L > μ}`, selecting pairs by increasing
/// L-value of the head lcm. Nonzero remainders are made head-monic and
/// adjoined. At the end, elements whose head is a multiple of another
/// element's head are pruned (the earliest among equal heads survives).
pub fn complete_with(
    ideal: &IdealPresentation,
    form: &LinearForm,
    mu: &BigRational,
    opts: &CompletionOptions,
) -> Result<CertifiedBasis> {
    let inputs = ideal.generators_at(form, mu)?;
    let s = inputs.len();
    let bound = form.scaled_bound(mu);
    let jet = |g: &PrecisionSeries| g.truncate(mu).as_polynomial();

    let mut gens: Vec<PrecisionSeries> = Vec::new();
    let mut heads: Vec<Exponent> = Vec::new();
    let mut provenance = Vec::new();
    let mut cofactors: Vec<Vec<PrecisionSeries>> = Vec::new();
    let unit_vec = |i: usize| -> Vec<PrecisionSeries> {
        (0..s)
            .map(|k| {
                if k == i {
                    PrecisionSeries::one(form.clone())
                } else {
                    PrecisionSeries::zero(form.clone(), Precision::Exact)
                }
            })
            .collect()
    };
    for (i, g) in inputs.iter().enumerate() {
        // generators vanishing modulo {L > μ} contribute nothing
        let Ok(h) = initial_exponent(form, g) else { continue };
        if form.key(&h) > bound {
            continue;
        }
        heads.push(h);
        gens.push(g.clone());
        provenance.push(Provenance::Input(i));
        if opts.track_cofactors {
            cofactors.push(unit_vec(i));
        }
    }

    let mut queue: BTreeSet<(u64, usize, usize)> = BTreeSet::new();
    let push_pairs = |queue: &mut BTreeSet<(u64, usize, usize)>, heads: &[Exponent], j: usize| {
        for i in 0..j {
            queue.insert((form.key(&heads[i].lcm(&heads[j])), i, j));
        }
    };
    for j in 0..gens.len() {
        push_pairs(&mut queue, &heads, j);
    }

    let mut pairs = Vec::new();
    let mut budget_exhausted = false;
    while let Some((_, i, j)) = queue.pop_first() {
        let (mut report, div) = check_pair(&gens, &heads, i, j, form, mu, opts.coprime_criterion)?;
        if report.reduces {
            pairs.push(report);
            continue;
        }
        if gens.len() >= opts.max_basis {
            budget_exhausted = true;
            pairs.push(report);
            break;
        }
        let div = div.expect("a failing pair carries its division");
        let head = report.remainder_head.clone().unwrap();
        let inv = BigRational::one() / div.remainder.coeff(&head);
        let new = div.remainder.scale(&inv);
        if opts.track_cofactors {
            let ai = &heads[i];
            let aj = &heads[j];
            let gamma = ai.lcm(aj);
            let ci = gens[i].coeff(ai);
            let cj = gens[j].coeff(aj);
            let mi = gamma.checked_sub(ai).unwrap();
            let mj = gamma.checked_sub(aj).unwrap();
            let mut row = Vec::with_capacity(s);
            for k in 0..s {
                let mut c = cofactors[i][k]
                    .mul_monomial(&mi, &cj)
                    .sub(&cofactors[j][k].mul_monomial(&mj, &ci))?;
                for (l, q) in div.quotients.iter().enumerate() {
                    c = c.sub(&jet(q).mul(&cofactors[l][k])?)?;
                }
                row.push(jet(&c.scale(&inv)));
            }
            cofactors.push(row);
        }
        report.reduces = false;
        pairs.push(report);
        gens.push(new);
        heads.push(head);
        provenance.push(Provenance::Pair(i, j));
        push_pairs(&mut queue, &heads, gens.len() - 1);
    }

    // prune to an antichain of heads
    let keep: Vec<usize> = (0..gens.len())
        .filter(|&a| {
            !(0..gens.len()).any(|b| {
                b != a
                    && heads[a].is_multiple_of(&heads[b])
                    && (heads[a] != heads[b] || b < a)
            })
        })
        .collect();
    let pick = |v: &[PrecisionSeries]| keep.iter().map(|&k| v[k].clone()).collect::<Vec<_>>();
    Ok(CertifiedBasis {
        gens: pick(&gens),
        form: form.clone(),
        mu: mu.clone(),
        verified: !budget_exhausted,
        provenance: keep.iter().map(|&k| provenance[k].clone()).collect(),
        pairs,
        cofactors: opts
            .track_cofactors
            .then(|| keep.iter().map(|&k| cofactors[k].clone()).collect()),
        budget_exhausted,
    })
}

/// A remainder is zero modulo `{L > μ}` exactly when no term survives.
pub fn reduces_to_zero(f: &PrecisionSeries, basis: &CertifiedBasis) -> Result<bool> {
    if basis.gens.is_empty() {
        return Ok(f.truncate(&basis.mu).is_empty());
    }
    Ok(has_standard_representation(f, &basis.gens, &basis.form, &basis.mu)?.holds)
}

impl CertifiedBasis {
    pub fn contains_unit(&self) -> bool {
        self.heads().iter().any(|h| h.is_zero())
    }
}
