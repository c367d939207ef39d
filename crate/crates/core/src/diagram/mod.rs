//! Diagrams of initial exponents and what can be read off them: vertices,
//! staircase counts, Hilbert-Samuel functions, flatness and dimension.

mod invariants;
pub mod oracle;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{enumerate_sublevel, Exponent, IdealPresentation, PrecisionSeries};
use crate::order::LinearForm;
use crate::stdbasis::CertifiedBasis;

pub use invariants::{
    axis_vertex_dimension, flatness_weight_search, random_unimodular, reduction_exponent, AxisReport,
    FlatAttempt, FlatVerdict, FlatnessReport, ReductionReport, RemarkCheck,
};
pub use oracle::{jet_space, oracle_jet_quotient_dim, JetSpace};

/// `N = vertices + ℕⁿ`, known on `{L ≤ certified_to}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagram {
    pub n: usize,
    pub vertices: Vec<Exponent>,
    #[serde(skip)]
    pub form: LinearForm,
    #[serde(serialize_with = "crate::diagram::ser_rational")]
    pub certified_to: BigRational,
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Minimal elements of a list of exponents, deduplicated, in order-key order.
pub fn minimal_elements(form: &LinearForm, heads: &[Exponent]) -> Vec<Exponent> {
    let mut v: Vec<Exponent> = heads
        .iter()
        .filter(|a| !heads.iter().any(|b| b != *a && a.is_multiple_of(b)))
        .cloned()
        .collect();
    v.sort_by_key(|e| form.order_key(e));
    v.dedup();
    v
}

impl Diagram {
    pub fn new(form: LinearForm, heads: &[Exponent], certified_to: BigRational) -> Self {
        Diagram {
            n: form.dim(),
            vertices: minimal_elements(&form, heads),
            form,
            certified_to,
        }
    }

    pub fn contains(&self, beta: &Exponent) -> bool {
        self.vertices.iter().any(|v| beta.is_multiple_of(v))
    }

    /// Vertex on the axis of `x_i`, if any.
    pub fn axis_vertex(&self, i: usize) -> Option<&Exponent> {
        self.vertices.iter().find(|v| v.axis() == Some(i))
    }

    /// Largest `k` such that each of the first `k` axes carries a vertex.
    pub fn leading_axes(&self) -> usize {
        (0..self.n).take_while(|&i| self.axis_vertex(i).is_some()).count()
    }
}

pub fn diagram_of(b: &CertifiedBasis) -> Result<Diagram> {
    if !b.verified {
        return Err(Error::UnverifiedBasis);
    }
    Ok(Diagram::new(b.form.clone(), &b.heads(), b.mu.clone()))
}

/// `#{β ∉ N : L(β) ≤ η}`.
pub fn complement_count(d: &Diagram, form: &LinearForm, eta: &BigRational) -> Result<u64> {
    if form.dim() != d.n {
        return Err(Error::DimensionMismatch {
            expected: d.n,
            found: form.dim(),
        });
    }
    if *form != d.form {
        return Err(Error::FormMismatch);
    }
    if *eta > d.certified_to {
        return Err(Error::PrecisionShortfall {
            needed: eta.to_string(),
            available: d.certified_to.to_string(),
        });
    }
    let bound = form.scaled_bound(eta);
    Ok(enumerate_sublevel(form.scaled_weights(), bound)
        .iter()
        .filter(|b| !d.contains(b))
        .count() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HSTable {
    pub values: Vec<u64>,
}

impl HSTable {
    pub fn at(&self, eta: usize) -> Option<u64> {
        self.values.get(eta).copied()
    }
}

/// `H(η) = #{β ∉ N(I) : |β| ≤ η}` for `η = 0, …, η_max`.
pub fn hilbert_samuel(b: &CertifiedBasis, eta_max: u64) -> Result<HSTable> {
    if !b.form.is_standard() {
        return Err(Error::InvalidForm("Hilbert-Samuel needs the standard form".into()));
    }
    let d = diagram_of(b)?;
    let values = (0..=eta_max)
        .map(|eta| complement_count(&d, &b.form, &BigRational::from_integer(eta.into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(HSTable { values })
}

/// `I(0)`: generators with `x_{k+1}, …, x_n` set to zero, as an ideal in the
/// first `k` variables. Generators evaluating to zero are dropped.
pub fn evaluated_ideal(ideal: &IdealPresentation, k: usize) -> Result<IdealPresentation> {
    let mut gens: Vec<PrecisionSeries> = Vec::new();
    let mut sources = Vec::new();
    for (i, g) in ideal.gens().iter().enumerate() {
        let e = g.evaluate_tail_zero(k)?;
        if e.is_empty() {
            continue;
        }
        gens.push(e);
        if let Some(src) = ideal.sources() {
            sources.push(src[i].evaluate_tail_zero(k));
        }
    }
    if gens.is_empty() {
        return Err(Error::TrivialEvaluation);
    }
    let out = IdealPresentation::new(ideal.var_names()[..k].to_vec(), gens)?;
    if ideal.sources().is_some() {
        out.with_sources(sources)
    } else {
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductStructure {
    pub holds: bool,
    /// Projections to `ℕᵏ` of the vertices lying in `ℕᵏ × {0}`.
    pub base: Vec<Exponent>,
}

/// Whether `N = D₀ × ℕ^{n−k}`, i.e. every vertex lies in `ℕᵏ × {0}`.
pub fn product_structure_check(d: &Diagram, k: usize) -> ProductStructure {
    let holds = d.vertices.iter().all(|v| v.tail_is_zero(k));
    let base = d
        .vertices
        .iter()
        .filter(|v| v.tail_is_zero(k))
        .map(|v| v.head(k))
        .collect();
    ProductStructure { holds, base }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stdbasis::complete;
    use crate::syntax::{parse_expression, ParseContext};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn e<const N: usize>(v: [u32; N]) -> Exponent {
        Exponent::from(v)
    }

    #[test]
    fn staircase_counts() {
        let f = LinearForm::standard(2);
        let d = Diagram::new(f.clone(), &[e([2, 0]), e([0, 3])], q(10));
        assert_eq!(complement_count(&d, &f, &q(2)).unwrap(), 5);
        let empty = Diagram::new(f.clone(), &[], q(10));
        assert_eq!(complement_count(&empty, &f, &q(1)).unwrap(), 3);
        let unit = Diagram::new(f.clone(), &[e([0, 0])], q(10));
        assert_eq!(complement_count(&unit, &f, &q(7)).unwrap(), 0);
        assert!(complement_count(&d, &f, &q(11)).is_err());
    }

    #[test]
    fn vertices_are_minimal() {
        let f = LinearForm::standard(2);
        let d = Diagram::new(f, &[e([2, 0]), e([2, 1])], q(5));
        assert_eq!(d.vertices, vec![e([2, 0])]);
    }

    #[test]
    fn hs_of_monomial_ideal() {
        let ctx = ParseContext::standard(&["x", "y"], 6);
        let i = IdealPresentation::with_default_names(vec![
            parse_expression("x^2", &ctx).unwrap(),
            parse_expression("y^3", &ctx).unwrap(),
        ])
        .unwrap();
        let b = complete(&i, &ctx.form, &q(6)).unwrap();
        assert_eq!(hilbert_samuel(&b, 5).unwrap().values, vec![1, 3, 5, 6, 6, 6]);
    }

    #[test]
    fn evaluation() {
        let ctx = ParseContext::standard(&["x", "y", "z"], 6);
        let i = IdealPresentation::with_default_names(vec![parse_expression("x - z", &ctx).unwrap()]).unwrap();
        let e0 = evaluated_ideal(&i, 2).unwrap();
        assert_eq!(e0.dim(), 2);
        assert_eq!(e0.gens()[0].terms().len(), 1);
        let z = IdealPresentation::with_default_names(vec![parse_expression("z", &ctx).unwrap()]).unwrap();
        assert_eq!(evaluated_ideal(&z, 2), Err(Error::TrivialEvaluation));
    }

    #[test]
    fn product_structure() {
        let f = LinearForm::standard(3);
        let d = Diagram::new(f.clone(), &[e([8, 0, 0]), e([0, 5, 0]), e([2, 3, 0])], q(12));
        let p = product_structure_check(&d, 2);
        assert!(p.holds);
        assert_eq!(p.base.len(), 3);
        let d = Diagram::new(f.clone(), &[e([8, 0, 0]), e([0, 5, 0]), e([2, 3, 0]), e([2, 2, 7])], q(12));
        assert!(!product_structure_check(&d, 2).holds);
        let d = Diagram::new(f, &[e([1, 0, 0])], q(3));
        assert!(product_structure_check(&d, 1).holds);
    }
}
