//! Jets, perturbations with prescribed jets, and the scripted perturbation
//! experiments.

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::diagram::{
    axis_vertex_dimension, diagram_of, evaluated_ideal, flatness_weight_search, hilbert_samuel, ser_rational,
    FlatVerdict, FlatnessReport, HSTable,
};
use crate::error::{Error, Result};
use crate::kernel::{enumerate_sublevel, Exponent, Expr, IdealPresentation, Precision, PrecisionSeries};
use crate::order::LinearForm;
use crate::stdbasis::{becker_check, complete, s_series};
use crate::syntax::parse_expr;

fn int(v: u64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `j^μ_L(f)`: the terms with `L(β) ≤ μ`, as an exact polynomial.
pub fn jet(f: &PrecisionSeries, form: &LinearForm, mu: &BigRational) -> Result<PrecisionSeries> {
    let p = f.precision_under(form);
    if !p.covers(mu) {
        return Err(Error::PrecisionShortfall {
            needed: mu.to_string(),
            available: p.to_string(),
        });
    }
    Ok(f.with_form(form)?.truncate(mu).as_polynomial())
}

/// `G_i = F_i + δ_i` with every term of `δ_i` above L-value `μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub base: IdealPresentation,
    pub mu: BigRational,
    pub form: LinearForm,
    pub deltas: Vec<PrecisionSeries>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedIdeal {
    pub ideal: IdealPresentation,
    /// The jets up to this L-value agree with the base generators.
    pub mu: BigRational,
    pub form: LinearForm,
}

pub fn perturb(spec: &PerturbationSpec) -> Result<PerturbedIdeal> {
    let base = &spec.base;
    if spec.deltas.len() != base.len() {
        return Err(Error::DimensionMismatch {
            expected: base.len(),
            found: spec.deltas.len(),
        });
    }
    let bound = spec.form.scaled_bound(&spec.mu);
    for (i, d) in spec.deltas.iter().enumerate() {
        if let Some(e) = d.terms().keys().find(|e| spec.form.key(e) <= bound) {
            return Err(Error::InvalidArgument(format!(
                "delta {i} has the term {e} at L-value ≤ {}",
                spec.mu
            )));
        }
    }
    let gens = base
        .gens()
        .iter()
        .zip(&spec.deltas)
        .map(|(g, d)| g.with_form(&spec.form)?.add(&d.with_form(&spec.form)?))
        .collect::<Result<Vec<_>>>()?;
    let mut ideal = IdealPresentation::new(base.var_names().to_vec(), gens)?;
    if let Some(src) = base.sources() {
        if spec.deltas.iter().all(|d| d.is_exact()) {
            let sources = src
                .iter()
                .zip(&spec.deltas)
                .map(|(s, d)| {
                    if d.is_empty() {
                        s.clone()
                    } else {
                        Expr::Add(Box::new(s.clone()), Box::new(Expr::from_terms(d)))
                    }
                })
                .collect();
            ideal = ideal.with_sources(sources)?;
        }
    }
    Ok(PerturbedIdeal {
        ideal,
        mu: spec.mu.clone(),
        form: spec.form.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineSummary {
    pub vertices: Vec<Exponent>,
    pub axes: usize,
    pub flatness: Option<FlatnessReport>,
    pub hs: HSTable,
}

/// Thresholds recomputed from vertex data: `μ₁` is the largest axis-vertex
/// degree, `μ₂` bounds both the vertices and the finite staircase complement
/// of `N(I(0))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub mu1: u64,
    pub mu2: u64,
    pub mu0: u64,
    pub mu_reaches_mu0: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CiReport {
    pub n: usize,
    pub k: usize,
    pub matrix: Vec<Vec<i64>>,
    #[serde(serialize_with = "ser_rational")]
    pub mu: BigRational,
    pub work_prec: u64,
    pub thresholds: Option<Thresholds>,
    pub original: PipelineSummary,
    pub perturbed: PipelineSummary,
    pub axes_equal: bool,
    pub flatness_equal: bool,
    pub hs_equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiOptions {
    /// Working precision (standard degree) for completions and HS tables.
    pub work_prec: u64,
    pub trials: usize,
    pub seed: u64,
    /// Extra weights tried after `l₀` by the flatness search.
    pub extra_l: u64,
}

impl CiOptions {
    pub fn for_mu(mu: u64) -> Self {
        CiOptions {
            work_prec: mu + 4,
            trials: 4,
            seed: 0,
            extra_l: 1,
        }
    }
}

fn pipeline(ideal: &IdealPresentation, k: usize, w: u64, extra: u64) -> Result<PipelineSummary> {
    let n = ideal.dim();
    let form = LinearForm::standard(n);
    let b = complete(ideal, &form, &int(w))?;
    let d = diagram_of(&b)?;
    let flatness = if k > 0 && k < n {
        Some(flatness_weight_search(ideal, k, &int(w), extra)?)
    } else {
        None
    };
    Ok(PipelineSummary {
        axes: d.leading_axes(),
        vertices: d.vertices,
        flatness,
        hs: hilbert_samuel(&b, w)?,
    })
}

fn thresholds(ideal: &IdealPresentation, k: usize, axis_vertices: &[Exponent], mu: u64, w: u64) -> Result<Option<Thresholds>> {
    let n = ideal.dim();
    let mu1 = axis_vertices
        .iter()
        .filter(|v| v.axis().is_some_and(|a| a < k))
        .map(|v| v.degree())
        .max()
        .unwrap_or(0);
    let i0 = if k < n {
        evaluated_ideal(ideal, k)?
    } else {
        ideal.clone()
    };
    let b0 = complete(&i0, &LinearForm::standard(k), &int(w))?;
    let d0 = diagram_of(&b0)?;
    if d0.leading_axes() < k {
        return Ok(None);
    }
    let vmax = d0.vertices.iter().map(|v| v.degree()).max().unwrap_or(0);
    let cmax = enumerate_sublevel(&vec![1; k], vmax)
        .iter()
        .filter(|b| !d0.contains(b))
        .map(|b| b.degree())
        .max()
        .unwrap_or(0);
    let mu2 = vmax.max(cmax).max(1);
    let mu0 = mu1.max(mu2);
    Ok(Some(Thresholds {
        mu1,
        mu2,
        mu0,
        mu_reaches_mu0: mu >= mu0,
    }))
}

/// Runs the same pipeline (axis vertices, flatness search, Hilbert-Samuel
/// table on `0..=work_prec`) on `I` and on its perturbation, after the
/// coordinate change chosen for `I`, and compares the outputs.
pub fn ci_stability_experiment(
    ideal: &IdealPresentation,
    mu: u64,
    deltas: &[PrecisionSeries],
    opts: &CiOptions,
) -> Result<CiReport> {
    let n = ideal.dim();
    let w = opts.work_prec;
    if w <= mu {
        return Err(Error::InvalidArgument(format!(
            "working precision {w} must exceed μ = {mu}"
        )));
    }
    let axis = axis_vertex_dimension(ideal, &int(w), opts.trials, opts.seed)?;
    let k = axis.k_best;
    if ideal.len() != k {
        return Err(Error::InvalidArgument(format!(
            "{} generators, but the axis-vertex witness gives codimension {k}",
            ideal.len()
        )));
    }
    let spec = PerturbationSpec {
        base: ideal.clone(),
        mu: int(mu),
        form: LinearForm::standard(n),
        deltas: deltas.to_vec(),
    };
    let perturbed = perturb(&spec)?.ideal;
    let a = ideal.substitute_linear(&axis.matrix)?;
    let b = perturbed.substitute_linear(&axis.matrix)?;
    let original = pipeline(&a, k, w, opts.extra_l)?;
    let pert = pipeline(&b, k, w, opts.extra_l)?;
    let verdict = |s: &PipelineSummary| s.flatness.as_ref().map(|f| f.verdict);
    Ok(CiReport {
        n,
        k,
        matrix: axis.matrix,
        mu: int(mu),
        work_prec: w,
        thresholds: thresholds(&a, k, &original.vertices, mu, w)?,
        axes_equal: original.axes == pert.axes,
        flatness_equal: verdict(&original) == verdict(&pert),
        hs_equal: original.hs == pert.hs,
        original,
        perturbed: pert,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Example82Report {
    pub mu: u64,
    pub h: String,
    pub work_prec: u64,
    pub degenerate: bool,
    pub vertices: Vec<Exponent>,
    pub flat: FlatnessReport,
    pub perturbed_flat: FlatnessReport,
    pub claims: Vec<Claim>,
    pub hs: HSTable,
    pub perturbed_hs: HSTable,
    /// First `η` with `H_I(η) ≠ H_{I_μ}(η)` inside the window.
    pub hs_first_difference: Option<u64>,
    pub all_pass: bool,
}

const EX82_VARS: [&str; 3] = ["x", "y", "z"];

/// The generators of the example ideal, perturbed by `z^{μ−6}·h` inside the
/// exponential factor of the second generator when `h` is given.
pub fn example82_ideal(mu_h: Option<(u64, &Expr)>, prec: u64) -> Result<IdealPresentation> {
    let names: Vec<String> = EX82_VARS.iter().map(|s| s.to_string()).collect();
    let p = |s: &str| parse_expr(s, &names);
    let mut g2 = p("y^5 + y^2*z^4*exp(z)")?;
    if let Some((mu, h)) = mu_h {
        let zp = Expr::Pow(Box::new(Expr::Var(2)), (mu - 6) as u32);
        let pert = Expr::Mul(Box::new(p("y^2*z^4")?), Box::new(Expr::Mul(Box::new(zp), Box::new(h.clone()))));
        g2 = Expr::Add(Box::new(g2), Box::new(pert));
    }
    let exprs = vec![p("x^8")?, g2, p("x^2*y^3 + x^2*z^4*exp(z)")?];
    IdealPresentation::from_exprs(names, exprs, &LinearForm::standard(3), &int(prec))
}

/// Reproduces the example end to end: the standard basis and its vertices,
/// flatness of `I`, the s-series identity for the perturbation, and the
/// flatness failure of the perturbed ideal.
pub fn cm_counterexample_runner(mu: u64, h_src: &str) -> Result<Example82Report> {
    if mu < 8 {
        return Err(Error::InvalidArgument(format!("μ must be at least 8, got {mu}")));
    }
    let names: Vec<String> = EX82_VARS.iter().map(|s| s.to_string()).collect();
    let h = parse_expr(h_src, &names)?;
    let std = LinearForm::standard(3);
    let probe = h.expand(&std, &int(mu + 8))?;
    if !probe.is_free_of(0) || !probe.is_free_of(1) {
        return Err(Error::InvalidArgument("h must be a series in z alone".into()));
    }
    if !probe.constant_term().is_zero() {
        return Err(Error::InvalidArgument("h must vanish at the origin".into()));
    }
    let degenerate = probe.is_empty();
    let ord_h = probe.lowest_key().unwrap_or(0);
    // the s-series has degree μ + 2 + ord h; leave a margin above it
    let w = mu + 2 + ord_h + 2;
    let wq = int(w);

    let base = example82_ideal(None, w)?;
    let pert = example82_ideal(Some((mu, &h)), w)?;
    let f = base.generators_at(&std, &wq)?;
    let g = pert.generators_at(&std, &wq)?;

    let mut claims = Vec::new();
    let b = becker_check(&f, &std, &wq, true)?;
    let d = diagram_of(&b)?;
    let expected: Vec<Exponent> = vec![[0u32, 5, 0].into(), [2u32, 3, 0].into(), [8u32, 0, 0].into()];
    let mut got = d.vertices.clone();
    got.sort();
    claims.push(Claim {
        name: "standard-basis".into(),
        pass: b.verified && got == expected,
        detail: format!("verified={} vertices={:?}", b.verified, d.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
    });

    let flat = flatness_weight_search(&base, 2, &wq, 0)?;
    claims.push(Claim {
        name: "flat".into(),
        pass: flat.verdict == FlatVerdict::Flat && flat.l0 == 9,
        detail: format!("verdict={:?} l0={}", flat.verdict, flat.l0),
    });

    // S(G2,G3) = x^2 y^2 z^{μ-2} h(z)
    let s = s_series(&g[1], &g[2], &std)?;
    let target = Expr::Mul(
        Box::new(parse_expr(&format!("x^2*y^2*z^{}", mu - 2), &names)?),
        Box::new(h.clone()),
    );
    let sp = match s.precision() {
        Precision::Upto(p) => p.clone(),
        Precision::Exact => wq.clone(),
    };
    let t = target.expand(&std, &sp)?;
    let diff = s.sub(&t)?.truncate(&sp);
    claims.push(Claim {
        name: "s-series-identity".into(),
        pass: diff.is_empty(),
        detail: format!("S(G2,G3) = {} up to degree {sp}", s.to_expr_string(&names)),
    });

    let perturbed_flat = flatness_weight_search(&pert, 2, &wq, 0)?;
    let last = perturbed_flat.attempts.last();
    let z_vertex = last.and_then(|a| a.vertices.iter().find(|v| v[2] > 0).cloned());
    let (pass, detail) = if degenerate {
        (
            perturbed_flat.verdict == FlatVerdict::Flat,
            "h vanishes: the perturbation is trivial and flatness is preserved".to_string(),
        )
    } else {
        (
            perturbed_flat.verdict == FlatVerdict::NotFlatAtMu && z_vertex.is_some(),
            format!(
                "verdict={:?} vertex with z-component: {}",
                perturbed_flat.verdict,
                z_vertex.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "none".into())
            ),
        )
    };
    claims.push(Claim {
        name: "perturbed-not-flat".into(),
        pass,
        detail,
    });

    let hs = hilbert_samuel(&complete(&base, &std, &wq)?, w)?;
    let perturbed_hs = hilbert_samuel(&complete(&pert, &std, &wq)?, w)?;
    let hs_first_difference = hs
        .values
        .iter()
        .zip(&perturbed_hs.values)
        .position(|(a, b)| a != b)
        .map(|p| p as u64);
    Ok(Example82Report {
        mu,
        h: h_src.to_string(),
        work_prec: w,
        degenerate,
        vertices: d.vertices,
        all_pass: claims.iter().all(|c| c.pass),
        flat,
        perturbed_flat,
        claims,
        hs,
        perturbed_hs,
        hs_first_difference,
    })
}

/// `count` seeded exact perturbations, each a sum of up to `terms` monomials
/// of standard degree exactly `degree` with nonzero coefficients in `−5..=5`.
pub fn random_deltas(n: usize, count: usize, degree: u64, terms: usize, rng: &mut impl Rng) -> Vec<PrecisionSeries> {
    let form = LinearForm::standard(n);
    let monomials: Vec<Exponent> = enumerate_sublevel(form.scaled_weights(), degree)
        .into_iter()
        .filter(|e| e.degree() == degree)
        .collect();
    (0..count)
        .map(|_| {
            let picks = (0..terms.max(1)).map(|_| {
                let e = monomials[rng.gen_range(0..monomials.len())].clone();
                let mut c = rng.gen_range(-5i64..=4);
                if c >= 0 {
                    c += 1;
                }
                (e, BigRational::from_integer(c.into()))
            });
            PrecisionSeries::from_terms(form.clone(), Precision::Exact, picks.collect::<Vec<_>>())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expression, ParseContext};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn perturbation_shows_only_above_its_degree() {
        // the new head (2,2,7) has L = 11: invisible at 8, decisive at 11
        let std = LinearForm::standard(3);
        let z = parse_expr("z", &["x".into(), "y".into(), "z".into()]).unwrap();
        let pert = example82_ideal(Some((8, &z)), 13).unwrap();
        let gens = |p: i64| pert.generators_at(&std, &q(p)).unwrap();
        assert!(becker_check(&gens(8), &std, &q(8), true).unwrap().verified);
        let b = becker_check(&gens(11), &std, &q(11), true).unwrap();
        assert!(!b.verified);
        let bad: Vec<_> = b.pairs.iter().filter(|r| !r.reduces).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].i, bad[0].j), (1, 2));
        assert_eq!(bad[0].remainder_head, Some(Exponent::from([2u32, 2, 7])));
        let c = complete(&pert, &std, &q(11)).unwrap();
        assert!(diagram_of(&c).unwrap().vertices.contains(&Exponent::from([2u32, 2, 7])));
    }

    #[test]
    fn jets() {
        let ctx = ParseContext::standard(&["x", "y", "z"], 12);
        let f = parse_expression("x + x^3", &ctx).unwrap();
        assert_eq!(jet(&f, &ctx.form, &q(2)).unwrap(), parse_expression("x", &ctx).unwrap());
        let f2 = parse_expression("y^5 + y^2*z^4*exp(z)", &ctx).unwrap();
        let j = jet(&f2, &ctx.form, &q(8)).unwrap();
        assert_eq!(j, parse_expression("y^5 + y^2*z^4 + y^2*z^5 + 1/2*y^2*z^6", &ctx).unwrap());
        let w = LinearForm::split(2, 1, 3).unwrap();
        let g = parse_expression("x + y", &ParseContext::standard(&["x", "y"], 5)).unwrap();
        assert_eq!(jet(&g, &w, &q(3)).unwrap().len(), 2);
        assert!(jet(&f2, &ctx.form, &q(13)).is_err());
    }

    #[test]
    fn perturbation_rules() {
        let ctx = ParseContext::standard(&["x"], 10);
        let base = IdealPresentation::with_default_names(vec![parse_expression("x", &ctx).unwrap()]).unwrap();
        let spec = PerturbationSpec {
            base: base.clone(),
            mu: q(4),
            form: ctx.form.clone(),
            deltas: vec![parse_expression("x^5", &ctx).unwrap()],
        };
        let p = perturb(&spec).unwrap();
        assert_eq!(p.ideal.gens()[0], parse_expression("x + x^5", &ctx).unwrap());
        let bad = PerturbationSpec {
            deltas: vec![parse_expression("x^4", &ctx).unwrap()],
            ..spec.clone()
        };
        assert!(perturb(&bad).is_err());
        let zero = PerturbationSpec {
            deltas: vec![PrecisionSeries::exact_zero(1)],
            ..spec
        };
        assert_eq!(perturb(&zero).unwrap().ideal.gens(), base.gens());
    }
}
