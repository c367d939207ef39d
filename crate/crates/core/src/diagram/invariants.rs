//! Flatness, axis-vertex dimension bounds and reduction exponents.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::oracle::{jet_space, monomials_of_degree, tail_power_times_max_power};
use super::{diagram_of, evaluated_ideal, product_structure_check, ser_rational, Diagram};
use crate::error::{Error, Result};
use crate::kernel::{determinant, Exponent, IdealPresentation};
use crate::order::LinearForm;
use crate::stdbasis::{complete, CertifiedBasis};

fn verified(b: CertifiedBasis) -> Result<CertifiedBasis> {
    if b.budget_exhausted {
        return Err(Error::BudgetExceeded(format!(
            "completion stopped at {} elements",
            b.gens.len()
        )));
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FlatVerdict {
    #[serde(rename = "FLAT")]
    Flat,
    #[serde(rename = "NOT-FLAT-AT-MU")]
    NotFlatAtMu,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatAttempt {
    pub l: u64,
    /// Precision of the completion, in L-values of the weighted form.
    #[serde(serialize_with = "ser_rational")]
    pub prec: BigRational,
    pub vertices: Vec<Exponent>,
    pub product: bool,
    /// The base of the product equals the diagram of `I(0)`.
    pub base_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub k: usize,
    pub l0: u64,
    /// Vertices of `N(I(0))`.
    pub base_vertices: Vec<Exponent>,
    pub attempts: Vec<FlatAttempt>,
    pub found_l: Option<u64>,
    pub verdict: FlatVerdict,
    #[serde(serialize_with = "ser_rational")]
    pub mu: BigRational,
}

/// Completes `I` under the split weighting `(1,…,1,l,…,l)` for
/// `l = l₀, …, l₀ + extra` and tests whether the diagram is a product
/// `D × ℕ^{n−k}`. Here `l₀ = 1 + max |α|` over the vertices of `N(I(0))`.
///
/// Completion runs at weighted precision `l·μ`, so the last `n − k`
/// variables are resolved up to degree `μ`.
pub fn flatness_weight_search(
    ideal: &IdealPresentation,
    k: usize,
    mu: &BigRational,
    extra: u64,
) -> Result<FlatnessReport> {
    let n = ideal.dim();
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange {
            index: k,
            allowed: format!("1..{n}"),
        });
    }
    let i0 = evaluated_ideal(ideal, k)?;
    let std_k = LinearForm::standard(k);
    let b0 = verified(complete(&i0, &std_k, mu)?)?;
    let d0 = diagram_of(&b0)?;
    let l0 = 1 + d0.vertices.iter().map(|v| v.degree()).max().unwrap_or(0);
    let mut base = d0.vertices.clone();
    base.sort();

    let mut attempts = Vec::new();
    let mut found_l = None;
    for l in l0..=l0 + extra {
        let form = LinearForm::split(n, k, l)?;
        let prec = mu * BigRational::from_integer(l.into());
        let b = verified(complete(ideal, &form, &prec)?)?;
        let d = diagram_of(&b)?;
        let p = product_structure_check(&d, k);
        let mut pb = p.base.clone();
        pb.sort();
        attempts.push(FlatAttempt {
            l,
            prec,
            vertices: d.vertices.clone(),
            product: p.holds,
            base_matches: pb == base,
        });
        if p.holds {
            found_l = Some(l);
            break;
        }
    }
    Ok(FlatnessReport {
        k,
        l0,
        base_vertices: d0.vertices,
        attempts,
        verdict: if found_l.is_some() {
            FlatVerdict::Flat
        } else {
            FlatVerdict::NotFlatAtMu
        },
        found_l,
        mu: mu.clone(),
    })
}

/// A random integer matrix with entries in `{−3, …, 3}` and determinant `±1`.
pub fn random_unimodular(n: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    loop {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let det = determinant(&m);
        if det == BigRational::from_integer(1.into()) || det == BigRational::from_integer((-1).into()) {
            return m;
        }
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxisReport {
    pub k_best: usize,
    /// Probabilistic upper bound `n − k_best` for the dimension.
    pub dim_upper_bound: usize,
    pub matrix: Vec<Vec<i64>>,
    pub vertices: Vec<Exponent>,
    pub trials_run: usize,
    pub seed: u64,
}

/// Tries the identity and then `trials − 1` seeded unimodular changes of
/// coordinates, keeping the one whose diagram has vertices on the most
/// leading axes.
pub fn axis_vertex_dimension(
    ideal: &IdealPresentation,
    mu: &BigRational,
    trials: usize,
    seed: u64,
) -> Result<AxisReport> {
    let n = ideal.dim();
    let form = LinearForm::standard(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<Vec<i64>>, Diagram)> = None;
    let mut trials_run = 0;
    for t in 0..trials.max(1) {
        let m = if t == 0 { identity(n) } else { random_unimodular(n, &mut rng) };
        trials_run += 1;
        let changed = ideal.substitute_linear(&m)?;
        let b = verified(complete(&changed, &form, mu)?)?;
        if b.contains_unit() {
            return Err(Error::InvalidArgument("the ideal is the unit ideal".into()));
        }
        let d = diagram_of(&b)?;
        let k = d.leading_axes();
        if best.as_ref().map_or(true, |(kb, _, _)| k > *kb) {
            best = Some((k, m, d));
        }
        if k == n {
            break;
        }
    }
    let (k_best, matrix, d) = best.unwrap();
    Ok(AxisReport {
        k_best,
        dim_upper_bound: n - k_best,
        matrix,
        vertices: d.vertices,
        trials_run,
        seed,
    })
}

/// `I + m^{d+m} = I + (x̃)^m·m^d` at jet order `η`, compared through the
/// dimensions of both quotients (the right side is contained in the left).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemarkCheck {
    pub m: u64,
    pub eta: u64,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub k: usize,
    /// Axis degrees `d_1, …, d_k`.
    pub axis_degrees: Vec<u64>,
    pub d: u64,
    pub eta: u64,
    /// Monomials of degree `d+1` in the first `k` variables and whether each
    /// lies in `I + (x̃)·m^d` modulo `m^{η+1}`.
    pub checks: Vec<(Exponent, bool)>,
    pub verified: bool,
    pub identities: Vec<RemarkCheck>,
}

pub(crate) fn remark_check(ideal: &IdealPresentation, k: usize, d: u64, m: u64, eta: u64) -> Result<RemarkCheck> {
    let n = ideal.dim();
    let lhs = jet_space(ideal, eta, &monomials_of_degree(n, d + m))?.quotient_dim();
    let rhs = jet_space(ideal, eta, &tail_power_times_max_power(n, k, m, d))?.quotient_dim();
    Ok(RemarkCheck {
        m,
        eta,
        lhs_dim: lhs,
        rhs_dim: rhs,
        holds: lhs == rhs,
    })
}

/// Reads `d = Σ (d_j − 1)` off the axis vertices of the first `k` axes and
/// verifies `(x_{[k]})^{d+1} ⊂ I + (x̃)·m^d` with the oracle at order `μ`.
pub fn reduction_exponent(ideal: &IdealPresentation, k: usize, mu: u64) -> Result<ReductionReport> {
    let n = ideal.dim();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            index: k,
            allowed: format!("1..={n}"),
        });
    }
    let form = LinearForm::standard(n);
    let muq = BigRational::from_integer(mu.into());
    let b = verified(complete(ideal, &form, &muq)?)?;
    let diag = diagram_of(&b)?;
    let axis_degrees = (0..k)
        .map(|i| {
            diag.axis_vertex(i)
                .map(|v| v.degree())
                .ok_or(Error::MissingAxisVertex(i))
        })
        .collect::<Result<Vec<_>>>()?;
    let d: u64 = axis_degrees.iter().map(|a| a - 1).sum();
    if mu < d + 1 {
        return Err(Error::PrecisionShortfall {
            needed: (d + 1).to_string(),
            available: mu.to_string(),
        });
    }
    let space = jet_space(ideal, mu, &tail_power_times_max_power(n, k, 1, d))?;
    let checks: Vec<(Exponent, bool)> = monomials_of_degree(k, d + 1)
        .into_iter()
        .map(|e| {
            let full = e.padded(n);
            let ok = space.contains_monomial(&full);
            (full, ok)
        })
        .collect();
    let identities = (1..=2)
        .filter(|m| d + m <= mu)
        .map(|m| remark_check(ideal, k, d, m, mu))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReductionReport {
        k,
        d,
        eta: mu,
        verified: checks.iter().all(|c| c.1) && identities.iter().all(|c| c.holds),
        axis_degrees,
        checks,
        identities,
    })
}
