//! Towers of distinguished polynomials cut out by generalized discriminants.

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::symmetric::generalized_discriminant;
use super::weierstrass::{weierstrass_prepare, Prepared};
use super::symmetric::DEFAULT_DEGREE_CAP;
use crate::diagram::random_unimodular;
use crate::error::{Error, Result};
use crate::kernel::{Precision, PrecisionSeries};
use crate::order::LinearForm;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingCertificate {
    pub index: usize,
    /// Identically zero, as opposed to zero up to the stated precision.
    pub exact: bool,
    pub precision: String,
}

/// `F_i ∈ K{x_1, …, x_{i−1}}[x_i]`, monic of degree `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerLevel {
    pub i: usize,
    pub p: usize,
    /// First index whose discriminant `Δ_{i,j}(a_{i−1})` does not vanish.
    pub j: usize,
    pub poly: PrecisionSeries,
    /// `a_{i−1,1}, …, a_{i−1,p}`; `a_{i−1,k}` multiplies `x_i^{p−k}`.
    pub coeffs: Vec<PrecisionSeries>,
    /// `u_i` with `Δ_{i+1,j_{i+1}}(a_i) = u_i·F_i`; absent at the top.
    pub unit: Option<PrecisionSeries>,
    pub vanishing: Vec<VanishingCertificate>,
    /// `Δ_{i,j}(a_{i−1})`, a series in `i − 1` variables.
    pub discriminant: PrecisionSeries,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tower {
    pub n: usize,
    pub mu: u64,
    pub seed: u64,
    /// Total linear change `x ↦ Mx` applied to the input.
    pub matrix: Vec<Vec<i64>>,
    /// The generators after the change of coordinates.
    pub generators: Vec<PrecisionSeries>,
    /// Prepared generators: `generators[k] ≡ sheet_units[k]·sheets[k]`.
    pub sheets: Vec<PrecisionSeries>,
    pub sheet_units: Vec<PrecisionSeries>,
    /// Top level first.
    pub levels: Vec<TowerLevel>,
    /// `F_i ≡ 1` for every `i` below the last level.
    pub trivial_below: usize,
    /// Coordinate choices tried, summed over levels.
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct TowerOptions {
    pub retries: usize,
    pub degree_cap: usize,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            retries: 8,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// `diag(m, I)` of size `dim`.
fn extend(m: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    let mut out = identity(dim);
    for (r, row) in m.iter().enumerate() {
        out[r][..row.len()].clone_from_slice(row);
    }
    out
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn substitute_block(s: &PrecisionSeries, m: &[Vec<i64>]) -> Result<PrecisionSeries> {
    if s.dim() < m.len() {
        return Ok(s.clone());
    }
    s.substitute_linear(&extend(m, s.dim()))
}

/// Zero with a certificate: an exact zero, or an empty constant certified at
/// the origin.
pub fn certified_zero(s: &PrecisionSeries) -> bool {
    s.is_exact_zero() || (s.dim() == 0 && s.is_empty() && s.precision().covers(&BigRational::zero()))
}

/// `A_k` (coefficient of `X^k`) from `[a_1, …, a_p]`.
fn as_a(coeffs: &[PrecisionSeries]) -> Vec<PrecisionSeries> {
    let p = coeffs.len();
    (0..p).map(|k| coeffs[p - 1 - k].clone()).collect()
}

/// Scans `Δ_{1}, Δ_{2}, …` at the coefficients; returns the vanishing
/// certificates and the first non-vanishing index with its value.
pub fn first_nonvanishing(
    coeffs: &[PrecisionSeries],
) -> Result<(Vec<VanishingCertificate>, usize, PrecisionSeries)> {
    let p = coeffs.len();
    let a = as_a(coeffs);
    let mut certs = Vec::new();
    for j in 1..=p {
        let d = generalized_discriminant(p, j)?.evaluate_series(&a)?;
        if d.is_empty() {
            certs.push(VanishingCertificate {
                index: j,
                exact: certified_zero(&d),
                precision: d.precision().to_string(),
            });
            continue;
        }
        return Ok((certs, j, d));
    }
    unreachable!("Δ_p = p never vanishes")
}

fn floor_u64(p: &Precision, cap: u64) -> u64 {
    match p.bound() {
        None => cap,
        Some(b) => {
            let f = b.floor().to_integer();
            if f < 0.into() {
                0
            } else {
                f.try_into().map_or(cap, |v: u64| v.min(cap))
            }
        }
    }
}

/// Tries the identity and then seeded unimodular changes until `attempt`
/// succeeds.
fn with_changes<T>(
    dim: usize,
    rng: &mut ChaCha8Rng,
    retries: usize,
    attempts: &mut usize,
    mut attempt: impl FnMut(&[Vec<i64>]) -> Result<T>,
) -> Result<(Vec<Vec<i64>>, T)> {
    let mut last = None;
    for t in 0..=retries {
        let m = if t == 0 { identity(dim) } else { random_unimodular(dim, rng) };
        *attempts += 1;
        match attempt(&m) {
            Ok(v) => return Ok((m, v)),
            Err(e @ Error::NotRegular { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn check_cap(p: usize, cap: usize) -> Result<()> {
    if p > cap {
        Err(Error::DegreeCap { p, cap })
    } else {
        Ok(())
    }
}

/// Builds the tower for the hypersurface `g_1⋯g_s = 0`, each factor
/// prepared in `x_n` up to degree `mu`.
pub fn build_tower(gens: &[PrecisionSeries], mu: u64, seed: u64, opts: &TowerOptions) -> Result<Tower> {
    let Some(first) = gens.first() else {
        return Err(Error::EmptyDivisors);
    };
    let n = first.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("no variables".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let form = LinearForm::standard(n);
    let gens = gens.iter().map(|g| g.with_form(&form)).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;

    let (mut matrix, (mut generators, prepared)) =
        with_changes(n, &mut rng, opts.retries, &mut attempts, |m| {
            let changed = gens.iter().map(|g| g.substitute_linear(m)).collect::<Result<Vec<_>>>()?;
            let prepared = changed
                .iter()
                .map(|g| weierstrass_prepare(g, n - 1, mu))
                .collect::<Result<Vec<Prepared>>>()?;
            Ok((changed, prepared))
        })?;
    if prepared.iter().any(|w| w.p == 0) {
        return Err(Error::InvalidArgument("a generator is a unit".into()));
    }
    let mut sheets: Vec<PrecisionSeries> = prepared.iter().map(|w| w.poly.clone()).collect();
    let mut sheet_units: Vec<PrecisionSeries> = prepared.iter().map(|w| w.unit.clone()).collect();
    let mu_r = BigRational::from_integer(mu.into());
    let mut top = PrecisionSeries::one(form.clone());
    for s in &sheets {
        top = top.mul(s)?;
        if !top.is_exact() {
            top = top.truncate(&mu_r);
        }
    }
    let p: usize = prepared.iter().map(|w| w.p as usize).sum();
    check_cap(p, opts.degree_cap)?;
    let coeffs = (1..=p).map(|k| top.coefficient_of_power(n - 1, (p - k) as u32)).collect();

    let mut levels: Vec<TowerLevel> = Vec::new();
    let mut current = TowerLevel {
        i: n,
        p,
        j: 0,
        poly: top,
        coeffs,
        unit: None,
        vanishing: Vec::new(),
        discriminant: PrecisionSeries::exact_zero(n - 1),
    };
    loop {
        let i = current.i;
        let (certs, j, d) = first_nonvanishing(&current.coeffs)?;
        if let Some(c) = certs.iter().find(|c| !c.exact) {
            return Err(Error::Undecided(format!(
                "level {i}: Δ_{} vanishes only up to {}",
                c.index, c.precision
            )));
        }
        current.j = j;
        current.vanishing = certs;
        current.discriminant = d.clone();
        if i == 1 || !d.constant_term().is_zero() {
            levels.push(current);
            break;
        }
        let m_eff = floor_u64(d.precision(), mu);
        if d.order().is_none_or(|o| o > BigRational::from_integer(m_eff.into())) {
            return Err(Error::Undecided(format!(
                "level {i}: Δ_{j} has no term certified up to {m_eff}"
            )));
        }
        let (change, prep) = with_changes(i - 1, &mut rng, opts.retries, &mut attempts, |m| {
            weierstrass_prepare(&d.substitute_linear(m)?, i - 2, m_eff)
        })?;
        check_cap(prep.p as usize, opts.degree_cap)?;
        if change != identity(i - 1) {
            for lvl in levels.iter_mut().chain(std::iter::once(&mut current)) {
                lvl.poly = substitute_block(&lvl.poly, &change)?;
                lvl.coeffs = lvl.coeffs.iter().map(|c| substitute_block(c, &change)).collect::<Result<_>>()?;
                if let Some(u) = &lvl.unit {
                    lvl.unit = Some(substitute_block(u, &change)?);
                }
                lvl.discriminant = substitute_block(&lvl.discriminant, &change)?;
            }
            for s in generators.iter_mut().chain(sheets.iter_mut()).chain(sheet_units.iter_mut()) {
                *s = substitute_block(s, &change)?;
            }
            matrix = mat_mul(&matrix, &extend(&change, n));
        }
        levels.push(current);
        current = TowerLevel {
            i: i - 1,
            p: prep.p as usize,
            j: 0,
            poly: prep.poly,
            coeffs: prep.coeffs,
            unit: Some(prep.unit),
            vanishing: Vec::new(),
            discriminant: PrecisionSeries::exact_zero(i - 2),
        };
    }
    let trivial_below = levels.last().map_or(0, |l| l.i - 1);
    Ok(Tower {
        n,
        mu,
        seed,
        matrix,
        generators,
        sheets,
        sheet_units,
        levels,
        trivial_below,
        attempts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub condition: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerValidation {
    pub conditions: Vec<ConditionCheck>,
    pub all_pass: bool,
}

/// `a ≡ b` up to the smaller of their precisions and `mu`.
fn agree(a: &PrecisionSeries, b: &PrecisionSeries, mu: u64) -> Result<bool> {
    let form = LinearForm::standard(a.dim());
    let diff = a.with_form(&form)?.sub(&b.with_form(&form)?)?;
    let bound = floor_u64(diff.precision(), mu);
    Ok(diff.truncate(&BigRational::from_integer(bound.into())).is_empty())
}

/// Re-checks the defining properties of a tower from its stored data.
pub fn validate_tower(t: &Tower) -> Result<TowerValidation> {
    let mu = t.mu;
    let mut out = Vec::new();
    let mut push = |condition, name, pass, detail: String| {
        out.push(ConditionCheck {
            condition,
            name,
            pass,
            detail,
        })
    };

    // (1) F_n cuts out the same germ as the generators
    let mut ok = t.generators.len() == t.sheets.len() && t.sheets.len() == t.sheet_units.len();
    let mut detail = String::new();
    if ok {
        let mut prod = PrecisionSeries::one(LinearForm::standard(t.n));
        for k in 0..t.sheets.len() {
            if t.sheet_units[k].constant_term().is_zero() {
                ok = false;
                detail = format!("unit of generator {k} vanishes at 0");
            }
            if !agree(&t.generators[k], &t.sheet_units[k].mul(&t.sheets[k])?, mu)? {
                ok = false;
                detail = format!("generator {k} is not unit times its sheet");
            }
            prod = prod.mul(&t.sheets[k])?;
        }
        match t.levels.first() {
            Some(top) if top.i == t.n && agree(&prod, &top.poly, mu)? => {}
            _ => {
                ok = false;
                detail = "top level is not the product of the sheets".into();
            }
        }
    }
    push(1, "defining-equation", ok, detail);

    // (2) distinguished: monic, coefficients vanishing at the origin
    let mut ok = true;
    let mut detail = String::new();
    for l in &t.levels {
        let var = l.i - 1;
        let lead = l.poly.coefficient_of_power(var, l.p as u32);
        let monic = lead.len() == 1 && lead.constant_term() == BigRational::from_integer(1.into());
        let degree_ok = l.poly.degree_in(var).is_none_or(|d| d as usize <= l.p);
        let mut rebuilt_ok = l.coeffs.len() == l.p;
        if rebuilt_ok {
            for (k, a) in l.coeffs.iter().enumerate() {
                let c = l.poly.coefficient_of_power(var, (l.p - k - 1) as u32);
                rebuilt_ok &= agree(&c, a, mu)?;
            }
        }
        let vanish = l.coeffs.iter().all(|a| a.constant_term().is_zero());
        if !(monic && degree_ok && rebuilt_ok && vanish) {
            ok = false;
            detail = format!(
                "level {}: monic={monic} degree={degree_ok} coefficients={rebuilt_ok} vanish-at-0={vanish}",
                l.i
            );
        }
    }
    push(2, "distinguished", ok, detail);

    // (3) discriminant certificates and Δ_{i+1,j}(a_i) = u_i·F_i
    let mut ok = true;
    let mut detail = String::new();
    for (idx, l) in t.levels.iter().enumerate() {
        let (certs, j, d) = first_nonvanishing(&l.coeffs)?;
        if j != l.j || certs.iter().any(|c| !c.exact) || !agree(&d, &l.discriminant, mu)? {
            ok = false;
            detail = format!("level {}: recomputed first non-vanishing index {j}, stored {}", l.i, l.j);
        }
        if let Some(below) = t.levels.get(idx + 1) {
            let rel = match &below.unit {
                Some(u) if !u.constant_term().is_zero() => agree(&l.discriminant, &u.mul(&below.poly)?, mu)?,
                _ => false,
            };
            if !rel {
                ok = false;
                detail = format!("level {}: discriminant is not unit times F_{}", l.i, below.i);
            }
        }
    }
    push(3, "discriminant-certificates", ok, detail);

    // (4) F_i(0) = 0 at every level
    let bad: Vec<usize> = t
        .levels
        .iter()
        .filter(|l| l.p == 0 || !l.poly.constant_term().is_zero())
        .map(|l| l.i)
        .collect();
    push(4, "vanishes-at-origin", bad.is_empty(), if bad.is_empty() { String::new() } else { format!("levels {bad:?}") });

    // (5) the chain ends in a unit, so F_0 ≡ 1
    let (ok, detail) = match t.levels.last() {
        Some(l) => {
            let c = l.discriminant.constant_term();
            (!c.is_zero() && t.trivial_below + 1 == l.i, format!("Δ_{{{},{}}}(0) = {c}", l.i, l.j))
        }
        None => (false, "no levels".into()),
    };
    push(5, "terminates-in-unit", ok, detail);

    let all_pass = out.iter().all(|c| c.pass);
    Ok(TowerValidation {
        conditions: out,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expression, ParseContext};

    fn gens(src: &[&str], names: &[&str]) -> Vec<PrecisionSeries> {
        let ctx = ParseContext::standard(names, 20);
        src.iter().map(|s| parse_expression(s, &ctx).unwrap()).collect()
    }

    fn shape(t: &Tower) -> Vec<(usize, usize, usize)> {
        t.levels.iter().map(|l| (l.i, l.p, l.j)).collect()
    }

    #[test]
    fn cusp() {
        let t = build_tower(&gens(&["y^2 - x^3"], &["x", "y"]), 10, 0, &TowerOptions::default()).unwrap();
        assert_eq!(shape(&t), vec![(2, 2, 1), (1, 3, 3)]);
        assert_eq!(t.levels[1].unit.as_ref().unwrap().constant_term(), BigRational::from_integer((-4).into()));
        assert_eq!(t.levels[1].discriminant.constant_term(), BigRational::from_integer(3.into()));
        assert_eq!(t.trivial_below, 0);
        let v = validate_tower(&t).unwrap();
        assert!(v.all_pass, "{v:?}");
    }

    #[test]
    fn node() {
        let t = build_tower(&gens(&["y^2 - x^2"], &["x", "y"]), 10, 0, &TowerOptions::default()).unwrap();
        assert_eq!(shape(&t), vec![(2, 2, 1), (1, 2, 2)]);
        assert!(validate_tower(&t).unwrap().all_pass);
    }

    #[test]
    fn smooth_sheet() {
        let t = build_tower(&gens(&["z"], &["x", "y", "z"]), 6, 0, &TowerOptions::default()).unwrap();
        assert_eq!(shape(&t), vec![(3, 1, 1)]);
        assert_eq!(t.trivial_below, 2);
        assert!(validate_tower(&t).unwrap().all_pass);
    }

    #[test]
    fn needs_coordinate_change() {
        // x*y is not y-regular; a generic change fixes it
        let t = build_tower(&gens(&["x*y"], &["x", "y"]), 8, 3, &TowerOptions::default()).unwrap();
        assert!(t.attempts > 1);
        assert_eq!(t.levels[0].p, 2);
        assert!(validate_tower(&t).unwrap().all_pass);
    }

    #[test]
    fn negative_control() {
        let mut t = build_tower(&gens(&["y^2 - x^3"], &["x", "y"]), 10, 0, &TowerOptions::default()).unwrap();
        let form = t.levels[0].coeffs[1].form().clone();
        let bump = PrecisionSeries::one(form);
        t.levels[0].coeffs[1] = t.levels[0].coeffs[1].add(&bump).unwrap();
        let v = validate_tower(&t).unwrap();
        assert!(!v.all_pass);
        assert!(!v.conditions[1].pass);
    }

    #[test]
    fn undecided_when_only_approximate() {
        // (y - x·e^x)^2 as a jet: Δ_1 vanishes only up to the precision
        let ctx = ParseContext::standard(&["x", "y"], 8);
        let g = parse_expression("(y - x*exp(x))^2", &ctx).unwrap();
        assert!(matches!(build_tower(&[g], 8, 0, &TowerOptions::default()), Err(Error::Undecided(_))));
    }
}
