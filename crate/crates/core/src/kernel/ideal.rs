use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::kernel::{Expr, PrecisionSeries};
use crate::order::LinearForm;

/// A finite list of generators `I = (F_1, …, F_s)` in `n` variables.
///
/// When the generators came from expressions, the expressions are kept so
/// that consumers needing a different linear form or a higher precision can
/// re-expand them instead of losing certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    n: usize,
    var_names: Vec<String>,
    gens: Vec<PrecisionSeries>,
    sources: Option<Vec<Expr>>,
}

impl IdealPresentation {
    pub fn new(var_names: Vec<String>, gens: Vec<PrecisionSeries>) -> Result<Self> {
        let n = var_names.len();
        if gens.is_empty() {
            return Err(Error::InvalidArgument("an ideal needs at least one generator".into()));
        }
        for g in &gens {
            if g.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.dim(),
                });
            }
            if g.is_zero() {
                return Err(Error::InvalidArgument("generator is zero".into()));
            }
        }
        Ok(IdealPresentation {
            n,
            var_names,
            gens,
            sources: None,
        })
    }

    /// Generators given as expressions, expanded once under `form` to `prec`.
    pub fn from_exprs(
        var_names: Vec<String>,
        exprs: Vec<Expr>,
        form: &LinearForm,
        prec: &BigRational,
    ) -> Result<Self> {
        let gens = exprs
            .iter()
            .map(|e| e.expand(form, prec))
            .collect::<Result<Vec<_>>>()?;
        let mut ideal = Self::new(var_names, gens)?;
        ideal.sources = Some(exprs);
        Ok(ideal)
    }

    /// Convenience for exact polynomial generators in the standard form.
    pub fn with_default_names(gens: Vec<PrecisionSeries>) -> Result<Self> {
        let n = gens.first().map(|g| g.dim()).unwrap_or(0);
        Self::new(PrecisionSeries::default_names(n), gens)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn gens(&self) -> &[PrecisionSeries] {
        &self.gens
    }

    pub fn sources(&self) -> Option<&[Expr]> {
        self.sources.as_deref()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generators certified under `form` to at least `prec`, re-expanding from
    /// source expressions when available.
    pub fn generators_at(&self, form: &LinearForm, prec: &BigRational) -> Result<Vec<PrecisionSeries>> {
        if form.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: form.dim(),
            });
        }
        if let Some(src) = &self.sources {
            return src.iter().map(|e| e.expand(form, prec)).collect();
        }
        self.gens
            .iter()
            .map(|g| {
                let s = g.with_form(form)?;
                if !s.precision().covers(prec) {
                    return Err(Error::PrecisionShortfall {
                        needed: prec.to_string(),
                        available: s.precision().to_string(),
                    });
                }
                Ok(s)
            })
            .collect()
    }

    /// Attaches source expressions, one per generator.
    pub fn with_sources(mut self, sources: Vec<Expr>) -> Result<Self> {
        if sources.len() != self.gens.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gens.len(),
                found: sources.len(),
            });
        }
        self.sources = Some(sources);
        Ok(self)
    }

    /// A presentation with replaced generators (sources are dropped).
    pub fn with_gens(&self, gens: Vec<PrecisionSeries>) -> Result<Self> {
        Self::new(self.var_names.clone(), gens)
    }

    /// Applies `x ↦ Mx` to every generator (and to every source expression).
    pub fn substitute_linear(&self, m: &[Vec<i64>]) -> Result<Self> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.substitute_linear(m))
            .collect::<Result<Vec<_>>>()?;
        let sources = self
            .sources
            .as_ref()
            .map(|src| src.iter().map(|e| substitute_expr(e, m)).collect());
        Ok(IdealPresentation {
            n: self.n,
            var_names: self.var_names.clone(),
            gens,
            sources,
        })
    }
}

fn substitute_expr(e: &Expr, m: &[Vec<i64>]) -> Expr {
    let b = |x: &Expr| Box::new(substitute_expr(x, m));
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Var(i) => {
            let mut acc: Option<Expr> = None;
            for (j, &a) in m[*i].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let term = Expr::Mul(Box::new(Expr::int(a)), Box::new(Expr::Var(j)));
                acc = Some(match acc {
                    None => term,
                    Some(prev) => Expr::Add(Box::new(prev), Box::new(term)),
                });
            }
            acc.unwrap_or_else(|| Expr::int(0))
        }
        Expr::Add(x, y) => Expr::Add(b(x), b(y)),
        Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
        Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
        Expr::Neg(x) => Expr::Neg(b(x)),
        Expr::Pow(x, k) => Expr::Pow(b(x), *k),
        Expr::Exp(x) => Expr::Exp(b(x)),
        Expr::Geom(x) => Expr::Geom(b(x)),
    }
}
