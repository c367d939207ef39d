//! Command dispatch for the `hironaka` binary. Every command returns an exit
//! code and a JSON report; `main` only prints.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hironaka::approx::{ci_stability_experiment, cm_counterexample_runner, perturb, random_deltas, CiOptions, PerturbationSpec};
use hironaka::diagram::{
    axis_vertex_dimension, diagram_of, flatness_weight_search, hilbert_samuel, oracle_jet_quotient_dim,
    reduction_exponent,
};
use hironaka::division::hironaka_divide;
use hironaka::equising::{build_tower, validate_tower, Tower, TowerOptions};
use hironaka::stdbasis::{becker_check, complete_with, CertifiedBasis, CompletionOptions};
use hironaka::syntax::{parse_expr, IdealFile};
use hironaka::{Error, IdealPresentation, LinearForm, PrecisionSeries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hironaka", about = "Local standard bases and discriminant towers over the rationals")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Hironaka division of `--f` by the generators of FILE.
    Divide {
        file: PathBuf,
        #[arg(long)]
        f: String,
        #[arg(long)]
        mu: Option<u64>,
    },
    /// Standard basis check or completion
    Sbasis {
        #[command(subcommand)]
        action: SbasisCmd,
    },
    /// Vertices of the diagram of initial exponents.
    Diagram {
        file: PathBuf,
        #[arg(long)]
        mu: Option<u64>,
    },
    /// Hilbert-Samuel table from the staircase.
    Hs {
        file: PathBuf,
        #[arg(long)]
        eta: u64,
    },
    /// Flatness over the first K variables.
    Flat {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long, default_value_t = 1)]
        extra: u64,
    },
    /// Dimension bound from axis vertices after generic changes.
    Dim {
        file: PathBuf,
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Reduction exponent and the jet-scale membership identities.
    Reduction {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        mu: Option<u64>,
    },
    /// Adds one `--delta` per generator, each above L-value `--mu`.
    Perturb {
        file: PathBuf,
        #[arg(long)]
        mu: u64,
        #[arg(long = "delta")]
        deltas: Vec<String>,
    },
    /// Compares invariants of FILE and a perturbation above `--mu`.
    CiExperiment {
        file: PathBuf,
        #[arg(long)]
        mu: u64,
        /// Explicit perturbations; random degree-(μ+1) ones when absent.
        #[arg(long = "delta")]
        deltas: Vec<String>,
        #[arg(long)]
        work_prec: Option<u64>,
        #[arg(long, default_value_t = 4)]
        trials: usize,
    },
    /// The flat family whose perturbation is not flat.
    Example82 {
        #[arg(long)]
        mu: u64,
        #[arg(long, default_value = "z")]
        h: String,
    },
    /// Discriminant tower of a finite-colength ideal
    Tower {
        #[command(subcommand)]
        action: TowerCmd,
    },
    /// Independent linear-algebra cross-checks
    Oracle {
        #[command(subcommand)]
        action: OracleCmd,
    },
}

#[derive(Subcommand, Debug)]
enum SbasisCmd {
    /// Becker's criterion on the generators as given.
    Check {
        file: PathBuf,
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long)]
        no_coprime: bool,
    },
    /// Completes the generators to a certified standard basis.
    Complete {
        file: PathBuf,
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long)]
        no_coprime: bool,
        #[arg(long, default_value_t = 400)]
        max_basis: usize,
    },
}

#[derive(Subcommand, Debug)]
enum TowerCmd {
    Build {
        file: PathBuf,
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long, default_value_t = 8)]
        retries: usize,
    },
    /// Builds the tower and re-checks its defining conditions.
    Validate {
        file: PathBuf,
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long, default_value_t = 8)]
        retries: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Brute-force `dim R/(I + m^{η+1})` for `η = 0..=ETA`.
    Hs {
        file: PathBuf,
        #[arg(long)]
        eta: u64,
    },
}

/// Outcome of a command that ran to completion.
struct Outcome {
    status: &'static str,
    result: Value,
}

fn ok(result: Value) -> Outcome {
    Outcome { status: "ok", result }
}

fn verdict(pass: bool, result: Value) -> Outcome {
    Outcome {
        status: if pass { "ok" } else { "claims-fail" },
        result,
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

struct Loaded {
    file: IdealFile,
    form: LinearForm,
    ideal: IdealPresentation,
    mu: u64,
}

fn rat(v: u64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn load(path: &PathBuf, mu: Option<u64>) -> std::result::Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file = IdealFile::parse(&text)?;
    let form = file.form()?;
    let mu = mu.unwrap_or(file.prec);
    let prec = rat(mu.max(file.prec));
    let ideal = IdealPresentation::from_exprs(file.var_names.clone(), file.gens.clone(), &form, &prec)?;
    Ok(Loaded { file, form, ideal, mu })
}

fn series(s: &PrecisionSeries, names: &[String]) -> Value {
    json!({ "expr": s.to_expr_string(names), "precision": s.precision().to_string() })
}

fn window(form: &LinearForm, mu: impl ToString) -> Value {
    json!({
        "weights": form.weights().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "mu": mu.to_string(),
    })
}

fn basis_json(b: &CertifiedBasis, names: &[String]) -> Value {
    json!({
        "verified": b.verified,
        "window": window(&b.form, &b.mu),
        "generators": b.gens.iter().map(|g| series(g, names)).collect::<Vec<_>>(),
        "heads": b.heads(),
        "provenance": b.provenance,
        "pairs": b.pairs,
        "adjoined": b.adjoined(),
        "budget_exhausted": b.budget_exhausted,
    })
}

fn parse_series(src: &str, l: &Loaded, prec: u64) -> std::result::Result<PrecisionSeries, Failure> {
    Ok(parse_expr(src, &l.file.var_names)?.expand(&l.form, &rat(prec))?)
}

fn tower_json(t: &Tower, names: &[String]) -> Value {
    let levels: Vec<Value> = t
        .levels
        .iter()
        .map(|l| {
            let here = &names[..l.i];
            let below = &names[..l.i - 1];
            json!({
                "i": l.i,
                "p": l.p,
                "j": l.j,
                "poly": series(&l.poly, here),
                "coeffs": l.coeffs.iter().map(|a| series(a, below)).collect::<Vec<_>>(),
                "unit": l.unit.as_ref().map(|u| series(u, here)),
                "vanishing": l.vanishing,
                "discriminant": series(&l.discriminant, below),
            })
        })
        .collect();
    json!({
        "window": window(&LinearForm::standard(t.n), t.mu),
        "seed": t.seed,
        "matrix": t.matrix,
        "attempts": t.attempts,
        "sheets": t.sheets.iter().map(|s| series(s, names)).collect::<Vec<_>>(),
        "levels": levels,
        "trivial_below": t.trivial_below,
    })
}

fn tower_for(file: &PathBuf, mu: Option<u64>, seed: u64, retries: usize) -> std::result::Result<(Loaded, Tower), Failure> {
    let l = load(file, mu)?;
    if !l.form.is_standard() {
        return Err(Failure::Usage("towers use the standard order".into()));
    }
    let gens = l.ideal.generators_at(&l.form, &rat(l.mu))?;
    let opts = TowerOptions {
        retries,
        ..TowerOptions::default()
    };
    let t = build_tower(&gens, l.mu, seed, &opts)?;
    Ok((l, t))
}

fn dispatch(cli: Cli) -> CmdResult {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Divide { file, f, mu } => {
            let l = load(&file, mu)?;
            let mu_r = rat(l.mu);
            let f = parse_series(&f, &l, l.mu.max(l.file.prec))?;
            let divisors = l.ideal.generators_at(&l.form, &mu_r)?;
            let r = hironaka_divide(&f, &divisors, &l.form, &mu_r)?;
            let names = l.ideal.var_names();
            let check = r.verify(&f, &divisors);
            Ok(ok(json!({
                "window": window(&l.form, &r.certified_prec),
                "heads": r.partition.heads(),
                "quotients": r.quotients.iter().map(|q| series(q, names)).collect::<Vec<_>>(),
                "remainder": series(&r.remainder, names),
                "steps": r.steps,
                "verified": check.is_ok(),
                "verification_error": check.err(),
            })))
        }
        Cmd::Sbasis { action } => match action {
            SbasisCmd::Check { file, mu, no_coprime } => {
                let l = load(&file, mu)?;
                let mu_r = rat(l.mu);
                let gens = l.ideal.generators_at(&l.form, &mu_r)?;
                let b = becker_check(&gens, &l.form, &mu_r, !no_coprime)?;
                Ok(verdict(b.verified, basis_json(&b, l.ideal.var_names())))
            }
            SbasisCmd::Complete {
                file,
                mu,
                no_coprime,
                max_basis,
            } => {
                let l = load(&file, mu)?;
                let opts = CompletionOptions {
                    coprime_criterion: !no_coprime,
                    max_basis,
                    ..CompletionOptions::default()
                };
                let b = complete_with(&l.ideal, &l.form, &rat(l.mu), &opts)?;
                let out = basis_json(&b, l.ideal.var_names());
                Ok(if b.verified {
                    ok(out)
                } else {
                    Outcome {
                        status: "undecided",
                        result: out,
                    }
                })
            }
        },
        Cmd::Diagram { file, mu } => {
            let l = load(&file, mu)?;
            let b = complete_with(&l.ideal, &l.form, &rat(l.mu), &CompletionOptions::default())?;
            let d = diagram_of(&b)?;
            Ok(ok(json!({
                "window": window(&l.form, l.mu),
                "vertices": d.vertices,
                "leading_axes": d.leading_axes(),
            })))
        }
        Cmd::Hs { file, eta } => {
            let l = load(&file, Some(eta))?;
            if !l.form.is_standard() {
                return Err(Failure::Usage("hs needs `order: std`".into()));
            }
            let b = complete_with(&l.ideal, &l.form, &rat(eta), &CompletionOptions::default())?;
            let t = hilbert_samuel(&b, eta)?;
            Ok(ok(json!({ "window": window(&l.form, eta), "hs": t.values })))
        }
        Cmd::Flat { file, k, mu, extra } => {
            let l = load(&file, mu)?;
            let r = flatness_weight_search(&l.ideal, k, &rat(l.mu), extra)?;
            Ok(ok(json!({ "window": window(&l.form, l.mu), "flatness": r })))
        }
        Cmd::Dim { file, mu, trials } => {
            let l = load(&file, mu)?;
            let r = axis_vertex_dimension(&l.ideal, &rat(l.mu), trials, seed)?;
            Ok(ok(json!({
                "window": window(&l.form, l.mu),
                "seed": seed,
                "matrix": r.matrix,
                "axes": r,
            })))
        }
        Cmd::Reduction { file, k, mu } => {
            let l = load(&file, mu)?;
            let r = reduction_exponent(&l.ideal, k, l.mu)?;
            Ok(verdict(r.verified, json!({ "window": window(&l.form, l.mu), "reduction": r })))
        }
        Cmd::Perturb { file, mu, deltas } => {
            let l = load(&file, Some(mu))?;
            let deltas = deltas
                .iter()
                .map(|d| parse_series(d, &l, mu))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let p = perturb(&PerturbationSpec {
                base: l.ideal.clone(),
                mu: rat(mu),
                form: l.form.clone(),
                deltas,
            })?;
            let names = l.ideal.var_names();
            Ok(ok(json!({
                "window": window(&l.form, mu),
                "generators": p.ideal.gens().iter().map(|g| series(g, names)).collect::<Vec<_>>(),
            })))
        }
        Cmd::CiExperiment {
            file,
            mu,
            deltas,
            work_prec,
            trials,
        } => {
            let l = load(&file, None)?;
            let mut opts = CiOptions::for_mu(mu);
            opts.seed = seed;
            opts.trials = trials;
            if let Some(w) = work_prec {
                opts.work_prec = w;
            }
            let deltas = if deltas.is_empty() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_deltas(l.ideal.dim(), l.ideal.len(), mu + 1, 3, &mut rng)
            } else {
                deltas
                    .iter()
                    .map(|d| parse_series(d, &l, opts.work_prec))
                    .collect::<std::result::Result<Vec<_>, _>>()?
            };
            let names = l.ideal.var_names();
            let r = ci_stability_experiment(&l.ideal, mu, &deltas, &opts)?;
            Ok(ok(json!({
                "window": window(&l.form, mu),
                "seed": seed,
                "matrix": r.matrix,
                "deltas": deltas.iter().map(|d| series(d, names)).collect::<Vec<_>>(),
                "report": r,
            })))
        }
        Cmd::Example82 { mu, h } => {
            let r = cm_counterexample_runner(mu, &h)?;
            Ok(verdict(r.all_pass, json!({ "window": { "mu": mu, "work_prec": r.work_prec }, "report": r })))
        }
        Cmd::Tower { action } => match action {
            TowerCmd::Build { file, mu, retries } => {
                let (l, t) = tower_for(&file, mu, seed, retries)?;
                Ok(ok(tower_json(&t, l.ideal.var_names())))
            }
            TowerCmd::Validate { file, mu, retries } => {
                let (l, t) = tower_for(&file, mu, seed, retries)?;
                let v = validate_tower(&t)?;
                Ok(verdict(
                    v.all_pass,
                    json!({ "tower": tower_json(&t, l.ideal.var_names()), "validation": v }),
                ))
            }
        },
        Cmd::Oracle { action } => match action {
            OracleCmd::Hs { file, eta } => {
                let l = load(&file, Some(eta))?;
                let values = (0..=eta)
                    .map(|e| oracle_jet_quotient_dim(&l.ideal, e))
                    .collect::<hironaka::Result<Vec<_>>>()?;
                Ok(ok(json!({ "window": window(&LinearForm::standard(l.ideal.dim()), eta), "hs": values })))
            }
        },
    }
}

fn command_name(args: &[String]) -> String {
    let mut words = args.iter().skip(1).filter(|a| !a.starts_with('-'));
    match words.next() {
        Some(w) if ["sbasis", "tower", "oracle"].contains(&w.as_str()) => match words.next() {
            Some(sub) => format!("{w} {sub}"),
            None => w.clone(),
        },
        Some(w) => w.clone(),
        None => String::new(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> (i32, Value)
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let command = command_name(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, json!({ "command": command, "status": if code == 0 { "ok" } else { "error" }, "message": e.to_string() }));
        }
    };
    let seed = cli.seed;
    match dispatch(cli) {
        Ok(o) => {
            let code = if o.status == "ok" { EXIT_OK } else { EXIT_UNDECIDED };
            (code, json!({ "command": command, "status": o.status, "seed": seed, "result": o.result }))
        }
        Err(Failure::Lib(e @ (Error::Undecided(_) | Error::UnverifiedBasis | Error::BudgetExceeded(_)))) => (
            EXIT_UNDECIDED,
            json!({ "command": command, "status": "undecided", "seed": seed, "message": e.to_string() }),
        ),
        Err(Failure::Lib(e)) => (EXIT_USAGE, json!({ "command": command, "status": "error", "message": e.to_string() })),
        Err(Failure::Usage(m)) => (EXIT_USAGE, json!({ "command": command, "status": "error", "message": m })),
    }
}
