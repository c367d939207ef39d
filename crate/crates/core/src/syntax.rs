//! Input language: generator expressions and line-based ideal files.
//!
//! Expressions use rational literals (`3`, `3/4`), declared variables,
//! `+ - * ^` with non-negative integer exponents, parentheses, and the
//! builtins `exp(u)` and `geom(u)` for `u` vanishing at the origin.
//!
//! Ideal files look like
//!
//! ```text
//! # Example ideal
//! vars: x y z
//! prec: 12
//! order: std
//! gen: x^8
//! gen: y^5 + y^2*z^4*exp(z)
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::kernel::{Expr, IdealPresentation, PrecisionSeries};
use crate::order::{FormSpec, LinearForm};

/// Variables and working precision for expanding expressions.
#[derive(Clone, Debug)]
pub struct ParseContext {
    pub var_names: Vec<String>,
    pub form: LinearForm,
    pub prec: BigRational,
}

impl ParseContext {
    pub fn standard(var_names: &[&str], prec: i64) -> Self {
        ParseContext {
            var_names: var_names.iter().map(|s| s.to_string()).collect(),
            form: LinearForm::standard(var_names.len()),
            prec: BigRational::from_integer(prec.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let k = match self.peek() {
                Some(Tok::Int(k)) => k.clone(),
                _ => return self.err("expected a non-negative integer exponent"),
            };
            self.pos += 1;
            let k: u32 = k.try_into().or_else(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(a)) => {
                self.pos += 1;
                if self.eat('/') {
                    let b = match self.peek() {
                        Some(Tok::Int(b)) => b.clone(),
                        _ => return self.err("expected an integer denominator"),
                    };
                    if b == BigInt::from(0) {
                        return self.err("zero denominator");
                    }
                    self.pos += 1;
                    return Ok(Expr::Num(BigRational::new(a, b)));
                }
                Ok(Expr::Num(BigRational::from_integer(a)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Sym('(')) {
                    let at = self.here();
                    self.pos += 1;
                    let arg = self.sum()?;
                    self.expect(')')?;
                    return match name.as_str() {
                        "exp" => Ok(Expr::Exp(Box::new(arg))),
                        "geom" => Ok(Expr::Geom(Box::new(arg))),
                        _ => Err(Error::Parse {
                            pos: at,
                            msg: format!("unknown function `{name}`"),
                        }),
                    };
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => {
                        self.pos -= 1;
                        self.err(format!("undeclared variable `{name}`"))
                    }
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression over the given variable names.
pub fn parse_expr(src: &str, var_names: &[String]) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count(),
        vars: var_names,
    };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses and expands an expression to a series at the context's precision.
pub fn parse_expression(src: &str, ctx: &ParseContext) -> Result<PrecisionSeries> {
    parse_expr(src, &ctx.var_names)?.expand(&ctx.form, &ctx.prec)
}

/// Contents of an ideal file.
#[derive(Clone, Debug)]
pub struct IdealFile {
    pub var_names: Vec<String>,
    pub prec: u64,
    pub order: FormSpec,
    pub gens: Vec<Expr>,
    pub gen_sources: Vec<String>,
}

impl IdealFile {
    pub fn parse(text: &str) -> Result<IdealFile> {
        let mut vars: Option<Vec<String>> = None;
        let mut prec: Option<u64> = None;
        let mut order = FormSpec::Standard;
        let mut raw_gens: Vec<(usize, String)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(Error::Parse {
                    pos: lineno + 1,
                    msg: format!("expected `key: value`, got `{line}`"),
                });
            };
            let value = value.trim();
            match key.trim() {
                "vars" => {
                    let names: Vec<String> = value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect();
                    if names.is_empty() {
                        return Err(Error::Parse {
                            pos: lineno + 1,
                            msg: "no variables declared".into(),
                        });
                    }
                    vars = Some(names);
                }
                "prec" => {
                    let p: u64 = value.parse().map_err(|_| Error::Parse {
                        pos: lineno + 1,
                        msg: format!("bad precision `{value}`"),
                    })?;
                    if p < 1 {
                        return Err(Error::Parse {
                            pos: lineno + 1,
                            msg: "precision must be at least 1".into(),
                        });
                    }
                    prec = Some(p);
                }
                "order" => order = value.parse()?,
                "gen" => {
                    if vars.is_none() {
                        return Err(Error::Parse {
                            pos: lineno + 1,
                            msg: "generator before `vars:` declaration".into(),
                        });
                    }
                    raw_gens.push((lineno + 1, value.to_string()));
                }
                other => {
                    return Err(Error::Parse {
                        pos: lineno + 1,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let var_names = vars.ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "missing `vars:` line".into(),
        })?;
        let prec = prec.ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "missing `prec:` line".into(),
        })?;
        if raw_gens.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "at least one `gen:` line is required".into(),
            });
        }
        let gens = raw_gens
            .iter()
            .map(|(line, src)| {
                parse_expr(src, &var_names).map_err(|e| match e {
                    Error::Parse { pos, msg } => Error::Parse {
                        pos: *line,
                        msg: format!("column {pos}: {msg}"),
                    },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IdealFile {
            var_names,
            prec,
            order,
            gens,
            gen_sources: raw_gens.into_iter().map(|(_, s)| s).collect(),
        })
    }

    pub fn form(&self) -> Result<LinearForm> {
        self.order.to_form(self.var_names.len())
    }

    pub fn prec_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.prec))
    }

    pub fn to_ideal(&self) -> Result<IdealPresentation> {
        IdealPresentation::from_exprs(
            self.var_names.clone(),
            self.gens.clone(),
            &self.form()?,
            &self.prec_rational(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Exponent, Precision};

    #[test]
    fn parses_example_generator_as_jet() {
        let ctx = ParseContext::standard(&["x", "y", "z"], 8);
        let f = parse_expression("y^5 + y^2*z^4*exp(z)", &ctx).unwrap();
        assert_eq!(f.precision(), &Precision::upto(8));
        assert_eq!(f.len(), 4);
        assert_eq!(
            f.coeff(&Exponent::from([0, 2, 6])),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn zero_literal_is_exact_zero() {
        let ctx = ParseContext::standard(&["x"], 3);
        assert!(parse_expression("0", &ctx).unwrap().is_exact_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let ctx = ParseContext::standard(&["x", "z"], 3);
        assert_eq!(
            parse_expression("exp(1+z)", &ctx),
            Err(Error::BuiltinOnUnit("exp".into()))
        );
        match parse_expression("x + * z", &ctx) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expression("w", &ctx), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_expression("(x", &ctx), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("x^y", &ctx), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("sin(x)", &ctx), Err(Error::Parse { .. })));
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let ctx = ParseContext::standard(&["x"], 3);
        let f = parse_expression("-3/4*x^2 + 1/2", &ctx).unwrap();
        assert!(f.is_exact());
        assert_eq!(f.coeff(&Exponent::from([2])), BigRational::new((-3).into(), 4.into()));
        assert_eq!(f.constant_term(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn ideal_file_round() {
        let text = "# comment\nvars: x y z\nprec: 12\norder: std\ngen: x^8\ngen: y^5 + y^2*z^4*exp(z) # F2\ngen: x^2*y^3 + x^2*z^4*exp(z)\n";
        let file = IdealFile::parse(text).unwrap();
        assert_eq!(file.var_names, vec!["x", "y", "z"]);
        let ideal = file.to_ideal().unwrap();
        assert_eq!(ideal.len(), 3);
        assert!(ideal.sources().is_some());
    }

    #[test]
    fn ideal_file_errors() {
        assert!(IdealFile::parse("prec: 3\ngen: x\n").is_err());
        assert!(IdealFile::parse("gen: x\nvars: x\nprec: 3\n").is_err());
        assert!(IdealFile::parse("vars: x\nprec: 0\ngen: x\n").is_err());
        assert!(IdealFile::parse("vars: x\nprec: 3\n").is_err());
        assert!(IdealFile::parse("vars: x\nprec: 3\ngen: y\n").is_err());
    }
}
