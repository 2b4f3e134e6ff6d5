//! Exact scalar ring: multivariate polynomials and rational functions over ℚ.

mod context;
mod gcd;
mod parse;
mod poly;
mod rational;

use std::collections::HashMap;
use std::fmt::Write;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

pub use context::{Symbol, SymbolKind, VariableContext};
pub use gcd::{content_in, gcd};
pub use parse::parse_expression;
pub use poly::{Exponents, Polynomial};
pub(crate) use poly::{qadd, qmul, qsub};
pub use rational::{gcd_normalize, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("bad exponent at byte {offset}: {message}")]
    BadExponent { offset: usize, message: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("cannot differentiate with respect to parameter '{0}'")]
    ParameterDerivative(String),
    #[error("no value assigned to variable slot {0}")]
    MissingAssignment(usize),
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("{0}")]
    Context(String),
}

/// Partial derivative with respect to a coordinate.
pub fn differentiate(
    f: &RationalFunction,
    symbol: &str,
    ctx: &VariableContext,
) -> Result<RationalFunction, ExprError> {
    let var = ctx.coordinate(symbol)?;
    Ok(f.derivative(var))
}

/// Evaluates `f` at a point given by symbol names.
pub fn evaluate(
    f: &RationalFunction,
    assignment: &HashMap<String, BigRational>,
    ctx: &VariableContext,
) -> Result<BigRational, ExprError> {
    let mut point = vec![None; ctx.nvars()];
    for (name, value) in assignment {
        let var = ctx.lookup(name).ok_or_else(|| ExprError::UnknownIdentifier {
            name: name.clone(),
            offset: 0,
        })?;
        point[var] = Some(value.clone());
    }
    f.evaluate(&point).map_err(|e| match e {
        ExprError::MissingAssignment(var) => {
            ExprError::Context(format!("missing assignment for '{}'", ctx.symbol(var).name()))
        }
        other => other,
    })
}

/// Printing in the input grammar, so that parsing the output reproduces the value.
pub trait Render {
    fn render(&self, ctx: &VariableContext) -> String;
}

pub fn display<T: Render + ?Sized>(value: &T, ctx: &VariableContext) -> String {
    value.render(ctx)
}

fn write_rational(out: &mut String, c: &BigRational) {
    if c.is_integer() {
        write!(out, "{}", c.numer()).unwrap();
    } else {
        write!(out, "{}/{}", c.numer(), c.denom()).unwrap();
    }
}

fn write_monomial(out: &mut String, exps: &[u16], ctx: &VariableContext) {
    let mut first = true;
    for (var, &d) in exps.iter().enumerate() {
        if d == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(ctx.symbol(var).name());
        if d > 1 {
            write!(out, "^{d}").unwrap();
        }
    }
}

impl Render for Polynomial {
    fn render(&self, ctx: &VariableContext) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (exps, c)) in self.terms().iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let constant = exps.iter().all(|&e| e == 0);
            if constant {
                write_rational(&mut out, &mag);
            } else {
                if !mag.is_one() {
                    write_rational(&mut out, &mag);
                    out.push('*');
                }
                write_monomial(&mut out, exps, ctx);
            }
        }
        out
    }
}

impl Render for RationalFunction {
    fn render(&self, ctx: &VariableContext) -> String {
        let num = self.numerator();
        let den = self.denominator();
        if den.is_one() {
            return num.render(ctx);
        }
        let mut out = String::new();
        if num.len() > 1 {
            write!(out, "({})", num.render(ctx)).unwrap();
        } else {
            out.push_str(&num.render(ctx));
        }
        out.push('/');
        let single_factor = den.len() == 1
            && den.terms()[0].1.is_one()
            && den.terms()[0].0.iter().filter(|&&e| e > 0).count() == 1;
        if single_factor {
            out.push_str(&den.render(ctx));
        } else {
            write!(out, "({})", den.render(ctx)).unwrap();
        }
        out
    }
}

/// Helper for tests and constructors: `BigRational` from a machine integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}
