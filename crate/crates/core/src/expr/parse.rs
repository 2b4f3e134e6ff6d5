//! Recursive-descent parser for metric and binding expressions.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := base ("^" uint)?
//! base     := rational | identifier | "(" expr ")" | "-" base
//! rational := uint ("/" uint)?
//! ```
//!
//! A leading minus applies to the whole power, so `-v^2` is `-(v^2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

use super::context::VariableContext;
use super::rational::RationalFunction;
use super::ExprError;

pub fn parse_expression(text: &str, ctx: &VariableContext) -> Result<RationalFunction, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a VariableContext,
}

impl Parser<'_> {
    fn syntax(&self, message: String) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction, ExprError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, ExprError> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            if c == b'*' {
                acc = &acc * &rhs;
            } else {
                if rhs.is_zero() {
                    return Err(ExprError::Syntax {
                        offset: at,
                        message: "division by the zero polynomial".into(),
                    });
                }
                acc = acc.checked_div(&rhs)?;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RationalFunction, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(b'-') => {
                    return Err(ExprError::BadExponent {
                        offset: self.pos,
                        message: "negative exponent".into(),
                    })
                }
                Some(c) if c.is_ascii_digit() => {}
                Some(b'(') => {
                    return Err(ExprError::BadExponent {
                        offset: self.pos,
                        message: "exponent must be an unsigned integer literal".into(),
                    })
                }
                _ => return Err(self.syntax("expected an unsigned integer exponent".into())),
            }
            let start = self.pos;
            let digits = self.uint()?;
            if self.peek() == Some(b'.') {
                return Err(ExprError::BadExponent {
                    offset: start,
                    message: "non-integer exponent".into(),
                });
            }
            let n: u32 = digits.parse().map_err(|_| ExprError::BadExponent {
                offset: start,
                message: "exponent too large".into(),
            })?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RationalFunction, ExprError> {
        let nvars = self.ctx.nvars();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input".into())),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.base()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let value = BigRational::from_integer(BigInt::from_str_radix(&n, 10).unwrap());
                Ok(RationalFunction::constant(nvars, value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.ctx.lookup(name) {
                    Some(var) => Ok(RationalFunction::var(nvars, var)),
                    None => Err(ExprError::UnknownIdentifier {
                        name: name.to_string(),
                        offset: start,
                    }),
                }
            }
            Some(c) => Err(self.syntax(format!("unexpected '{}'", c as char))),
        }
    }

    fn uint(&mut self) -> Result<String, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected digits".into()));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string())
    }
}
