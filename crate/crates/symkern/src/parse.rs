//! Precedence-climbing parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := integer | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Recognized functions are `exp`, `log`, `sqrt` and `ArcTanh`. The bare
//! identifier `e` denotes Euler's number, so `e^u` reads as `exp(u)`.

use rug::{Integer, Rational};
use thiserror::Error;

use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character '{found}' at byte {offset}")]
    UnexpectedChar { found: char, offset: usize },
    #[error("unexpected end of input at byte {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("expected {expected} at byte {offset}")]
    Expected { expected: &'static str, offset: usize },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("exponent at byte {offset} is not a rational constant")]
    NonRationalExponent { offset: usize },
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
}

impl ParseError {
    /// Byte offset into the source where the problem was detected.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnexpectedChar { offset, .. }
            | ParseError::UnexpectedEnd { offset }
            | ParseError::Expected { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::NonRationalExponent { offset }
            | ParseError::DivisionByZero { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(Integer),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() {
            let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            self.pos += len;
            let n = Integer::from_str_radix(&rest[..len], 10).expect("digits");
            return Ok((Tok::Int(n), start));
        }
        if c.is_ascii_alphabetic() {
            let len = rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), start));
        }
        Err(ParseError::UnexpectedChar { found: c, offset: start })
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lex = Lexer { src, pos: 0 };
        let (tok, at) = lex.next()?;
        Ok(Parser { lex, tok, at })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.tok {
            Tok::End => ParseError::UnexpectedEnd { offset: self.at },
            _ => ParseError::Expected { expected, offset: self.at },
        }
    }

    fn expect(&mut self, op: char, what: &'static str) -> Result<(), ParseError> {
        if self.tok == Tok::Op(op) {
            self.bump()
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.bump()?;
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump()?;
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::add_all(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.bump()?;
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump()?;
                    let at = self.at;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(ParseError::DivisionByZero { offset: at });
                    }
                    factors.push(Expr::recip(d));
                }
                _ => break,
            }
        }
        Ok(Expr::mul_all(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let (base, is_e) = self.primary()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let at = self.at;
        let exponent = self.unary()?;
        if is_e {
            return Ok(Expr::exp(exponent));
        }
        let Some(r) = exponent.as_num() else {
            return Err(ParseError::NonRationalExponent { offset: at });
        };
        if base.is_zero() && r.cmp0() != std::cmp::Ordering::Greater {
            return Err(ParseError::DivisionByZero { offset: at });
        }
        Ok(Expr::pow(base, r.clone()))
    }

    /// Parses a primary; the flag marks the bare constant `e`.
    fn primary(&mut self) -> Result<(Expr, bool), ParseError> {
        match self.tok.clone() {
            Tok::Int(n) => {
                self.bump()?;
                Ok((Expr::num(Rational::from(n)), false))
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')', "')'")?;
                Ok((e, false))
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if self.tok != Tok::Op('(') {
                    return Ok(if name == "e" { (Expr::exp(Expr::one()), true) } else { (Expr::sym(&name), false) });
                }
                let f: fn(Expr) -> Expr = match name.as_str() {
                    "exp" => Expr::exp,
                    "log" => Expr::log,
                    "sqrt" => Expr::sqrt,
                    "ArcTanh" => Expr::atanh,
                    _ => return Err(ParseError::UnknownFunction { name, offset: at }),
                };
                self.bump()?;
                let arg = self.expr()?;
                self.expect(')', "')'")?;
                Ok((f(arg), false))
            }
            _ => Err(self.unexpected("an operand")),
        }
    }
}

/// Parses `text` into a normalized expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(ParseError::Expected { expected: "an operator or end of input", offset: p.at });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_basics() {
        let u = Expr::sym("u");
        assert_eq!(parse("u^2/2").unwrap(), Expr::powi(u.clone(), 2) * Expr::ratio(1, 2));
        assert_eq!(parse("-u^2").unwrap(), -Expr::powi(u.clone(), 2));
        assert_eq!(parse("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse("u^-1").unwrap(), Expr::recip(u.clone()));
        assert_eq!(parse(" 3 / 4 ").unwrap(), Expr::ratio(3, 4));
        assert_eq!(parse("sqrt(u)").unwrap(), Expr::pow(u.clone(), Rational::from((1, 2))));
    }

    #[test]
    fn euler_constant() {
        let u = Expr::sym("u");
        let w = Expr::sym("w");
        let h = parse("e^u + w^2/2").unwrap();
        assert_eq!(h, Expr::exp(u) + Expr::powi(w, 2) * Expr::ratio(1, 2));
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse("(u + 1").unwrap_err(), ParseError::UnexpectedEnd { offset: 6 });
        assert_eq!(parse("sin(u)").unwrap_err(), ParseError::UnknownFunction { name: "sin".into(), offset: 0 });
        assert_eq!(parse("u ^ w").unwrap_err(), ParseError::NonRationalExponent { offset: 4 });
        assert_eq!(parse("u $ 2").unwrap_err().offset(), 2);
        assert_eq!(parse("u)").unwrap_err().offset(), 1);
        assert!(matches!(parse("1/0"), Err(ParseError::DivisionByZero { .. })));
    }
}
