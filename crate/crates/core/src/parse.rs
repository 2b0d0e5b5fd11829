//! Operator expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | 'h' | 'q'i | 'd'i | 'b'i | '(' expr ')'
//! ```
//!
//! `d_i` is the logarithmic derivative `q_i d/dq_i`; `b_i` is the commutative
//! symbol of `h d_i` and is only accepted in relation mode. Products are taken
//! left to right and normal-ordered. Division and negative powers are only
//! allowed for scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::coeff::{Coeff, RatFunc};
use crate::ore::{DMono, Mode, Operator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown symbol '{name}' at offset {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("only scalars can be divided by or raised to negative powers (offset {offset})")]
    NonScalar { offset: usize },
    #[error("division by zero at offset {offset}")]
    DivisionByZero { offset: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(s[start..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = s[i..].chars().next().expect("in bounds");
            return Err(ParseError::SyntaxError { offset: i, message: format!("unexpected character '{ch}'") });
        }
    }
    Ok(out)
}

/// What the expression may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    /// Operators in `h`, `q_i`, `d_i`.
    Operator,
    /// Commutative relations in `q_i`, `b_i` (and `h`).
    Relation,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    nq: usize,
    dialect: Dialect,
}

type Op = Operator<RatFunc>;

impl Parser {
    fn mode(&self) -> Mode {
        match self.dialect {
            Dialect::Operator => Mode::Ore,
            Dialect::Relation => Mode::Commutative,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: &str) -> Result<T, ParseError> {
        Err(ParseError::SyntaxError { offset: self.offset(), message: message.to_string() })
    }

    fn scalar(&self, c: RatFunc) -> Op {
        Operator::from_coeff(c, self.nq)
    }

    fn as_scalar(op: &Op) -> Option<RatFunc> {
        match op.num_terms() {
            0 => Some(RatFunc::zero(op.ctx())),
            1 => {
                let (m, c) = op.leading().expect("one term");
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Op, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Op, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = acc.mul(&rhs, self.mode());
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let offset = self.offset();
                self.pos += 1;
                let rhs = self.unary()?;
                let d = Self::as_scalar(&rhs).ok_or(ParseError::NonScalar { offset })?;
                let inv = d.inv().map_err(|_| ParseError::DivisionByZero { offset })?;
                acc = acc.scale_left(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Op, ParseError> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Op, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let offset = self.offset();
        let negative = self.eat('-');
        let n = match self.peek() {
            Some(Tok::Num(n)) => n.clone(),
            _ => return self.syntax("expected integer exponent"),
        };
        self.pos += 1;
        let n = n.to_u32().ok_or(ParseError::SyntaxError { offset, message: "exponent too large".into() })?;
        if negative {
            let s = Self::as_scalar(&base).ok_or(ParseError::NonScalar { offset })?;
            let inv = s.inv().map_err(|_| ParseError::DivisionByZero { offset })?;
            Ok(self.scalar(inv).pow(n, self.mode()))
        } else {
            Ok(base.pow(n, self.mode()))
        }
    }

    fn indexed(name: &str, prefix: char, limit: usize) -> Option<usize> {
        let rest = name.strip_prefix(prefix)?;
        if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let i: usize = rest.parse().ok()?;
        (1..=limit).contains(&i).then_some(i - 1)
    }

    fn atom(&mut self) -> Result<Op, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.scalar(RatFunc::from_rational(&self.nq, BigRational::from_integer(n))))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected ')'");
                }
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "h" {
                    return Ok(self.scalar(RatFunc::h_pow(&self.nq, 1)));
                }
                if let Some(i) = Self::indexed(&name, 'q', self.nq) {
                    return Ok(self.scalar(RatFunc::q_var(&self.nq, i)));
                }
                match self.dialect {
                    Dialect::Operator => {
                        if let Some(i) = Self::indexed(&name, 'd', self.nq) {
                            return Ok(Operator::monomial(RatFunc::h_pow(&self.nq, -1), DMono::var(self.nq, i)));
                        }
                    }
                    Dialect::Relation => {
                        if let Some(i) = Self::indexed(&name, 'b', self.nq) {
                            return Ok(Operator::d(&self.nq, self.nq, i));
                        }
                    }
                }
                Err(ParseError::UnknownSymbol { offset, name })
            }
            Some(Tok::Sym(c)) => self.syntax(&format!("unexpected '{c}'")),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses an expression over `nq` variables.
pub fn parse(s: &str, nq: usize, dialect: Dialect) -> Result<Operator<RatFunc>, ParseError> {
    let mut p = Parser { toks: lex(s)?, pos: 0, end: s.len(), nq, dialect };
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(out)
}

pub fn parse_operator(s: &str, nq: usize) -> Result<Operator<RatFunc>, ParseError> {
    parse(s, nq, Dialect::Operator)
}

pub fn parse_relation(s: &str, nq: usize) -> Result<Operator<RatFunc>, ParseError> {
    parse(s, nq, Dialect::Relation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_derivative_commutes_past_q() {
        let lhs = parse_operator("d1*q1", 1).unwrap();
        let rhs = parse_operator("q1*d1 + q1", 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unclosed_paren_reports_end_offset() {
        assert_eq!(
            parse_operator("h^2*(d1", 1).unwrap_err(),
            ParseError::SyntaxError { offset: 7, message: "expected ')'".into() }
        );
    }

    #[test]
    fn unknown_symbols() {
        assert!(matches!(parse_operator("d3", 2), Err(ParseError::UnknownSymbol { offset: 0, .. })));
        assert!(matches!(parse_operator("b1", 1), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_operator("2 + x", 1), Err(ParseError::UnknownSymbol { offset: 4, .. })));
        assert!(matches!(parse_relation("d1", 1), Err(ParseError::UnknownSymbol { .. })));
    }

    #[test]
    fn division_needs_a_scalar() {
        assert!(matches!(parse_operator("q1/d1", 1), Err(ParseError::NonScalar { offset: 2 })));
        assert!(matches!(parse_operator("q1/(h-h)", 1), Err(ParseError::DivisionByZero { .. })));
        assert_eq!(parse_operator("h^-1*h", 1).unwrap(), parse_operator("1", 1).unwrap());
    }

    #[test]
    fn distinct_derivatives_expand_freely() {
        let lhs = parse_operator("(d2-2*d1)*(d2-2*d1-1)", 2).unwrap();
        let rhs = parse_operator("d2^2 - 4*d1*d2 + 4*d1^2 - d2 + 2*d1", 2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn printer_round_trips() {
        let p = parse_operator("h^2*d2*(d2-2*d1) - q2 + q1/(4*q1-1)*h*d1 - 1/2*q2/h", 2).unwrap();
        assert_eq!(parse_operator(&p.to_string(), 2).unwrap(), p);
    }
}
