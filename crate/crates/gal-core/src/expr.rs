//! The expression grammar shared by CLI flags and JSON `expr` fields.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := atom ("^" NAT)?
//! atom     := RATIONAL | IDENT | "(" expr ")" | "-" atom
//! RATIONAL := NAT ("/" NAT)?
//! IDENT    := [A-Za-z][A-Za-z0-9]*
//! ```
//!
//! No implicit multiplication and no general division: the slash appears
//! only inside rational literals. Whitespace is insignificant. `m`, `n`,
//! `l`, `i` are always-known grading variables; every other identifier must
//! appear in the caller's parameter set. All errors carry a 1-based byte
//! offset.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::poly::MultiPoly;
use crate::rational::Rational;

/// Grading variables that are always in scope.
pub const RESERVED_VARS: [&str; 4] = ["m", "n", "l", "i"];

pub fn is_reserved_var(name: &str) -> bool {
    RESERVED_VARS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based byte offset of the offending input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownIdentifier(String),
    ZeroDenominator,
    ExponentTooLarge,
    ExpectedExponent,
    ExpectedDenominator,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier `{id}`"),
            ParseErrorKind::ZeroDenominator => write!(f, "denominator is zero"),
            ParseErrorKind::ExponentTooLarge => write!(f, "exponent does not fit in 32 bits"),
            ParseErrorKind::ExpectedExponent => {
                write!(f, "expected a non-negative integer exponent")
            }
            ParseErrorKind::ExpectedDenominator => write!(f, "expected digits after `/`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Caret => "^".into(),
            Tok::Slash => "/".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

struct Lexed {
    toks: Vec<(usize, Tok)>,
    end_offset: usize,
}

fn lex(src: &str) -> Result<Lexed, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut pos = 0usize;
    while pos < bytes.len() {
        let b = bytes[pos];
        let offset = pos + 1;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            b'0'..=b'9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits = &src[start..pos];
                let value = digits
                    .bytes()
                    .fold(BigInt::zero(), |acc, d| acc * 10u32 + u32::from(d - b'0'));
                toks.push((offset, Tok::Num(value)));
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_alphanumeric() {
                    pos += 1;
                }
                toks.push((offset, Tok::Ident(src[start..pos].to_string())));
            }
            b'+' => {
                toks.push((offset, Tok::Plus));
                pos += 1;
            }
            b'-' => {
                toks.push((offset, Tok::Minus));
                pos += 1;
            }
            b'*' => {
                toks.push((offset, Tok::Star));
                pos += 1;
            }
            b'^' => {
                toks.push((offset, Tok::Caret));
                pos += 1;
            }
            b'/' => {
                toks.push((offset, Tok::Slash));
                pos += 1;
            }
            b'(' => {
                toks.push((offset, Tok::LParen));
                pos += 1;
            }
            b')' => {
                toks.push((offset, Tok::RParen));
                pos += 1;
            }
            _ => {
                let c = src[pos..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset,
                    kind: ParseErrorKind::UnexpectedChar(c),
                });
            }
        }
    }
    Ok(Lexed {
        toks,
        end_offset: bytes.len() + 1,
    })
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end_offset: usize,
    allowed: &'a BTreeSet<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut p = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    p = &p + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    p = &p - &self.term()?;
                }
                _ => return Ok(p),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut p = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.pos += 1;
            p = &p * &self.factor()?;
        }
        Ok(p)
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.pos += 1;
        match self.next() {
            Some((off, Tok::Num(v))) => {
                let exp = v
                    .to_u32()
                    .ok_or_else(|| self.err(off, ParseErrorKind::ExponentTooLarge))?;
                Ok(base.pow(exp))
            }
            Some((off, _)) => Err(self.err(off, ParseErrorKind::ExpectedExponent)),
            None => Err(self.err(self.end_offset, ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        match self.next() {
            Some((_, Tok::Num(num))) => {
                if !matches!(self.peek(), Some(Tok::Slash)) {
                    return Ok(MultiPoly::constant(Rational::from_integer(num)));
                }
                self.pos += 1;
                match self.next() {
                    Some((doff, Tok::Num(d))) => {
                        if d.is_zero() {
                            return Err(self.err(doff, ParseErrorKind::ZeroDenominator));
                        }
                        Ok(MultiPoly::constant(Rational::new(num, d)))
                    }
                    Some((doff, _)) => Err(self.err(doff, ParseErrorKind::ExpectedDenominator)),
                    None => Err(self.err(self.end_offset, ParseErrorKind::ExpectedDenominator)),
                }
            }
            Some((off, Tok::Ident(name))) => {
                if is_reserved_var(&name) || self.allowed.contains(&name) {
                    Ok(MultiPoly::var(&name))
                } else {
                    Err(self.err(off, ParseErrorKind::UnknownIdentifier(name)))
                }
            }
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.next() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((off, t)) => Err(self.err(off, ParseErrorKind::UnexpectedToken(t.describe()))),
                    None => Err(self.err(self.end_offset, ParseErrorKind::UnexpectedEnd)),
                }
            }
            Some((_, Tok::Minus)) => Ok(-&self.atom()?),
            Some((off, t)) => Err(self.err(off, ParseErrorKind::UnexpectedToken(t.describe()))),
            None => Err(self.err(self.end_offset, ParseErrorKind::UnexpectedEnd)),
        }
    }
}

/// Parse `src` into a canonical polynomial. Identifiers outside
/// `{m,n,l,i} ∪ allowed_params` are rejected with their byte offset.
pub fn parse_expression(
    src: &str,
    allowed_params: &BTreeSet<String>,
) -> Result<MultiPoly, ParseError> {
    let lexed = lex(src)?;
    let mut parser = Parser {
        toks: &lexed.toks,
        pos: 0,
        end_offset: lexed.end_offset,
        allowed: allowed_params,
    };
    let poly = parser.expr()?;
    if parser.pos < parser.toks.len() {
        let (off, t) = &parser.toks[parser.pos];
        return Err(ParseError {
            offset: *off,
            kind: ParseErrorKind::UnexpectedToken(t.describe()),
        });
    }
    Ok(poly)
}

/// Deterministic canonical text; `parse_expression(format_canonical(p)) == p`.
pub fn format_canonical(p: &MultiPoly) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn params(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn parse(src: &str, ps: &[&str]) -> MultiPoly {
        parse_expression(src, &params(ps)).unwrap()
    }

    fn parse_err(src: &str, ps: &[&str]) -> ParseError {
        parse_expression(src, &params(ps)).unwrap_err()
    }

    #[test]
    fn family_polynomial() {
        let p = parse("-(g + m + 2*n)", &["g"]);
        let expected = -&(&(&MultiPoly::var("g") + &MultiPoly::var("m"))
            + &MultiPoly::var("n").scale(&rat(2)));
        assert_eq!(p, expected);
        assert_eq!(format_canonical(&p), "-g - m - 2*n");
    }

    #[test]
    fn slash_only_in_literals() {
        let e = parse_err("(m^3 - m)/12", &[]);
        assert_eq!(e.offset, 10);
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedToken(_)));

        let p = parse("1/12*m^3 - 1/12*m", &[]);
        let m = MultiPoly::var("m");
        assert_eq!(p, &m.pow(3).scale(&ratio(1, 12)) - &m.scale(&ratio(1, 12)));
        assert_eq!(format_canonical(&p), "1/12*m^3 - 1/12*m");
    }

    #[test]
    fn module_coefficient_expression() {
        let p = parse("a + i + 2*m", &["a"]);
        let vars = p.vars();
        assert!(vars.contains("a") && vars.contains("i") && vars.contains("m"));
    }

    #[test]
    fn zero_formats_as_zero() {
        assert_eq!(format_canonical(&MultiPoly::zero()), "0");
        assert!(parse("0", &[]).is_zero());
    }

    #[test]
    fn unknown_identifier_offset() {
        let e = parse_err("m + q", &[]);
        assert_eq!(e.offset, 5);
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("q".into()));
    }

    #[test]
    fn zero_denominator_offset() {
        let e = parse_err("1/0", &[]);
        assert_eq!(e.offset, 3);
        assert_eq!(e.kind, ParseErrorKind::ZeroDenominator);
    }

    #[test]
    fn assorted_syntax_errors() {
        assert_eq!(parse_err("", &[]).kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_err("", &[]).offset, 1);
        assert_eq!(parse_err("m +", &[]).offset, 4);
        assert_eq!(parse_err("(m", &[]).kind, ParseErrorKind::UnexpectedEnd);
        let e = parse_err("2**m", &[]);
        assert_eq!((e.offset, e.kind), (3, ParseErrorKind::UnexpectedToken("*".into())));
        let e = parse_err("m n", &[]);
        assert_eq!((e.offset, e.kind), (3, ParseErrorKind::UnexpectedToken("n".into())));
        let e = parse_err("m ^ -2", &[]);
        assert_eq!((e.offset, e.kind), (5, ParseErrorKind::ExpectedExponent));
        let e = parse_err("m^2/3", &[]);
        assert_eq!(e.offset, 4);
    }

    #[test]
    fn unary_minus_binds_the_atom() {
        // Per the grammar "-g^2" is (-g)^2; the printer therefore spells a
        // leading negative square as -1*g^2.
        assert_eq!(parse("-g^2", &["g"]), parse("g^2", &["g"]));
        let neg_square = -&MultiPoly::var("g").pow(2);
        assert_eq!(format_canonical(&neg_square), "-1*g^2");
        assert_eq!(parse("-1*g^2", &["g"]), neg_square);
        // Descending order puts the square first even in a mixed sum, so the
        // guard applies there too; the output still round-trips.
        let p = &MultiPoly::var("m") - &MultiPoly::var("g").pow(2);
        assert_eq!(format_canonical(&p), "-1*g^2 + m");
        assert_eq!(parse("-1*g^2 + m", &["g"]), p);
        assert_eq!(parse("m - g^2", &["g"]), p);
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse(" - ( g+m ) ", &["g"]), parse("-(g + m)", &["g"]));
    }
}
