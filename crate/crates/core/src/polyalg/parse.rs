//! Recursive-descent parser for the polynomial text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('-' | '+') factor | atom ('^' posint)*
//! atom   := number | 'x' posint | '(' expr ')'
//! number := integer | decimal | integer '/' integer
//! ```
//!
//! Whitespace is ignored. Numbers are read exactly, so `0.5` becomes `1/2`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::coeff::Coefficient;

use super::polynomial::Polynomial;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at position {position}: {kind} (found {found})")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedToken(&'static str),
    VariableOutOfRange { index: usize, n: usize },
    BadExponent,
    ZeroDenominator,
    UnexpectedCharacter,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptyInput => write!(f, "empty input"),
            ParseErrorKind::UnexpectedToken(expected) => write!(f, "expected {expected}"),
            ParseErrorKind::VariableOutOfRange { index, n } => {
                write!(f, "variable x{index} out of range 1..={n}")
            }
            ParseErrorKind::BadExponent => {
                write!(f, "exponent must be an integer in 1..={MAX_EXPONENT}")
            }
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator"),
            ParseErrorKind::UnexpectedCharacter => write!(f, "unexpected character"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    Int(u64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(r) => write!(f, "number '{r}'"),
            Tok::Int(i) => write!(f, "number '{i}'"),
            Tok::Var(i) => write!(f, "'x{i}'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        let start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        (start, j)
    };
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'x' => {
                let (s, e) = digits(i + 1);
                if s == e {
                    return Err(ParseError {
                        position: i,
                        kind: ParseErrorKind::UnexpectedToken("variable index after 'x'"),
                        found: "'x'".into(),
                    });
                }
                let idx: usize = text[s..e].parse().unwrap_or(usize::MAX);
                out.push((i, Tok::Var(idx)));
                i = e;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                let (_, int_end) = digits(i);
                let mut j = int_end;
                let value = if j < bytes.len() && bytes[j] == b'.' {
                    let (fs, fe) = digits(j + 1);
                    if int_end == start && fs == fe {
                        return Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::UnexpectedCharacter,
                            found: "'.'".into(),
                        });
                    }
                    let int_part = &text[start..int_end];
                    let frac = &text[fs..fe];
                    let num: BigInt = format!("{int_part}{frac}").parse().expect("digits");
                    let den = num_traits::pow(BigInt::from(10), frac.len());
                    j = fe;
                    BigRational::new(num, den)
                } else if j < bytes.len() && bytes[j] == b'/' {
                    let (ds, de) = digits(j + 1);
                    if ds == de {
                        return Err(ParseError {
                            position: j,
                            kind: ParseErrorKind::UnexpectedToken("denominator after '/'"),
                            found: "'/'".into(),
                        });
                    }
                    let num: BigInt = text[start..int_end].parse().expect("digits");
                    let den: BigInt = text[ds..de].parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError {
                            position: ds,
                            kind: ParseErrorKind::ZeroDenominator,
                            found: text[start..de].to_string(),
                        });
                    }
                    j = de;
                    BigRational::new(num, den)
                } else {
                    let digits_str = &text[start..int_end];
                    out.push((
                        start,
                        match digits_str.parse::<u64>() {
                            Ok(v) => Tok::Int(v),
                            Err(_) => Tok::Num(BigRational::from_integer(digits_str.parse().expect("digits"))),
                        },
                    ));
                    i = int_end;
                    continue;
                };
                out.push((start, Tok::Num(value)));
                i = j;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: i,
                    kind: ParseErrorKind::UnexpectedCharacter,
                    found: format!("'{ch}'"),
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.offset(), kind, found: self.peek().to_string() }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t).expect("same dimension");
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t).expect("same dimension");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.factor()?;
            acc = acc.multiply(&f).expect("same dimension");
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                let f = self.factor()?;
                return Ok(f.scale(&Coefficient::from_int(-1)));
            }
            Tok::Plus => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let mut base = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let e = match self.peek() {
                Tok::Int(v) if (1..=MAX_EXPONENT as u64).contains(v) => *v as u32,
                _ => return Err(self.error(ParseErrorKind::BadExponent)),
            };
            self.bump();
            base = base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.bump();
                Ok(Polynomial::constant(self.n, Coefficient::Rational(r)))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Polynomial::constant(self.n, Coefficient::from_bigint(BigInt::from(v))))
            }
            Tok::Var(i) => {
                if i == 0 || i > self.n {
                    return Err(self.error(ParseErrorKind::VariableOutOfRange { index: i, n: self.n }));
                }
                self.bump();
                Ok(Polynomial::variable(self.n, i - 1))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(ParseErrorKind::UnexpectedToken("')'")));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.error(ParseErrorKind::UnexpectedToken("number, variable or '('"))),
        }
    }
}

/// Parses `text` as a polynomial in the variables `x1..xn`.
pub fn parse_poly(text: &str, n: usize) -> Result<Polynomial, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError { position: 0, kind: ParseErrorKind::EmptyInput, found: "end of input".into() });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, n };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(ParseErrorKind::UnexpectedToken("operator or end of input")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MultiIndex;

    #[test]
    fn grammar_examples() {
        let f = parse_poly("x1^2*x2 - 0.5*x3", 3).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.coefficient(&MultiIndex::new(vec![2, 1, 0])), Some(&Coefficient::from_int(1)));
        assert_eq!(f.coefficient(&MultiIndex::new(vec![0, 0, 1])), Some(&Coefficient::ratio(-1, 2)));
        assert!(parse_poly("0", 2).unwrap().is_zero());
        let sq = parse_poly("(x1+x2)^2", 2).unwrap();
        assert_eq!(sq.coefficient(&MultiIndex::new(vec![1, 1])), Some(&Coefficient::from_int(2)));
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn numbers() {
        let f = parse_poly("3/6 + 1.25 + .5 + 007", 1).unwrap();
        assert_eq!(f.coefficient(&MultiIndex::zeros(1)), Some(&Coefficient::ratio(37, 4)));
    }

    #[test]
    fn unary_signs() {
        assert_eq!(parse_poly("-x1^2", 1).unwrap().to_string(), "-x1^2");
        assert_eq!(parse_poly("x1*-x2", 2).unwrap().to_string(), "-x1*x2");
        assert_eq!(parse_poly("+x1 - -x1", 1).unwrap().to_string(), "2*x1");
    }

    #[test]
    fn errors_report_position() {
        let e = parse_poly("x1 + x4", 3).unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.kind, ParseErrorKind::VariableOutOfRange { index: 4, n: 3 });

        let e = parse_poly("x1 + * x2", 2).unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.found, "'*'");

        assert_eq!(parse_poly("   ", 2).unwrap_err().kind, ParseErrorKind::EmptyInput);
        assert_eq!(parse_poly("x1^0", 1).unwrap_err().kind, ParseErrorKind::BadExponent);
        assert_eq!(parse_poly("x1^x2", 2).unwrap_err().kind, ParseErrorKind::BadExponent);
        assert_eq!(parse_poly("1/0", 1).unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(parse_poly("(x1", 1).unwrap_err().position, 3);
        assert_eq!(parse_poly("x1 x2", 2).unwrap_err().position, 3);
        assert_eq!(parse_poly("y1", 2).unwrap_err().kind, ParseErrorKind::UnexpectedCharacter);
        assert_eq!(parse_poly("x0", 2).unwrap_err().kind, ParseErrorKind::VariableOutOfRange { index: 0, n: 2 });
    }
}
