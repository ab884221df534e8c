//! Recursive-descent reader for the polynomial text grammar:
//! `3/4*x^2*y - 2*z1*zb1 + i`, with parentheses and `^-k` on Laurent variables.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::coeff::{Coeff, GaussianRational, Rational};
use super::polynomial::{ComplexStarPolynomial, Polynomial, RealPolynomial};
use super::vars::{VarSet, Vars};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    /// Shift positions of an error raised on a single line embedded in a file.
    pub fn at_line(mut self, line: usize) -> Self {
        self.line += line - 1;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = position(text, offset);
    ParseError { line, column, message: message.into() }
}

impl<'a> Lexer<'a> {
    fn run(text: &'a str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                toks.push((Tok::Num(n), start));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            } else if "+-*/^()".contains(c) {
                toks.push((Tok::Op(c), i));
                i += 1;
            } else {
                return Err(error_at(text, i, format!("unexpected character '{c}'")));
            }
        }
        toks.push((Tok::End, text.len()));
        Ok(Self { text, toks })
    }
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vars,
}

type P = ComplexStarPolynomial;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        error_at(self.text, self.offset(), msg)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<P, ParseError> {
        let mut acc = P::zero(&self.vars);
        let mut sign = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                -1
            }
            Tok::Op('+') => {
                self.bump();
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Tok::Op('+') => sign = 1,
                Tok::Op('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<P, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                Tok::Op('/') => {
                    self.bump();
                    let at = self.offset();
                    let f = self.power()?;
                    let inv = if f.is_constant() {
                        let c = f.constant_term();
                        if c.is_zero() {
                            return Err(error_at(self.text, at, "division by zero"));
                        }
                        P::constant(&self.vars, c.cinv())
                    } else {
                        f.monomial_inverse().ok_or_else(|| {
                            error_at(self.text, at, "can only divide by a constant or a Laurent monomial")
                        })?
                    };
                    acc = &acc * &inv;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<P, ParseError> {
        if matches!(self.peek(), Tok::Op('-')) {
            self.bump();
            return Ok(-&self.power()?);
        }
        let base = self.primary()?;
        if !matches!(self.peek(), Tok::Op('^')) {
            return Ok(base);
        }
        self.bump();
        let negative = matches!(self.peek(), Tok::Op('-'));
        if negative {
            self.bump();
        }
        let at = self.offset();
        let k = match self.bump() {
            Tok::Num(n) => u32::try_from(n).map_err(|_| error_at(self.text, at, "exponent too large"))?,
            _ => return Err(error_at(self.text, at, "expected an integer exponent")),
        };
        if negative {
            let inv = if base.is_constant() && !base.is_zero() {
                P::constant(&self.vars, base.constant_term().cinv())
            } else {
                base.monomial_inverse().ok_or_else(|| {
                    error_at(self.text, at, "negative exponent on a non-Laurent expression")
                })?
            };
            Ok(inv.pow(k))
        } else {
            Ok(base.pow(k))
        }
    }

    fn primary(&mut self) -> Result<P, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(n) => Ok(P::constant(&self.vars, GaussianRational::real(Rational::from_integer(n)))),
            Tok::Ident(name) if name == "i" => Ok(P::constant(&self.vars, GaussianRational::i())),
            Tok::Ident(name) => match self.vars.index_of(&name) {
                Some(k) => Ok(P::var(&self.vars, k)),
                None => Err(error_at(
                    self.text,
                    at,
                    format!("unknown variable '{name}' (expected one of {})", self.vars),
                )),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                match self.bump() {
                    Tok::Op(')') => Ok(inner),
                    _ => Err(error_at(self.text, self.toks[self.pos.saturating_sub(1)].1, "expected ')'")),
                }
            }
            Tok::End => Err(error_at(self.text, at, "unexpected end of input")),
            Tok::Op(c) => Err(error_at(self.text, at, format!("unexpected '{c}'"))),
        }
    }
}

/// Parse over a given variable set, allowing Gaussian-rational coefficients.
pub fn parse_complex(text: &str, vars: &Vars) -> Result<ComplexStarPolynomial, ParseError> {
    let lexer = Lexer::run(text)?;
    let mut p = Parser { text: lexer.text, toks: lexer.toks, pos: 0, vars: vars.clone() };
    if matches!(p.peek(), Tok::End) {
        return Err(p.err("empty polynomial"));
    }
    let out = p.expr()?;
    if !matches!(p.peek(), Tok::End) {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parse a polynomial with rational coefficients.
pub fn parse_real(text: &str, vars: &Vars) -> Result<RealPolynomial, ParseError> {
    let p = parse_complex(text, vars)?;
    if !p.is_real() {
        return Err(error_at(text, 0, "imaginary coefficient in a real polynomial"));
    }
    Ok(p.real_part())
}

/// Identifiers used in `text`, excluding the imaginary unit.
pub fn identifiers(text: &str) -> Result<Vec<String>, ParseError> {
    let lexer = Lexer::run(text)?;
    let mut out: Vec<String> = Vec::new();
    for (t, _) in lexer.toks {
        if let Tok::Ident(s) = t {
            if s != "i" && !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Parse a real polynomial, inferring variables in the canonical order.
pub fn parse_real_infer(text: &str) -> Result<RealPolynomial, ParseError> {
    let ids = identifiers(text)?;
    let vars = VarSet::infer_plain(&ids).ok_or_else(|| {
        error_at(text, 0, format!("unrecognised variable among {}", ids.join(", ")))
    })?;
    parse_real(text, &vars)
}

/// Number of complex variables `d` referenced by `z`/`zb` style names.
pub fn star_dimension(ids: &[String]) -> Option<usize> {
    let mut d = 0usize;
    for id in ids {
        let rest = id.strip_prefix("zb").or_else(|| id.strip_prefix('z'))?;
        let k = if rest.is_empty() { 1 } else { rest.parse::<usize>().ok().filter(|&k| k >= 1)? };
        d = d.max(k);
    }
    Some(d)
}

/// Parse a complex star polynomial, inferring `d` from the names used.
/// `min_d` forces at least that many variable pairs.
pub fn parse_star_infer(text: &str, min_d: usize, laurent: bool) -> Result<ComplexStarPolynomial, ParseError> {
    let ids = identifiers(text)?;
    let d = star_dimension(&ids)
        .ok_or_else(|| error_at(text, 0, format!("expected z/zb variables, found {}", ids.join(", "))))?
        .max(min_d)
        .max(1);
    parse_complex(text, &VarSet::star(d, laurent))
}

impl<C: Coeff> Polynomial<C> {
    /// Unit polynomial check without allocating.
    pub fn is_one(&self) -> bool {
        self.num_terms() == 1 && self.is_constant() && self.constant_term().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::coeff::ratio;
    use crate::polycore::monomial::Monomial;
    use num_traits::One;

    #[test]
    fn grammar_example() {
        let vars = VarSet::plain(&["x", "y", "z1", "zb1"]);
        let p = parse_complex("3/4*x^2*y - 2*z1*zb1 + i", &vars).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(
            p.coeff(&Monomial(vec![2, 1, 0, 0])),
            GaussianRational::real(ratio(3, 4))
        );
        assert_eq!(p.constant_term(), GaussianRational::i());
    }

    #[test]
    fn display_round_trips() {
        let vars = VarSet::real(1);
        for s in ["x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", "-x + 1/2", "(x+y)^2 - 2*x*y"] {
            let p = parse_real(s, &vars).unwrap();
            let q = parse_real(&p.to_string(), &vars).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn laurent_exponents() {
        let vars = VarSet::star(1, true);
        let p = parse_complex("z^-2*zb + 1/z", &vars).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![-2, 1])), GaussianRational::one());
        assert_eq!(p.coeff(&Monomial(vec![-1, 0])), GaussianRational::one());
        assert!(parse_complex("z^-1", &VarSet::star(1, false)).is_err());
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_real_infer("x + * y").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        let e = parse_real("x +\n  q", &VarSet::real(1)).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn star_dimension_inference() {
        let p = parse_star_infer("z1 + zb2", 0, false).unwrap();
        assert_eq!(p.nvars(), 4);
        let p = parse_star_infer("z^2 + 1", 0, false).unwrap();
        assert_eq!(p.nvars(), 2);
    }
}
