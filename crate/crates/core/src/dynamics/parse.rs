//! Recursive-descent parser for rational functions of `z`.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := ('-' | '+') factor | base ('^' uint)?
//! base     := 'z' | rational | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```
//!
//! A literal `a/b` binds as one rational, so `2/3^2` is `(2/3)^2`. Unicode
//! minus is accepted alongside `-`; whitespace is ignored.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::DynamicsError;

/// Degree cap for parsed expressions.
pub const MAX_PARSE_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Z,
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, DynamicsError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            'z' | 'Z' => Tok::Z,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

fn syntax(position: usize, message: impl Into<String>) -> DynamicsError {
    DynamicsError::Syntax {
        position,
        message: message.into(),
    }
}

/// Numerator and denominator over the rationals.
#[derive(Debug, Clone)]
pub(crate) struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    fn constant(c: BigRational) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::constant(BigRational::one()),
        }
    }

    fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    fn add(&self, o: &Self) -> Self {
        RatFunc {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .reduced()
    }

    fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        RatFunc {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
        .reduced()
    }

    fn div(&self, o: &Self, pos: usize) -> Result<Self, DynamicsError> {
        if o.num.is_zero() {
            return Err(DynamicsError::ZeroDenominator { position: pos });
        }
        Ok(RatFunc {
            num: self.num.mul(&o.den),
            den: self.den.mul(&o.num),
        }
        .reduced())
    }

    /// Cancels the common factor over the rationals.
    pub fn reduced(self) -> Self {
        if self.num.is_zero() {
            return RatFunc::constant(BigRational::zero());
        }
        let g = self.num.gcd(&self.den);
        RatFunc {
            num: self.num.div_rem(&g).0,
            den: self.den.div_rem(&g).0,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn check_degree(&self, f: RatFunc, pos: usize) -> Result<RatFunc, DynamicsError> {
        if f.degree() > MAX_PARSE_DEGREE {
            return Err(syntax(pos, format!("degree exceeds {MAX_PARSE_DEGREE}")));
        }
        Ok(f)
    }

    fn expr(&mut self) -> Result<RatFunc, DynamicsError> {
        let mut acc = self.term()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
            acc = self.check_degree(acc, pos)?;
        }
    }

    fn term(&mut self) -> Result<RatFunc, DynamicsError> {
        let mut acc = self.factor()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs, pos)?;
                }
                _ => return Ok(acc),
            }
            acc = self.check_degree(acc, pos)?;
        }
    }

    fn factor(&mut self) -> Result<RatFunc, DynamicsError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                return Ok(self.factor()?.neg());
            }
            Some(Tok::Plus) => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exp = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => return Err(syntax(pos, "expected an unsigned integer exponent")),
        };
        let exp: usize = exp
            .try_into()
            .ok()
            .filter(|&e: &usize| e.saturating_mul(base.degree().max(1)) <= MAX_PARSE_DEGREE)
            .ok_or_else(|| syntax(pos, format!("degree exceeds {MAX_PARSE_DEGREE}")))?;
        let mut acc = RatFunc::constant(BigRational::one());
        for _ in 0..exp {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn base(&mut self) -> Result<RatFunc, DynamicsError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Z) => Ok(RatFunc {
                num: Poly::variable(),
                den: Poly::constant(BigRational::one()),
            }),
            Some(Tok::Int(n)) => {
                // `a/b` with a literal b is a single rational literal
                if self.peek() == Some(&Tok::Slash) {
                    if let Some((dpos, Tok::Int(d))) = self.toks.get(self.at + 1).cloned() {
                        self.at += 2;
                        if d.is_zero() {
                            return Err(DynamicsError::ZeroDenominator { position: dpos });
                        }
                        return Ok(RatFunc::constant(BigRational::new(n, d)));
                    }
                }
                Ok(RatFunc::constant(BigRational::from_integer(n)))
            }
            Some(Tok::Open) => {
                let inner = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Some(Tok::Close) => Ok(inner),
                    _ => Err(syntax(close, "expected ')'")),
                }
            }
            Some(_) => Err(syntax(pos, "expected 'z', a number or '('")),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}

/// Parses into a reduced quotient of polynomials over the rationals.
pub(crate) fn parse_rational_function(text: &str) -> Result<RatFunc, DynamicsError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let f = parser.expr()?;
    if parser.at < parser.toks.len() {
        return Err(syntax(parser.pos(), "unexpected trailing input"));
    }
    Ok(f)
}
