use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => {}
            'X' | 'x' => out.push(Tok::X),
            '+' => out.push(Tok::Plus),
            '-' | '−' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            d if d.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..=i].iter().collect();
                out.push(Tok::Num(digits.parse().unwrap()));
            }
            other => return Err(Error::parse(format!("unexpected character {other:?} in {s:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

/// A quotient of polynomials with nonzero denominator.
#[derive(Clone)]
struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    fn poly(p: Poly) -> Frac {
        Frac { num: p, den: Poly::one() }
    }

    fn reduce(self) -> Frac {
        let g = self.num.gcd(&self.den);
        if g.is_constant() {
            return self;
        }
        Frac { num: self.num.exact_div(&g).unwrap(), den: self.den.exact_div(&g).unwrap() }
    }

    fn add(&self, o: &Frac) -> Frac {
        Frac {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
        .reduce()
    }

    fn neg(&self) -> Frac {
        Frac { num: -&self.num, den: self.den.clone() }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac { num: &self.num * &o.num, den: &self.den * &o.den }.reduce()
    }

    fn recip(&self) -> Result<Frac> {
        if self.num.is_zero() {
            return Err(Error::parse("division by zero"));
        }
        Ok(Frac { num: self.den.clone(), den: self.num.clone() })
    }

    fn pow(&self, k: i64) -> Result<Frac> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs() as usize;
        Ok(Frac { num: base.num.pow(e), den: base.den.pow(e) })
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

const MAX_EXPONENT: i64 = 4096;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        loop {
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
        }
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?.recip()?);
                }
                // juxtaposition, as in `3X` or `2(X-1)`
                Some(Tok::X) | Some(Tok::LParen) | Some(Tok::Num(_)) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let mut negative = false;
        let mut parens = false;
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            parens = true;
        }
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            negative = true;
        }
        let k = match self.bump() {
            Some(Tok::Num(n)) => n
                .to_i64()
                .filter(|k| *k <= MAX_EXPONENT)
                .ok_or_else(|| Error::parse(format!("exponent {n} too large")))?,
            _ => return Err(Error::parse("expected an integer exponent after '^'")),
        };
        if parens && self.bump() != Some(Tok::RParen) {
            return Err(Error::parse("expected ')' after exponent"));
        }
        base.pow(if negative { -k } else { k })
    }

    fn atom(&mut self) -> Result<Frac> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Frac::poly(Poly::constant(Rational::from_integer(n)))),
            Some(Tok::X) => Ok(Frac::poly(Poly::x())),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    return Err(Error::parse("unbalanced parentheses"));
                }
                Ok(inner)
            }
            Some(t) => Err(Error::parse(format!("unexpected token {t:?}"))),
            None => Err(Error::parse("unexpected end of expression")),
        }
    }
}

/// Parses a rational function of `X` with `+ - * / ^ ( )` and rational
/// constants, returning an unnormalized numerator and denominator.
pub fn parse_rational_function(s: &str) -> Result<(Poly, Poly)> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::parse("empty map expression"));
    }
    let mut p = Parser { toks, pos: 0 };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(format!("trailing input in {s:?}")));
    }
    if f.den.is_zero() {
        return Err(Error::parse("division by zero"));
    }
    let lead = f.den.leading().recip();
    Ok((f.num.scale(&lead), f.den.monic()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(s: &str) -> String {
        let (n, d) = parse_rational_function(s).unwrap();
        format!("{n} | {d}")
    }

    #[test]
    fn grammar() {
        assert_eq!(show("X^2 + 1/3"), "X^2 + 1/3 | 1");
        assert_eq!(show("(1-X)^2 / X"), "X^2 - 2*X + 1 | X");
        assert_eq!(show("3X^2 - 2(X+1)"), "3*X^2 - 2*X - 2 | 1");
        assert_eq!(show("X^-2"), "1 | X^2");
        assert_eq!(show("x^(-1) + x"), "X^2 + 1 | X");
        assert_eq!(show("-X^2"), "-X^2 | 1");
    }

    #[test]
    fn rejects_bad_input() {
        for s in ["", "X +", "(X", "X^Y", "1/0", "X/(X-X)", "2^99999", "X $ 1"] {
            assert!(parse_rational_function(s).is_err(), "{s}");
        }
    }
}
