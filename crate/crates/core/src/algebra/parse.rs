//! Plain-text polynomial grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        // '/' only by nonzero constants
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Whitespace is insignificant. Printing via `Display` is canonical and parses
//! back to the same polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::Polynomial;
use super::ring::Ring;
use crate::error::{Error, Result};

pub fn parse_poly(ring: &Ring, src: &str) -> Result<Polynomial> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        ring,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Collects identifiers in order of first appearance; used to infer ring
/// variables for one-shot commands.
pub fn identifiers(src: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_alphabetic() || b[i] == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let id = &src[start..i];
            if !out.iter().any(|s| s == id) {
                out.push(id.to_string());
            }
        } else if b[i].is_ascii_digit() {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    out
}

pub fn parse_rational(src: &str) -> Result<BigRational> {
    let s = src.trim();
    let err = || Error::Parse {
        offset: 0,
        message: format!("not a rational number: {src:?}"),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d == BigInt::from(0) {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while !self.at_end() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(Error::Parse {
                            offset: at,
                            message: "division only by nonzero constants".into(),
                        });
                    }
                    acc = acc.scale(&d.constant_term().inv());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while !self.at_end() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a nonnegative integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while !self.at_end() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = digits.parse().unwrap();
                let q = BigRational::from_integer(n);
                let c = self.ring.field().from_rational(&q)?;
                Ok(Polynomial::constant(self.ring, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while !self.at_end()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.ring.index_of(name) {
                    Some(i) => Ok(Polynomial::var(self.ring, i)),
                    None => Err(Error::Parse {
                        offset: start,
                        message: format!("unknown variable {name:?}"),
                    }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::Field;
    use crate::algebra::MonomialOrder;

    #[test]
    fn errors_are_located() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        assert!(matches!(
            parse_poly(&r, "x + q"),
            Err(Error::Parse { offset: 4, .. })
        ));
        assert!(parse_poly(&r, "x / y").is_err());
        assert!(parse_poly(&r, "(x + 1").is_err());
        assert!(parse_poly(&r, "").is_err());
        assert!(parse_poly(&r, "x^").is_err());
    }

    #[test]
    fn whitespace_and_rationals() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        let a = parse_poly(&r, " 3 / 2 * x^ 2 -y ").unwrap();
        assert_eq!(a.to_string(), "3/2*x^2 - y");
        assert_eq!(parse_poly(&r, "-(x-y)").unwrap().to_string(), "-x + y");
    }

    #[test]
    fn modular_printing() {
        let r = Ring::new(&["x"], Field::Prime(7), MonomialOrder::GrevLex).unwrap();
        assert_eq!(parse_poly(&r, "x - 1").unwrap().to_string(), "x + 6");
        assert_eq!(parse_poly(&r, "x/2").unwrap().to_string(), "4*x");
    }

    #[test]
    fn identifiers_in_order() {
        assert_eq!(identifiers("y^2 + x*y + 3*z1"), vec!["y", "x", "z1"]);
    }
}
