//! Real polynomials in up to three variables `x`, `y`, `z`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 6;
const VARS: [char; 3] = ['x', 'y', 'z'];

/// Sum of monomials, keyed by exponent triple.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<[u32; 3], f64>,
}

impl Polynomial {
    pub fn constant(c: f64) -> Self {
        let mut p = Polynomial::default();
        p.add_term([0; 3], c);
        p
    }

    pub fn var(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        let mut p = Polynomial::default();
        p.add_term(e, 1.0);
        p
    }

    fn add_term(&mut self, e: [u32; 3], c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        if poly.degree() > MAX_DEGREE {
            return Err(Error::InvalidMap(format!(
                "polynomial `{src}` has degree {} > {MAX_DEGREE}",
                poly.degree()
            )));
        }
        Ok(poly)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Number of variables actually used (1 + highest axis with a nonzero exponent).
    pub fn arity(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|e| e.iter().rposition(|&k| k > 0))
            .max()
            .map_or(0, |a| a + 1)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for (axis, &k) in e.iter().enumerate() {
                    if k > 0 {
                        v *= x.get(axis).copied().unwrap_or(0.0).powi(k as i32);
                    }
                }
                v
            })
            .sum()
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Polynomial::default();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut d = *e;
                d[axis] -= 1;
                out.add_term(d, c * e[axis] as f64);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Polynomial::default();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, *c);
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Polynomial::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (axis, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", VARS[axis])?,
                    _ => write!(f, "*{}^{k}", VARS[axis])?,
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::InvalidMap(format!(
            "polynomial parse error at column {}: {msg}",
            self.pos + 1
        ))
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

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Polynomial> {
        let mut sign = 1.0;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -1.0;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale(sign);
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.scale(-1.0));
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := power ('*' power)*
    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
            if acc.degree() > 4 * MAX_DEGREE {
                return Err(self.error("degree too large"));
            }
        }
        Ok(acc)
    }

    // power := atom ['^' integer]
    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected integer exponent"))?;
        if k > MAX_DEGREE {
            return Err(self.error("exponent too large"));
        }
        let mut out = Polynomial::constant(1.0);
        for _ in 0..k {
            out = out.mul(&base);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.scale(-1.0))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    let exp_sign = (c == b'-' || c == b'+')
                        && matches!(self.src.get(self.pos.wrapping_sub(1)), Some(b'e' | b'E'));
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let v: f64 = text.parse().map_err(|_| self.error("bad number"))?;
                Ok(Polynomial::constant(v))
            }
            Some(c) => match VARS.iter().position(|&v| v as u8 == c) {
                Some(axis) => {
                    self.pos += 1;
                    Ok(Polynomial::var(axis))
                }
                None => Err(self.error(&format!("unexpected `{}`", c as char))),
            },
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let p = Polynomial::parse("(x^2 - 1)^2 + y^2").unwrap();
        assert_eq!(p.degree(), 4);
        assert_eq!(p.arity(), 2);
        for &(x, y) in &[(0.0, 0.0), (1.0, 0.5), (-1.5, 2.0)] {
            let expected = (x * x - 1.0f64).powi(2) + y * y;
            assert!((p.eval(&[x, y]) - expected).abs() < 1e-12);
        }
        let q = Polynomial::parse("-3*x*y + 2.5e-1 - z").unwrap();
        assert!((q.eval(&[1.0, 2.0, 4.0]) - (-6.0 + 0.25 - 4.0)).abs() < 1e-12);
        assert_eq!(Polynomial::parse("x - x").unwrap(), Polynomial::default());
    }

    #[test]
    fn derivatives() {
        let p = Polynomial::parse("x^3*y + 2*y^2").unwrap();
        let dx = p.derivative(0);
        let dy = p.derivative(1);
        assert_eq!(dx, Polynomial::parse("3*x^2*y").unwrap());
        assert_eq!(dy, Polynomial::parse("x^3 + 4*y").unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "x +", "(x", "w", "x^", "x^7", "x^4*y^3", "2..3"] {
            assert!(Polynomial::parse(bad).is_err(), "{bad}");
        }
    }
}
