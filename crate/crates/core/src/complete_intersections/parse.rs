//! Text format for polynomials.
//!
//! ```text
//! expr  := term (('+' | '-') term)*      (optional leading sign)
//! term  := coeff ('*' monom)* | monom ('*' monom)*
//! monom := 'z' INT ('^' INT)?  |  'z' INT '_' INT ('^' INT)?
//! coeff := INT | INT '/' INT
//! ```
//!
//! `zI` names coordinate `I` of a single projective factor; `zF_I` names
//! coordinate `I` of factor `F`. Whitespace is ignored. System files hold one
//! polynomial per line, with `#` starting a comment.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{factor_offsets, flat_len, MultiHomogeneousPolynomial, PolySystem, Polynomial};
use super::{PolyError, Result};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    factor_dims: &'a [usize],
    offsets: Vec<usize>,
}

fn syntax(position: usize, message: impl Into<String>) -> PolyError {
    PolyError::SyntaxError { position, message: message.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<(usize, BigInt)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(start, "expected an integer"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok((start, digits.parse().expect("digits parse as BigInt")))
    }

    fn small(&mut self, what: &str) -> Result<(usize, u32)> {
        let (p, v) = self.integer()?;
        let v = u32::try_from(v).map_err(|_| syntax(p, format!("{what} too large")))?;
        Ok((p, v))
    }

    fn monom(&mut self, exps: &mut [u32]) -> Result<()> {
        let start = self.pos;
        if !self.eat(b'z') {
            return Err(syntax(start, "expected a variable 'z'"));
        }
        let (p1, a) = self.small("index")?;
        let (factor, index, at) = if self.bytes.get(self.pos) == Some(&b'_') {
            self.pos += 1;
            let (p2, b) = self.small("index")?;
            (a as usize, b as usize, p2)
        } else {
            if self.factor_dims.len() > 1 {
                return Err(syntax(p1, "multi-factor variables are written zF_I"));
            }
            (0, a as usize, p1)
        };
        if factor >= self.factor_dims.len() {
            return Err(syntax(p1, format!("factor {factor} out of range")));
        }
        if index > self.factor_dims[factor] {
            return Err(syntax(at, format!("index {index} out of range for factor {factor}")));
        }
        let mut k = 1;
        if self.eat(b'^') {
            k = self.small("exponent")?.1;
        }
        exps[self.offsets[factor] + index] += k;
        Ok(())
    }

    fn term(&mut self) -> Result<(BigRational, Vec<u32>)> {
        let mut exps = vec![0; flat_len(self.factor_dims)];
        let mut coeff = BigRational::one();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let (_, num) = self.integer()?;
                let mut den = BigInt::one();
                if self.eat(b'/') {
                    let (p, d) = self.integer()?;
                    if d.is_zero() {
                        return Err(syntax(p, "zero denominator"));
                    }
                    den = d;
                }
                coeff = BigRational::new(num, den);
                while self.eat(b'*') {
                    self.monom(&mut exps)?;
                }
            }
            Some(b'z') => {
                self.monom(&mut exps)?;
                while self.eat(b'*') {
                    self.monom(&mut exps)?;
                }
            }
            Some(_) => return Err(syntax(self.pos, "expected a coefficient or a variable")),
            None => return Err(syntax(self.pos, "unexpected end of input")),
        }
        Ok((coeff, exps))
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut poly = Polynomial::zero(flat_len(self.factor_dims));
        let mut sign = if self.eat(b'-') {
            -BigRational::one()
        } else {
            self.eat(b'+');
            BigRational::one()
        };
        loop {
            let (c, e) = self.term()?;
            poly.add_term(e, c * &sign);
            if self.eat(b'+') {
                sign = BigRational::one();
            } else if self.eat(b'-') {
                sign = -BigRational::one();
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return Err(syntax(self.pos, "unexpected character"));
        }
        Ok(poly)
    }
}

/// Parses one polynomial on the product of projective spaces of the given dimensions.
pub fn parse_poly(text: &str, factor_dims: &[usize]) -> Result<MultiHomogeneousPolynomial> {
    if factor_dims.is_empty() {
        return Err(PolyError::InvalidSystem("no projective factors".into()));
    }
    let mut parser = Parser { bytes: text.as_bytes(), pos: 0, factor_dims, offsets: factor_offsets(factor_dims) };
    let poly = parser.expr()?;
    MultiHomogeneousPolynomial::new(factor_dims.to_vec(), poly)
}

/// Parses a system file: one polynomial per non-empty line, `#` comments.
/// Syntax error positions are byte offsets into `text`.
pub fn parse_system(text: &str, factor_dims: &[usize]) -> Result<PolySystem> {
    let mut polys = Vec::new();
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            let p = parse_poly(body, factor_dims).map_err(|e| match e {
                PolyError::SyntaxError { position, message } => {
                    PolyError::SyntaxError { position: position + line_start, message }
                }
                other => other,
            })?;
            polys.push(p);
        }
        line_start += line.len();
    }
    PolySystem::new(polys)
}
