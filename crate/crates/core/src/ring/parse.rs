//! Text forms for scalars and polynomials.
//!
//! Accepts sums and products of integers, the imaginary unit `i`, declared
//! variables, parentheses, `^` with a nonnegative integer exponent, and `/`
//! by a nonzero constant. Everything [`Scalar`] and [`Poly`] print parses
//! back to the same value.

use num_bigint::BigInt;

use super::{Poly, Ring, Scalar};
use crate::{Error, Result};

pub fn parse_poly(text: &str, vars: &[&str]) -> Result<Poly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vars };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    if vars.is_empty() {
        return Ok(value);
    }
    let owned: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    value.with_vars(&owned)
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let p = parse_poly(text, &[])?;
    p.as_constant().ok_or_else(|| Error::Parse { pos: 0, msg: "expected a constant".into() })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let f = self.factor()?;
            if c == b'*' {
                acc = acc.mul(&f);
            } else {
                let d = f.as_constant().ok_or(Error::Parse {
                    pos: at,
                    msg: "can only divide by a constant".into(),
                })?;
                let inv = d.inverse().map_err(|_| Error::Parse {
                    pos: at,
                    msg: "division by zero".into(),
                })?;
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let e = self.digits()?;
                    let e: u32 = e.parse().map_err(|_| self.err("exponent too large"))?;
                    Ok(base.pow(e))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn digits(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Poly> {
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
                let d = self.digits()?;
                let n: BigInt = d.parse().expect("digits");
                Ok(Poly::constant(Scalar::from(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name == "i" {
                    return Ok(Poly::constant(Scalar::i()));
                }
                if self.vars.contains(&name) {
                    Ok(Poly::var(name, self.vars))
                } else {
                    self.pos = start;
                    Err(self.err(&format!("unknown variable '{name}'")))
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

    #[test]
    fn scalar_forms() {
        assert_eq!(parse_scalar("1/2").unwrap(), Scalar::from_frac(1, 2));
        assert_eq!(parse_scalar("1/2+1/3*i").unwrap(), Scalar::complex(1, 2, 1, 3));
        assert_eq!(parse_scalar("i").unwrap(), Scalar::i());
        assert_eq!(parse_scalar("-3/4*i").unwrap(), Scalar::complex(0, 1, -3, 4));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_poly("z + q", &["z"]),
            Err(Error::Parse { pos: 4, msg: "unknown variable 'q'".into() })
        );
        assert!(matches!(parse_poly("z/w", &["z", "w"]), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_scalar("z"), Err(Error::Parse { .. })));
        assert!(matches!(parse_scalar("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_scalar("(1+2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn polynomial_expressions() {
        let p = parse_poly("(z*w-1)*z + (z*w-2)*z^2", &["z", "w"]).unwrap();
        assert_eq!(p.to_string(), "z^3*w+z^2*w-2*z^2-z");
    }
}
