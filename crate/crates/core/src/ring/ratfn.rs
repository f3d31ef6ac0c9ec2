use std::fmt;

use super::{Poly, Ring, Scalar};

/// Quotient of two polynomials.
///
/// Not reduced to lowest terms; equality is decided by cross
/// multiplication. Constant denominators are folded into the numerator.
#[derive(Clone, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> crate::Result<Self> {
        if den.is_zero() {
            return Err(crate::Error::DivisionByZero);
        }
        Ok(RatFn { num, den }.normalized())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return RatFn { num: Poly::zero(), den: Poly::one() };
        }
        if let Some(c) = self.den.as_constant() {
            if !c.is_one() {
                let inv = c.inverse().expect("nonzero denominator");
                return RatFn { num: self.num.scale(&inv), den: Poly::one() };
            }
        }
        if self.num == self.den {
            return RatFn::one();
        }
        // Univariate fractions are kept in lowest terms with a monic
        // denominator.
        if let Ok(g) = self.num.univariate_gcd(&self.den) {
            let (num, den) = if g.is_constant() {
                (self.num, self.den)
            } else {
                (
                    self.num.exact_div(&g).expect("gcd divides"),
                    self.den.exact_div(&g).expect("gcd divides"),
                )
            };
            let lc = den.leading_term().map(|(_, c)| c.clone()).expect("nonzero");
            let inv = lc.inverse().expect("nonzero");
            return RatFn { num: num.scale(&inv), den: den.scale(&inv) };
        }
        self
    }
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Ring for RatFn {
    fn zero() -> Self {
        RatFn::from_poly(Poly::zero())
    }

    fn one() -> Self {
        RatFn::from_poly(Poly::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFn { num: self.num.add(&o.num), den: self.den.clone() }.normalized();
        }
        RatFn {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .normalized()
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        RatFn { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.normalized()
    }

    fn neg(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    fn from_scalar(s: Scalar) -> Self {
        RatFn::from_poly(Poly::constant(s))
    }

    fn div_exact(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        Some(RatFn { num: self.num.mul(&o.den), den: self.den.mul(&o.num) }.normalized())
    }

    fn is_field() -> bool {
        true
    }

    fn bit_size(&self) -> u64 {
        self.num.bit_size().max(self.den.bit_size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn g(s: &str) -> RatFn {
        RatFn::from_poly(parse_poly(s, &["g"]).unwrap())
    }

    #[test]
    fn cross_multiplicative_equality() {
        let a = RatFn::new(parse_poly("g^2-1", &["g"]).unwrap(), parse_poly("g-1", &["g"]).unwrap())
            .unwrap();
        assert_eq!(a, g("g+1"));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatFn::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn field_operations() {
        let x = g("g");
        let inv = x.unit_inverse().unwrap();
        assert_eq!(x.mul(&inv), RatFn::one());
        assert!(RatFn::zero().unit_inverse().is_none());
        let half = RatFn::from_scalar(Scalar::from_frac(1, 2));
        assert_eq!(half.add(&half), RatFn::one());
    }
}
