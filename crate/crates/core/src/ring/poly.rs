use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::{Ring, Scalar};
use crate::{Error, Result};

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// then lexicographic with the first variable most significant).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with Gaussian rational coefficients.
///
/// The variable list travels with the value. Binary operations on
/// polynomials with different variable lists first merge the lists, so
/// constants built by [`Ring::zero`] and [`Ring::one`] (which have no
/// variables) mix freely with everything else.
#[derive(Clone, Debug)]
pub struct Poly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(0), c);
        }
        Poly { vars: Arc::from(Vec::<String>::new()), terms }
    }

    /// The polynomial consisting of the variable `name`, over the variable
    /// list `vars` (which must contain `name`).
    pub fn var(name: &str, vars: &[&str]) -> Self {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .unwrap_or_else(|| panic!("variable {name} not in {vars:?}"));
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Poly::from_terms(vars, [(e, Scalar::one())])
    }

    pub fn from_terms<I>(vars: &[&str], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let vars: Arc<[String]> = vars.iter().map(|s| s.to_string()).collect();
        let mut map: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            let slot = map.entry(Monomial(e)).or_insert_with(Scalar::zero);
            *slot = &*slot + &c;
        }
        map.retain(|_, c| !c.is_zero());
        Poly { vars, terms: map }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Variables that occur with a positive exponent.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&k| self.terms.keys().any(|m| m.0[k] > 0))
            .map(|k| self.vars[k].clone())
            .collect()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in the named variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: &str) -> Option<u32> {
        if self.terms.is_empty() {
            return None;
        }
        match self.vars.iter().position(|v| v == var) {
            Some(k) => self.terms.keys().map(|m| m.0[k]).max(),
            None => Some(0),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<Scalar> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Scalar::zero))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Re-express over `vars`, which must contain every used variable.
    pub fn with_vars(&self, vars: &[String]) -> Result<Poly> {
        if *self.vars == *vars {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v))
            .collect();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (k, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match map[k] {
                    Some(t) => e[t] = x,
                    None => {
                        return Err(Error::InvalidArgument(format!(
                            "variable {} not in {:?}",
                            self.vars[k], vars
                        )))
                    }
                }
            }
            terms.insert(Monomial(e), c.clone());
        }
        Ok(Poly { vars: vars.iter().cloned().collect(), terms })
    }

    fn merged_vars(&self, other: &Poly) -> Arc<[String]> {
        if self.vars == other.vars || other.vars.is_empty() {
            return self.vars.clone();
        }
        if self.vars.is_empty() {
            return other.vars.clone();
        }
        let mut v: Vec<String> = self.vars.to_vec();
        for w in other.vars.iter() {
            if !v.contains(w) {
                v.push(w.clone());
            }
        }
        v.into()
    }

    fn aligned(&self, other: &Poly) -> (Poly, Poly) {
        let vars = self.merged_vars(other);
        let a = self.with_vars(&vars).expect("merged variables cover self");
        let b = other.with_vars(&vars).expect("merged variables cover other");
        (a, b)
    }

    fn combine(&self, other: &Poly, sign_other: bool) -> Poly {
        let (mut a, b) = self.aligned(other);
        for (m, c) in b.terms {
            let c = if sign_other { -&c } else { c };
            match a.terms.get_mut(&m) {
                Some(slot) => {
                    *slot = &*slot + &c;
                    if slot.is_zero() {
                        a.terms.remove(&m);
                    }
                }
                None => {
                    a.terms.insert(m, c);
                }
            }
        }
        a
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly { vars: self.vars.clone(), terms: BTreeMap::new() };
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Scalar) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect(),
        }
    }

    /// Exact quotient; fails with [`Error::NotDivisible`] when `q` does not
    /// divide `self` in the polynomial ring.
    pub fn exact_div(&self, q: &Poly) -> Result<Poly> {
        if q.terms.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let (mut rem, q) = self.aligned(q);
        let vars = rem.vars.clone();
        let (lm, lc) = {
            let (m, c) = q.leading_term().expect("nonzero divisor");
            (m.clone(), c.inverse()?)
        };
        let mut quot = Poly { vars, terms: BTreeMap::new() };
        while let Some((m, c)) = rem.leading_term() {
            let Some(shift) = m.div(&lm) else {
                return Err(Error::NotDivisible {
                    dividend: self.to_string(),
                    divisor: q.to_string(),
                });
            };
            let coef = c * &lc;
            rem = rem.combine(&q.mul_term(&shift, &coef), true);
            quot.terms.insert(shift, coef);
        }
        Ok(quot)
    }

    /// Division with remainder for univariate polynomials in the same
    /// variable: `self = q*quot + rem` with `deg rem < deg q`.
    pub fn euclid_div(&self, q: &Poly) -> Result<(Poly, Poly)> {
        if q.terms.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let mut used = self.used_vars();
        for v in q.used_vars() {
            if !used.contains(&v) {
                used.push(v);
            }
        }
        if used.len() > 1 {
            return Err(Error::NotUnivariate(used));
        }
        let vars: Vec<String> = used;
        let p = self.with_vars(&vars)?;
        let q = q.with_vars(&vars)?;
        let (qm, qc) = q.leading_term().expect("nonzero");
        let (qm, qc_inv) = (qm.clone(), qc.inverse()?);
        let mut rem = p.clone();
        let mut quot = Poly { vars: p.vars.clone(), terms: BTreeMap::new() };
        while let Some((m, c)) = rem.leading_term() {
            let Some(shift) = m.div(&qm) else { break };
            let coef = c * &qc_inv;
            rem = rem.combine(&q.mul_term(&shift, &coef), true);
            quot.terms.insert(shift, coef);
        }
        Ok((quot, rem))
    }

    /// Monic greatest common divisor of two univariate polynomials in the
    /// same variable (zero when both are zero).
    pub fn univariate_gcd(&self, other: &Poly) -> Result<Poly> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.euclid_div(&b)?;
            a = b;
            b = r;
        }
        match a.leading_term() {
            Some((_, c)) => Ok(a.scale(&c.inverse()?)),
            None => Ok(a),
        }
    }

    /// Evaluate at a point given one value per variable of `self.vars()`.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.vars.len() {
            return Err(Error::Dimension(format!(
                "{} values for {} variables",
                point.len(),
                self.vars.len()
            )));
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &Ring::pow(x, e);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Evaluate with named values; unused variables may be omitted.
    pub fn eval_named(&self, values: &[(&str, Scalar)]) -> Result<Scalar> {
        let point = self
            .vars
            .iter()
            .zip(0..)
            .map(|(v, k)| match values.iter().find(|(n, _)| n == v) {
                Some((_, x)) => Ok(x.clone()),
                None if self.terms.keys().all(|m| m.0[k] == 0) => Ok(Scalar::zero()),
                None => Err(Error::InvalidArgument(format!("no value for variable {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        self.eval(&point)
    }

    /// Floating point evaluation, used only for loop sampling.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex64();
            for (x, &e) in point.iter().zip(&m.0) {
                t *= x.powu(e);
            }
            acc += t;
        }
        acc
    }

    /// Substitute polynomials for the variables (one per variable).
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.vars.len());
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = t.mul(&img.pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let (a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl Eq for Poly {}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::constant(Scalar::zero())
    }

    fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.as_constant().is_some_and(|c| c.is_one())
    }

    fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in &a.terms {
            for (n, d) in &b.terms {
                let p = c * d;
                let slot = terms.entry(m.mul(n)).or_insert_with(Scalar::zero);
                *slot = &*slot + &p;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars: a.vars, terms }
    }

    fn neg(&self) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    fn from_scalar(s: Scalar) -> Self {
        Poly::constant(s)
    }

    fn div_exact(&self, other: &Self) -> Option<Self> {
        self.exact_div(other).ok()
    }

    fn is_field() -> bool {
        false
    }

    fn bit_size(&self) -> u64 {
        self.terms.values().map(Ring::bit_size).max().unwrap_or(0)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &[String], m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (v, &e) in vars.iter().zip(&m.0) {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{v}")?;
        } else {
            write!(f, "{v}^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    /// Terms in descending graded-lexicographic order, e.g.
    /// `z^2*w-1/2*z+(1+i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let complex = !c.re().is_zero() && !c.im().is_zero();
            let negative = if c.is_real() { c.re().is_negative() } else { !complex && c.im().is_negative() };
            let mag = if negative { -c } else { c.clone() };
            if negative {
                write!(f, "-")?;
            } else if k > 0 {
                write!(f, "+")?;
            }
            let coef = if complex { format!("({mag})") } else { mag.to_string() };
            if m.is_one() {
                write!(f, "{coef}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{coef}*")?;
                }
                write_monomial(f, &self.vars, m)?;
            }
        }
        Ok(())
    }
}
