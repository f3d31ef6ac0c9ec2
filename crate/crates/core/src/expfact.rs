//! Exponential factorization.
//!
//! A product of `t` alternating unitriangular factors is regrouped into
//! `floor(t/2) + 1` products of conjugates of same-side factors, each of
//! which is unipotent and so the exponential of its (finite) logarithm:
//!
//! ```text
//! U1 U2 U3       = (U1 U2 U1^-1) (U1 U3)
//! U1 U2 U3 U4 U5 = (U1 U2 U1^-1) (U1 U3 U4 U3^-1 U1^-1) (U1 U3 U5)
//! ```

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::matrix::{Matrix, SymplecticForm};
use crate::ring::{Field, Poly, RatFn, Ring, Scalar};
use crate::sl2fact::UnitriFactorization;
use crate::spfact::unitriangular_factor_sp;
use crate::{Error, Result};

/// `target = exp(exponents[0]) * exp(exponents[1]) * ...`.
#[derive(Clone, PartialEq, Debug)]
pub struct ExpFactorization<R> {
    pub exponents: Vec<Matrix<R>>,
    pub target: Matrix<R>,
}

impl<R: Ring> ExpFactorization<R> {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn product(&self) -> Result<Matrix<R>> {
        let mut acc = Matrix::identity(self.target.rows());
        for n in &self.exponents {
            acc = acc.mul(&nilpotent_exp(n)?)?;
        }
        Ok(acc)
    }

    /// Nilpotency of every exponent and exact product equality.
    pub fn verify(&self) -> Result<()> {
        if let Some(k) = self.exponents.iter().position(|n| !n.is_nilpotent()) {
            return Err(Error::Consistency(format!("exponent {k} is not nilpotent")));
        }
        if self.product()? != self.target {
            return Err(Error::Consistency("product of exponentials differs from target".into()));
        }
        Ok(())
    }

    /// Whether every exponent lies in the Lie algebra of `Sp(form)`.
    pub fn exponents_in_sp(&self, form: &SymplecticForm) -> Result<bool> {
        for n in &self.exponents {
            if !n.is_sp_lie_algebra(form)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same factorization without zero exponents.
    pub fn trimmed(&self) -> Self {
        ExpFactorization {
            exponents: self.exponents.iter().filter(|n| !n.is_zero()).cloned().collect(),
            target: self.target.clone(),
        }
    }
}

fn inverse_integer<R: Ring>(k: i64) -> R {
    R::from_scalar(Scalar::from_frac(1, k))
}

/// `log(I + N) = N - N^2/2 + N^3/3 - ...`, a finite sum.
pub fn nilpotent_log<R: Ring>(u: &Matrix<R>) -> Result<Matrix<R>> {
    if !u.is_square() {
        return Err(Error::Dimension("logarithm of a non-square matrix".into()));
    }
    let dim = u.rows();
    let n = u.sub(&Matrix::identity(dim))?;
    if !n.is_nilpotent() {
        return Err(Error::NotUnipotent);
    }
    let mut acc = Matrix::zeros(dim, dim);
    let mut power = n.clone();
    for k in 1..=dim as i64 {
        if power.is_zero() {
            break;
        }
        let c: R = inverse_integer(k);
        let term = power.scale(&if k % 2 == 1 { c } else { c.neg() });
        acc = acc.add(&term)?;
        power = power.mul(&n)?;
    }
    Ok(acc)
}

/// `exp(N) = I + N + N^2/2! + ...`, a finite sum.
pub fn nilpotent_exp<R: Ring>(n: &Matrix<R>) -> Result<Matrix<R>> {
    if !n.is_square() {
        return Err(Error::Dimension("exponential of a non-square matrix".into()));
    }
    if !n.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let dim = n.rows();
    let mut acc = Matrix::identity(dim);
    let mut power = Matrix::identity(dim);
    let mut fact: i64 = 1;
    for k in 1..=dim as i64 {
        power = power.mul(n)?;
        if power.is_zero() {
            break;
        }
        fact *= k;
        acc = acc.add(&power.scale(&inverse_integer(fact)))?;
    }
    Ok(acc)
}

/// `B N B^-1`, the exponent of `B exp(N) B^-1`.
pub fn conjugate_exponent<F: Field>(b: &Matrix<F>, n: &Matrix<F>) -> Result<Matrix<F>> {
    if !n.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let b_inv = b.inverse()?;
    b.mul(n)?.mul(&b_inv)
}

/// Regroup alternating unitriangular factors into `floor(t/2) + 1`
/// exponentials (one for `t = 1`).
///
/// With `P` the product of the odd-position factors seen so far, every
/// even-position factor `U` contributes `log(P U P^-1)` and the last
/// exponent is `log(P)` (times the last factor when `t` is odd).
pub fn group_exponentials<R: Ring>(fact: &UnitriFactorization<R>) -> Result<ExpFactorization<R>> {
    let t = fact.len();
    if t == 0 {
        return Err(Error::InvalidArgument("empty factorization".into()));
    }
    let mut expect = if fact.starts_lower { crate::Side::Lower } else { crate::Side::Upper };
    for (k, (side, m)) in fact.factors.iter().enumerate() {
        if *side != expect {
            return Err(Error::NotAlternating);
        }
        if !fact.side_ok(*side, m) {
            return Err(Error::InvalidArgument(format!("factor {k} is not {side} unitriangular")));
        }
        expect = expect.flip();
    }
    let dim = fact.target.rows();
    let mut prefix = Matrix::identity(dim);
    let mut exponents = Vec::with_capacity(t / 2 + 1);
    for (k, (_, u)) in fact.factors.iter().enumerate() {
        if k % 2 == 0 {
            if k + 1 == t {
                break;
            }
            prefix = prefix.mul(u)?;
        } else {
            let conj = prefix.mul(u)?.mul(&prefix.inverse()?)?;
            exponents.push(nilpotent_log(&conj)?);
        }
    }
    if t % 2 == 1 {
        prefix = prefix.mul(&fact.factors[t - 1].1)?;
    }
    exponents.push(nilpotent_log(&prefix)?);
    let out = ExpFactorization { exponents, target: fact.product()? };
    if out.target != fact.target {
        return Err(Error::Consistency("factorization does not multiply to its target".into()));
    }
    Ok(out)
}

/// Three exponentials with values in the symplectic Lie algebra whose
/// product is the symplectic matrix `m`.
pub fn exp_factor_sp<F: Field>(m: &Matrix<F>) -> Result<ExpFactorization<F>> {
    let f = unitriangular_factor_sp(m)?;
    let e = group_exponentials(&f)?;
    e.verify()?;
    if !e.exponents_in_sp(&SymplecticForm::j(m.rows() / 2))? {
        return Err(Error::Consistency("exponent outside the symplectic Lie algebra".into()));
    }
    Ok(e)
}

fn rational_nth_root(x: &BigRational, n: u32) -> Option<BigRational> {
    if x.is_negative() {
        if n.is_multiple_of(2) {
            return None;
        }
        return rational_nth_root(&-x, n).map(|r| -r);
    }
    let num = x.numer().nth_root(n);
    let den = x.denom().nth_root(n);
    let r = BigRational::new(num, den);
    (num_traits::pow(r.clone(), n as usize) == *x).then_some(r)
}

/// Last continued-fraction convergent of `x` that is within float noise of
/// `x` or has denominator at most `10^9`.
fn approximate(x: f64) -> Option<BigRational> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let (p2, q2) = (a as i128 * p1 + p0, a as i128 * q1 + q0);
        if q2 > 1_000_000_000 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = y - a;
        if (x - p1 as f64 / q1 as f64).abs() <= 1e-12 * x.abs().max(1.0) || frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    (q1 != 0).then(|| BigRational::new(p1.into(), q1.into()))
}

/// An `n`-th root of `x` in `Q(i)`, if there is one. Exact rational roots
/// are found directly; otherwise the complex roots are located in floating
/// point, rounded to nearby Gaussian rationals and checked exactly.
pub fn nth_root(x: &Scalar, n: u32) -> Option<Scalar> {
    if n == 0 {
        return None;
    }
    if x.is_zero() || n == 1 {
        return Some(x.clone());
    }
    if x.is_real() {
        if let Some(r) = rational_nth_root(x.re(), n) {
            return Some(Scalar::new(r, BigRational::zero()));
        }
    }
    let z = x.to_complex64();
    if !z.re.is_finite() || !z.im.is_finite() {
        return None;
    }
    let principal = z.powf(1.0 / n as f64);
    for k in 0..n {
        let w = principal * num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        let snap = |v: f64| if v.abs() < 1e-12 * w.norm() { Some(BigRational::zero()) } else { approximate(v) };
        let (Some(re), Some(im)) = (snap(w.re), snap(w.im)) else { continue };
        let cand = Scalar::new(re, im);
        if Ring::pow(&cand, n) == *x {
            return Some(cand);
        }
    }
    None
}

/// `(lambda, m / lambda)` with `lambda^n = det m`, so that the second part
/// has determinant one. Without a supplied `lambda` a root is searched
/// for in `Q(i)`.
pub fn gl_to_sl_reduce(m: &Matrix<Scalar>, lambda: Option<&Scalar>) -> Result<(Scalar, Matrix<Scalar>)> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension("expected a nonempty square matrix".into()));
    }
    let n = m.rows() as u32;
    let det = m.det()?;
    if det.is_zero() {
        return Err(Error::Singular { det: det.to_string() });
    }
    let lambda = match lambda {
        Some(l) => {
            if Ring::pow(l, n) != det {
                return Err(Error::InvalidArgument(format!("{l}^{n} is not det = {det}")));
            }
            l.clone()
        }
        None => nth_root(&det, n).ok_or_else(|| {
            Error::NoRoot(format!("det = {det} has no {n}-th root in Q(i); the reduction needs a field extension"))
        })?,
    };
    let inv = lambda.inverse()?;
    let sl = m.scale(&inv);
    debug_assert!(sl.det().map(|d| d.is_one()).unwrap_or(false));
    Ok((lambda, sl))
}

/// Basis of the commutant of `T_n = diag(M I_{n-2}, T)`, `T = [[g, 1], [0, 1]]`,
/// over `Q(i)(g)`.
#[derive(Clone, PartialEq, Debug)]
pub struct Commutant {
    pub n: usize,
    pub m: Scalar,
    pub t_n: Matrix<RatFn>,
    pub basis: Vec<Matrix<RatFn>>,
}

impl Commutant {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// The off-diagonal blocks `L2` (rows `..n-2`, columns `n-2..`) and `L3`
    /// (rows `n-2..`, columns `..n-2`) of a basis element.
    pub fn off_diagonal_blocks(&self, s: &Matrix<RatFn>) -> (Matrix<RatFn>, Matrix<RatFn>) {
        let k = self.n - 2;
        (s.submatrix(0, k, k, self.n), s.submatrix(k, self.n, 0, k))
    }

    /// Whether every basis element has `L2 = 0` and `L3 = 0`.
    pub fn blocks_vanish(&self) -> bool {
        self.basis.iter().all(|s| {
            let (l2, l3) = self.off_diagonal_blocks(s);
            l2.is_zero() && l3.is_zero()
        })
    }
}

pub fn commutant_blocks(n: usize, m: &Scalar) -> Result<Commutant> {
    if n < 3 {
        return Err(Error::InvalidArgument("size must be at least 3".into()));
    }
    if m.is_zero() || m.is_one() {
        return Err(Error::InvalidArgument(format!("M = {m} must not be 0 or 1")));
    }
    let g = RatFn::from_poly(Poly::var("g", &["g"]));
    let mr = RatFn::from_scalar(m.clone());
    let t = Matrix::from_rows(vec![vec![g, RatFn::one()], vec![RatFn::zero(), RatFn::one()]])?;
    let t_n = Matrix::block_diag(&[Matrix::identity(n - 2).scale(&mr), t]);
    // (S T - T S)_{ij} = sum_k S_ik T_kj - T_ik S_kj, linear in the entries
    // S_ab (unknown a*n + b).
    let size = n * n;
    let mut system = Matrix::<RatFn>::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                let a = system.get(row, i * n + k).add(t_n.get(k, j));
                system.set(row, i * n + k, a);
                let b = system.get(row, k * n + j).sub(t_n.get(i, k));
                system.set(row, k * n + j, b);
            }
        }
    }
    let basis = system
        .nullspace()
        .into_iter()
        .map(|v| Matrix::new(n, n, v))
        .collect::<Result<Vec<_>>>()?;
    for s in &basis {
        if s.mul(&t_n)? != t_n.mul(s)? {
            return Err(Error::Consistency("nullspace vector does not commute with T_n".into()));
        }
    }
    Ok(Commutant { n, m: m.clone(), t_n, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Side;
    use crate::sl2fact::{lower, upper, Frame};
    use crate::sympgen::{make_factor, SympFactor};

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    #[test]
    fn log_examples() {
        let u = Matrix::from_ints(&[&[1, 1], &[0, 1]]);
        assert_eq!(nilpotent_log(&u).unwrap(), Matrix::from_ints(&[&[0, 1], &[0, 0]]));
        let u3 = Matrix::from_ints(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let mut expect = Matrix::from_ints(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        expect.set(0, 2, Scalar::from_frac(-1, 2));
        assert_eq!(nilpotent_log(&u3).unwrap(), expect);
        assert_eq!(nilpotent_exp(&expect).unwrap(), u3);
        assert!(nilpotent_log(&Matrix::<Scalar>::identity(3)).unwrap().is_zero());
        assert!(nilpotent_exp(&Matrix::<Scalar>::zeros(2, 2)).unwrap().is_identity());
        assert_eq!(nilpotent_log(&Matrix::from_ints(&[&[2, 0], &[0, 1]])), Err(Error::NotUnipotent));
        assert_eq!(nilpotent_exp(&Matrix::from_ints(&[&[1, 0], &[0, 0]])), Err(Error::NotNilpotent));
    }

    #[test]
    fn conjugation_examples() {
        let e12 = Matrix::from_ints(&[&[0, 1], &[0, 0]]);
        let mut b = Matrix::from_ints(&[&[2, 0], &[0, 1]]);
        b.set(1, 1, Scalar::from_frac(1, 2));
        assert_eq!(conjugate_exponent(&b, &e12).unwrap(), e12.scale(&s(4)));
        assert_eq!(conjugate_exponent(&Matrix::identity(2), &e12).unwrap(), e12);
        assert!(conjugate_exponent(&b, &Matrix::zeros(2, 2)).unwrap().is_zero());
        assert!(conjugate_exponent(&Matrix::from_ints(&[&[1, 1], &[1, 1]]), &e12).is_err());
    }

    fn chain(factors: Vec<(Side, Matrix<Scalar>)>) -> UnitriFactorization<Scalar> {
        let target = Matrix::product(2, factors.iter().map(|(_, m)| m)).unwrap();
        UnitriFactorization { starts_lower: factors[0].0 == Side::Lower, frame: Frame::Standard, factors, target }
    }

    #[test]
    fn three_factor_grouping() {
        let f = chain(vec![(Side::Lower, lower(s(1))), (Side::Upper, upper(s(1))), (Side::Lower, lower(s(1)))]);
        let e = group_exponentials(&f).unwrap();
        assert_eq!(e.exponents, vec![
            Matrix::from_ints(&[&[-1, 1], &[-1, 1]]),
            Matrix::from_ints(&[&[0, 0], &[2, 0]]),
        ]);
        assert_eq!(e.product().unwrap(), Matrix::from_ints(&[&[2, 1], &[3, 2]]));
        let one = chain(vec![(Side::Upper, upper(s(5)))]);
        assert_eq!(group_exponentials(&one).unwrap().exponents, vec![Matrix::from_ints(&[&[0, 5], &[0, 0]])]);
    }

    #[test]
    fn non_alternating_rejected() {
        let mut f = chain(vec![(Side::Lower, lower(s(1))), (Side::Upper, upper(s(1)))]);
        f.factors[1].0 = Side::Lower;
        assert_eq!(group_exponentials(&f), Err(Error::NotAlternating));
    }

    #[test]
    fn symplectic_exponents() {
        let b = Matrix::from_ints(&[&[1, 2], &[2, 3]]);
        let m = make_factor(&SympFactor::TypeI(b), 2).unwrap();
        let e = exp_factor_sp(&m).unwrap();
        assert_eq!(e.len(), 3);
        e.verify().unwrap();
        assert!(e.exponents_in_sp(&SymplecticForm::j(2)).unwrap());
        let id = exp_factor_sp(&Matrix::<Scalar>::identity(4)).unwrap();
        assert_eq!(id.len(), 3);
        assert!(id.exponents.iter().all(Matrix::is_zero));
        assert!(id.trimmed().is_empty());
    }

    #[test]
    fn gl_to_sl_examples() {
        let m = Matrix::from_ints(&[&[2, 0], &[0, 2]]);
        assert_eq!(gl_to_sl_reduce(&m, Some(&s(2))).unwrap(), (s(2), Matrix::identity(2)));
        assert_eq!(gl_to_sl_reduce(&m, None).unwrap().1, Matrix::identity(2));
        let d = Matrix::from_ints(&[&[1, 0], &[0, 4]]);
        let (l, sl) = gl_to_sl_reduce(&d, Some(&s(2))).unwrap();
        assert_eq!(l, s(2));
        assert_eq!(sl.get(0, 0), &Scalar::from_frac(1, 2));
        assert_eq!(sl.get(1, 1), &s(2));
        assert!(matches!(gl_to_sl_reduce(&Matrix::from_ints(&[&[1, 0], &[0, 2]]), None), Err(Error::NoRoot(_))));
        assert!(gl_to_sl_reduce(&d, Some(&s(3))).is_err());
        // det = 2i = (1+i)^2
        let c = Matrix::from_rows(vec![vec![Scalar::i(), s(0)], vec![s(0), s(2)]]).unwrap();
        let (l, sl) = gl_to_sl_reduce(&c, None).unwrap();
        assert_eq!(Ring::pow(&l, 2), Scalar::complex(0, 1, 2, 1));
        assert!(sl.det().unwrap().is_one());
    }

    #[test]
    fn nth_roots() {
        assert_eq!(nth_root(&Scalar::from_frac(8, 27), 3), Some(Scalar::from_frac(2, 3)));
        assert_eq!(nth_root(&s(-8), 3), Some(s(-2)));
        assert_eq!(nth_root(&s(-1), 2).map(|r| Ring::pow(&r, 2)), Some(s(-1)));
        assert_eq!(nth_root(&s(2), 2), None);
    }

    #[test]
    fn commutant_examples() {
        let c = commutant_blocks(3, &s(3)).unwrap();
        assert_eq!(c.dimension(), 3);
        assert!(c.blocks_vanish());
        let c = commutant_blocks(4, &s(2)).unwrap();
        assert_eq!(c.dimension(), 6);
        assert!(c.blocks_vanish());
        assert!(commutant_blocks(3, &s(1)).is_err());
        assert!(commutant_blocks(3, &s(0)).is_err());
    }
}
