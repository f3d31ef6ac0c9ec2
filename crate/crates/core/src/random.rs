//! Random inputs for tests, the self-test suites and the demo.
//!
//! Everything takes an explicit generator so runs are reproducible from a
//! seed.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::matrix::{Matrix, Side};
use crate::ring::{Poly, Ring, Scalar};
use crate::sympgen::{GenToken, GenWord, Group};

fn rational(rng: &mut impl Rng, bound: i64) -> BigRational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound.max(1));
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Gaussian rational whose parts have numerators and denominators bounded
/// by `bound` in absolute value.
pub fn scalar(rng: &mut impl Rng, bound: i64) -> Scalar {
    Scalar::new(rational(rng, bound), rational(rng, bound))
}

/// Gaussian integer `a + b i` with `|a|, |b| <= bound`.
pub fn gaussian_int(rng: &mut impl Rng, bound: i64) -> Scalar {
    Scalar::new(
        BigRational::from_integer(rng.gen_range(-bound..=bound).into()),
        BigRational::from_integer(rng.gen_range(-bound..=bound).into()),
    )
}

pub fn nonzero_gaussian_int(rng: &mut impl Rng, bound: i64) -> Scalar {
    loop {
        let x = gaussian_int(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

/// `[[a, b], [c, d]]` with `a, b, c` drawn by [`scalar`] (`a != 0`) and
/// `d = (1 + bc)/a`.
pub fn sl2(rng: &mut impl Rng, bound: i64) -> Matrix<Scalar> {
    let a = loop {
        let a = scalar(rng, bound);
        if !a.is_zero() {
            break a;
        }
    };
    let b = scalar(rng, bound);
    let c = scalar(rng, bound);
    let d = (&Scalar::one() + &(&b * &c)).checked_div(&a).expect("a is nonzero");
    Matrix::new(2, 2, vec![a, b, c, d]).expect("2x2")
}

/// A symplectic generator with a nonzero Gaussian integer parameter.
pub fn sp_token(rng: &mut impl Rng, n: usize, bound: i64) -> GenToken<Scalar> {
    let r = nonzero_gaussian_int(rng, bound);
    let i = rng.gen_range(1..=n);
    let j = if n > 1 {
        let mut j = rng.gen_range(1..n);
        if j >= i {
            j += 1;
        }
        j
    } else {
        i
    };
    let kinds = if n > 1 { 5 } else { 2 };
    match rng.gen_range(0..kinds) {
        0 => GenToken::SpLong { i, r },
        1 => GenToken::SpLongLower { i, r },
        2 => GenToken::SpShort { i, j, r },
        3 => GenToken::SpShortLower { i, j, r },
        _ => GenToken::SpLevi { i, j, r },
    }
}

pub fn sp_word(rng: &mut impl Rng, n: usize, len: usize, bound: i64) -> GenWord<Scalar> {
    let mut w = GenWord::new(n, Group::Sp);
    for _ in 0..len {
        w.push(sp_token(rng, n, bound));
    }
    w
}

/// Unitriangular matrix of the given side with Gaussian integer entries.
pub fn unitriangular(rng: &mut impl Rng, size: usize, side: Side, bound: i64) -> Matrix<Scalar> {
    Matrix::from_fn(size, size, |i, j| {
        let strict = match side {
            Side::Lower => i > j,
            Side::Upper => i < j,
        };
        if i == j {
            Scalar::one()
        } else if strict {
            gaussian_int(rng, bound)
        } else {
            Scalar::zero()
        }
    })
}

/// Symplectic (for the form `J`) unitriangular matrix in the `J~` frame
/// sense: a product of random generators of one side.
pub fn sp_unitriangular(rng: &mut impl Rng, n: usize, side: Side, bound: i64) -> Matrix<Scalar> {
    let mut w = GenWord::new(n, Group::Sp);
    while w.len() < 2 * n {
        let t = sp_token(rng, n, bound);
        if t.side() == side {
            w.push(t);
        }
    }
    crate::sympgen::eval_word(&w).expect("valid word")
}

/// `t` alternating unitriangular factors starting with `first`.
pub fn unitri_chain(rng: &mut impl Rng, size: usize, t: usize, first: Side, bound: i64) -> Vec<(Side, Matrix<Scalar>)> {
    let mut side = first;
    (0..t)
        .map(|_| {
            let m = unitriangular(rng, size, side, bound);
            let out = (side, m);
            side = side.flip();
            out
        })
        .collect()
}

/// Strictly upper triangular matrix conjugated by a random unimodular
/// integer matrix, so that it is nilpotent but not triangular.
pub fn nilpotent(rng: &mut impl Rng, size: usize, bound: i64) -> Matrix<Scalar> {
    let strict = unitriangular(rng, size, Side::Upper, bound)
        .sub(&Matrix::identity(size))
        .expect("same size");
    let p = unitriangular(rng, size, Side::Lower, 2)
        .mul(&unitriangular(rng, size, Side::Upper, 2))
        .expect("same size");
    let p_inv = p.inverse().expect("unimodular");
    p.mul(&strict).and_then(|m| m.mul(&p_inv)).expect("same size")
}

/// `I + N` for a random [`nilpotent`] `N`.
pub fn unipotent(rng: &mut impl Rng, size: usize, bound: i64) -> Matrix<Scalar> {
    nilpotent(rng, size, bound).add(&Matrix::identity(size)).expect("same size")
}

/// Univariate polynomial in `var` of degree at most `deg` with small
/// Gaussian integer coefficients.
pub fn poly(rng: &mut impl Rng, var: &str, deg: u32, bound: i64) -> Poly {
    Poly::from_terms(&[var], (0..=deg).map(|k| (vec![k], gaussian_int(rng, bound))))
}

/// Word of at most `max_len` elementary `2x2` matrices over `Q(i)[var]`.
pub fn sl2_poly_word(rng: &mut impl Rng, var: &str, max_len: usize, deg: u32, bound: i64) -> Vec<Matrix<Poly>> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|k| {
            let p = poly(rng, var, deg, bound);
            if k % 2 == 0 {
                Matrix::elementary(2, 1, 0, p)
            } else {
                Matrix::elementary(2, 0, 1, p)
            }
        })
        .collect()
}
