//! Reference implementations used as oracles by the integration tests.
//! They work on plain row vectors so they share no code with the library's
//! matrix routines.
#![allow(dead_code)]

use sympfact::{Matrix, Ring, Scalar};

pub type Rows<R> = Vec<Vec<R>>;

pub fn rows<R: Ring>(m: &Matrix<R>) -> Rows<R> {
    m.to_rows()
}

pub fn mul<R: Ring>(a: &Rows<R>, b: &Rows<R>) -> Rows<R> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(R::zero(), |acc, t| acc.add(&a[i][t].mul(&b[t][j]))))
                .collect()
        })
        .collect()
}

pub fn identity<R: Ring>(n: usize) -> Rows<R> {
    (0..n).map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect()).collect()
}

pub fn product<'a, R: Ring>(n: usize, factors: impl IntoIterator<Item = &'a Matrix<R>>) -> Rows<R> {
    factors.into_iter().fold(identity(n), |acc, f| mul(&acc, &rows(f)))
}

pub fn transpose<R: Ring>(a: &Rows<R>) -> Rows<R> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `[[0, I], [-I, 0]]`.
pub fn j_gram(n: usize) -> Rows<Scalar> {
    let mut j = vec![vec![Scalar::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = Scalar::one();
        j[n + i][i] = Scalar::from_int(-1);
    }
    j
}

/// `M^T J M = J`.
pub fn is_symplectic(m: &Rows<Scalar>) -> bool {
    let j = j_gram(m.len() / 2);
    mul(&mul(&transpose(m), &j), m) == j
}

/// `N^T J + J N = 0`.
pub fn in_sp_algebra(n: &Rows<Scalar>) -> bool {
    let j = j_gram(n.len() / 2);
    let a = mul(&transpose(n), &j);
    let b = mul(&j, n);
    a.iter().zip(&b).all(|(x, y)| x.iter().zip(y).all(|(p, q)| p.add(q).is_zero()))
}

pub fn is_unitriangular<R: Ring>(m: &Rows<R>, lower: bool) -> bool {
    m.iter().enumerate().all(|(i, r)| {
        r.iter().enumerate().all(|(j, x)| {
            if i == j {
                x.is_one()
            } else if (j > i) == lower {
                x.is_zero()
            } else {
                true
            }
        })
    })
}

/// Reverse the second half of the basis: position `p >= n` goes to
/// `3n - 1 - p`.
pub fn to_jtilde<R: Ring>(m: &Rows<R>) -> Rows<R> {
    let n = m.len() / 2;
    let p = |k: usize| if k < n { k } else { 3 * n - 1 - k };
    (0..2 * n).map(|i| (0..2 * n).map(|j| m[p(i)][p(j)].clone()).collect()).collect()
}

/// `I + N + N^2/2! + ...` until the power vanishes.
pub fn exp_nilpotent(n: &Rows<Scalar>) -> Rows<Scalar> {
    let d = n.len();
    let mut acc = identity::<Scalar>(d);
    let mut term = identity::<Scalar>(d);
    for k in 1..=d as i64 {
        term = mul(&term, n)
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.mul(&Scalar::from_frac(1, k))).collect())
            .collect();
        acc = acc.iter().zip(&term).map(|(a, t)| a.iter().zip(t).map(|(x, y)| x.add(y)).collect()).collect();
    }
    acc
}
