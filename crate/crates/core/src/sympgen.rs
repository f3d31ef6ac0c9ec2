//! Elementary generators of `SL_n` and `Sp_2n` and words in them.
//!
//! Symplectic tokens use the row labels `1..n, -1..-n` described in
//! [`crate::matrix`]. The lower-triangular tokens (`SpShortLower`,
//! `SpLongLower`) are the transposes of their upper counterparts.

use serde::{Deserialize, Serialize};

use crate::matrix::{label_index, Matrix, Side};
use crate::ring::Ring;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub enum GenToken<R> {
    /// `I + r E_ij` in `SL_n`.
    SlTransvection { i: usize, j: usize, r: R },
    /// `I + r (E_{i,-j} + E_{j,-i})`, `i != j`.
    SpShort { i: usize, j: usize, r: R },
    /// `I + r (E_{-j,i} + E_{-i,j})`, `i != j`.
    SpShortLower { i: usize, j: usize, r: R },
    /// `I + r E_{i,-i}`.
    SpLong { i: usize, r: R },
    /// `I + r E_{-i,i}`.
    SpLongLower { i: usize, r: R },
    /// `I + r (E_ij - E_{-j,-i})`, `i != j`.
    SpLevi { i: usize, j: usize, r: R },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Sl,
    Sp,
}

impl<R: Ring> GenToken<R> {
    pub fn param(&self) -> &R {
        match self {
            GenToken::SlTransvection { r, .. }
            | GenToken::SpShort { r, .. }
            | GenToken::SpShortLower { r, .. }
            | GenToken::SpLong { r, .. }
            | GenToken::SpLongLower { r, .. }
            | GenToken::SpLevi { r, .. } => r,
        }
    }

    pub fn with_param(&self, r: R) -> Self {
        match *self {
            GenToken::SlTransvection { i, j, .. } => GenToken::SlTransvection { i, j, r },
            GenToken::SpShort { i, j, .. } => GenToken::SpShort { i, j, r },
            GenToken::SpShortLower { i, j, .. } => GenToken::SpShortLower { i, j, r },
            GenToken::SpLong { i, .. } => GenToken::SpLong { i, r },
            GenToken::SpLongLower { i, .. } => GenToken::SpLongLower { i, r },
            GenToken::SpLevi { i, j, .. } => GenToken::SpLevi { i, j, r },
        }
    }

    /// Inverse token (negated parameter).
    pub fn inverse(&self) -> Self {
        self.with_param(self.param().neg())
    }

    pub fn group(&self) -> Group {
        match self {
            GenToken::SlTransvection { .. } => Group::Sl,
            _ => Group::Sp,
        }
    }

    /// Unipotent subgroup the token belongs to. Levi tokens count as upper
    /// when `i < j`.
    pub fn side(&self) -> Side {
        match *self {
            GenToken::SlTransvection { i, j, .. } | GenToken::SpLevi { i, j, .. } => {
                if i < j {
                    Side::Upper
                } else {
                    Side::Lower
                }
            }
            GenToken::SpShort { .. } | GenToken::SpLong { .. } => Side::Upper,
            GenToken::SpShortLower { .. } | GenToken::SpLongLower { .. } => Side::Lower,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GenToken::SlTransvection { .. } => "sl_transvection",
            GenToken::SpShort { .. } => "sp_short",
            GenToken::SpShortLower { .. } => "sp_short_lower",
            GenToken::SpLong { .. } => "sp_long",
            GenToken::SpLongLower { .. } => "sp_long_lower",
            GenToken::SpLevi { .. } => "sp_levi",
        }
    }

    pub fn indices(&self) -> (usize, Option<usize>) {
        match *self {
            GenToken::SlTransvection { i, j, .. }
            | GenToken::SpShort { i, j, .. }
            | GenToken::SpShortLower { i, j, .. }
            | GenToken::SpLevi { i, j, .. } => (i, Some(j)),
            GenToken::SpLong { i, .. } | GenToken::SpLongLower { i, .. } => (i, None),
        }
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::Index(format!("({i}, {j}) outside 1..={n}")));
    }
    if i == j {
        return Err(Error::Index(format!("generator needs i != j, got {i}")));
    }
    Ok(())
}

fn add_at<R: Ring>(m: &mut Matrix<R>, n: usize, a: i64, b: i64, r: &R) -> Result<()> {
    let (p, q) = (label_index(n, a)?, label_index(n, b)?);
    let slot = m.get_mut(p, q);
    *slot = slot.add(r);
    Ok(())
}

/// Matrix of a token: `n x n` for `SlTransvection`, `2n x 2n` otherwise.
pub fn eval_token<R: Ring>(t: &GenToken<R>, n: usize) -> Result<Matrix<R>> {
    let (i, j) = t.indices();
    let (i, j) = (i as i64, j.map(|j| j as i64));
    if let GenToken::SlTransvection { i, j, r } = t {
        check_pair(n, *i, *j)?;
        return Ok(Matrix::elementary(n, i - 1, j - 1, r.clone()));
    }
    let mut m = Matrix::identity(2 * n);
    let r = t.param();
    match t {
        GenToken::SpShort { .. } | GenToken::SpShortLower { .. } | GenToken::SpLevi { .. } => {
            let j = j.expect("binary token");
            check_pair(n, i as usize, j as usize)?;
            match t {
                GenToken::SpShort { .. } => {
                    add_at(&mut m, n, i, -j, r)?;
                    add_at(&mut m, n, j, -i, r)?;
                }
                GenToken::SpShortLower { .. } => {
                    add_at(&mut m, n, -j, i, r)?;
                    add_at(&mut m, n, -i, j, r)?;
                }
                _ => {
                    add_at(&mut m, n, i, j, r)?;
                    add_at(&mut m, n, -j, -i, &r.neg())?;
                }
            }
        }
        GenToken::SpLong { .. } => add_at(&mut m, n, i, -i, r)?,
        GenToken::SpLongLower { .. } => add_at(&mut m, n, -i, i, r)?,
        GenToken::SlTransvection { .. } => unreachable!(),
    }
    Ok(m)
}

/// A word in elementary generators; `n` is the matrix size for SL words and
/// the half-dimension for symplectic words.
#[derive(Clone, PartialEq, Debug)]
pub struct GenWord<R> {
    pub n: usize,
    pub group: Group,
    pub tokens: Vec<GenToken<R>>,
}

impl<R: Ring> GenWord<R> {
    pub fn new(n: usize, group: Group) -> Self {
        GenWord { n, group, tokens: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        match self.group {
            Group::Sl => self.n,
            Group::Sp => 2 * self.n,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn push(&mut self, t: GenToken<R>) {
        if !t.param().is_zero() {
            self.tokens.push(t);
        }
    }

    pub fn concat(&self, other: &GenWord<R>) -> Result<GenWord<R>> {
        if self.n != other.n || self.group != other.group {
            return Err(Error::Dimension("words over different groups".into()));
        }
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().cloned());
        Ok(GenWord { n: self.n, group: self.group, tokens })
    }

    pub fn inverse(&self) -> GenWord<R> {
        GenWord {
            n: self.n,
            group: self.group,
            tokens: self.tokens.iter().rev().map(GenToken::inverse).collect(),
        }
    }
}

/// Left-to-right product of the token matrices.
pub fn eval_word<R: Ring>(w: &GenWord<R>) -> Result<Matrix<R>> {
    let mut acc = Matrix::identity(w.dim());
    for t in &w.tokens {
        if t.group() != w.group {
            return Err(Error::InvalidArgument(format!(
                "{} token in a {:?} word",
                t.kind_name(),
                w.group
            )));
        }
        acc = acc.mul(&eval_token(t, w.n)?)?;
    }
    Ok(acc)
}

/// The three block types of symplectic matrices.
#[derive(Clone, PartialEq, Debug)]
pub enum SympFactor<R> {
    /// `[[I, B], [0, I]]`, `B` symmetric.
    TypeI(Matrix<R>),
    /// `[[I, 0], [C, I]]`, `C` symmetric.
    TypeII(Matrix<R>),
    /// `diag(A, (A^-1)^T)`.
    TypeIII(Matrix<R>),
}

pub fn make_factor<R: Ring>(f: &SympFactor<R>, n: usize) -> Result<Matrix<R>> {
    let block = match f {
        SympFactor::TypeI(b) | SympFactor::TypeII(b) | SympFactor::TypeIII(b) => b,
    };
    if block.rows() != n || block.cols() != n {
        return Err(Error::Dimension(format!("block must be {n}x{n}")));
    }
    let (i, z) = (Matrix::identity(n), Matrix::zeros(n, n));
    match f {
        SympFactor::TypeI(b) => {
            if !b.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
            Matrix::from_blocks(&i, b, &z, &i)
        }
        SympFactor::TypeII(c) => {
            if !c.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
            Matrix::from_blocks(&i, &z, c, &i)
        }
        SympFactor::TypeIII(a) => {
            let d = a.inverse()?.transpose();
            Ok(Matrix::block_diag(&[a.clone(), d]))
        }
    }
}

/// Word of `sp_long` (diagonal, ascending) and `sp_short` (strict upper
/// triangle, lexicographic) tokens evaluating to `[[I, B], [0, I]]`.
/// At most `n(n+1)/2` tokens.
pub fn expand_type_i_to_elementary<R: Ring>(b: &Matrix<R>) -> Result<GenWord<R>> {
    expand_symmetric(b, Side::Upper)
}

/// Lower analogue of [`expand_type_i_to_elementary`] for `[[I, 0], [C, I]]`.
pub fn expand_type_ii_to_elementary<R: Ring>(c: &Matrix<R>) -> Result<GenWord<R>> {
    expand_symmetric(c, Side::Lower)
}

fn expand_symmetric<R: Ring>(b: &Matrix<R>, side: Side) -> Result<GenWord<R>> {
    if !b.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = b.rows();
    let mut w = GenWord::new(n, crate::sympgen::Group::Sp);
    for i in 1..=n {
        let r = b.get(i - 1, i - 1).clone();
        w.push(match side {
            Side::Upper => GenToken::SpLong { i, r },
            Side::Lower => GenToken::SpLongLower { i, r },
        });
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let r = b.get(i - 1, j - 1).clone();
            w.push(match side {
                Side::Upper => GenToken::SpShort { i, j, r },
                Side::Lower => GenToken::SpShortLower { i, j, r },
            });
        }
    }
    Ok(w)
}

/// Position permutation reversing the labels `-1..-n`; an involution.
fn jtilde_position(n: usize, p: usize) -> usize {
    if p < n {
        p
    } else {
        3 * n - 1 - p
    }
}

/// `P M P^-1` for the permutation `P` reversing the last `n` basis vectors.
/// Maps `J`-symplectic matrices to `J~`-symplectic ones; its own inverse.
pub fn basis_change_to_jtilde<R: Ring>(m: &Matrix<R>, n: usize) -> Result<Matrix<R>> {
    if m.rows() != 2 * n || m.cols() != 2 * n {
        return Err(Error::Dimension(format!("expected {0}x{0}", 2 * n)));
    }
    Ok(Matrix::from_fn(2 * n, 2 * n, |a, b| {
        m.get(jtilde_position(n, a), jtilde_position(n, b)).clone()
    }))
}

/// Inverse of [`basis_change_to_jtilde`].
pub fn basis_change_from_jtilde<R: Ring>(m: &Matrix<R>, n: usize) -> Result<Matrix<R>> {
    basis_change_to_jtilde(m, n)
}

/// Scale the off-diagonal block of a type (i) or (ii) factor by `t`.
pub fn homotopy_scale<R: Ring>(f: &SympFactor<R>, t: &R) -> Result<SympFactor<R>> {
    match f {
        SympFactor::TypeI(b) => Ok(SympFactor::TypeI(b.scale(t))),
        SympFactor::TypeII(c) => Ok(SympFactor::TypeII(c.scale(t))),
        SympFactor::TypeIII(_) => Err(Error::InvalidArgument(
            "homotopy scaling applies to type (i) and (ii) factors only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SymplecticForm;
    use crate::ring::Scalar;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn m(rows: &[&[i64]]) -> Matrix<Scalar> {
        Matrix::from_ints(rows)
    }

    #[test]
    fn long_root_token() {
        let t = eval_token(&GenToken::SpLong { i: 1, r: s(1) }, 2).unwrap();
        let mut expect = Matrix::identity(4);
        expect.set(0, 2, s(1));
        assert_eq!(t, expect);
        assert!(t.is_symplectic(&SymplecticForm::j(2)).unwrap());
    }

    #[test]
    fn zero_transvection_is_identity() {
        let t = eval_token(&GenToken::SlTransvection { i: 1, j: 2, r: s(0) }, 2).unwrap();
        assert!(t.is_identity());
    }

    #[test]
    fn levi_token_entries() {
        let r = Scalar::complex(2, 1, 1, 3);
        let t = eval_token(&GenToken::SpLevi { i: 1, j: 2, r: r.clone() }, 2).unwrap();
        // (1,2) entry r, (-2,-1) entry -r.
        assert_eq!(t.get(0, 1), &r);
        assert_eq!(t.get(3, 2), &-&r);
        assert!(t.is_symplectic(&SymplecticForm::j(2)).unwrap());
    }

    #[test]
    fn token_index_errors() {
        assert!(matches!(eval_token(&GenToken::SpLong { i: 3, r: s(1) }, 2), Err(Error::Index(_))));
        assert!(matches!(
            eval_token(&GenToken::SpShort { i: 1, j: 1, r: s(1) }, 2),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn word_evaluation() {
        let empty = GenWord::<Scalar>::new(2, Group::Sp);
        assert!(eval_word(&empty).unwrap().is_identity());
        let mut w = GenWord::new(2, Group::Sp);
        w.push(GenToken::SpLong { i: 1, r: s(1) });
        w.push(GenToken::SpLong { i: 1, r: s(-1) });
        assert!(eval_word(&w).unwrap().is_identity());
        // L(1) U(1) L(1) = [[1,0],[1,1]] [[1,1],[0,1]] [[1,0],[1,1]] = [[2,1],[3,2]].
        let mut sl = GenWord::new(2, Group::Sl);
        sl.push(GenToken::SlTransvection { i: 2, j: 1, r: s(1) });
        sl.push(GenToken::SlTransvection { i: 1, j: 2, r: s(1) });
        sl.push(GenToken::SlTransvection { i: 2, j: 1, r: s(1) });
        assert_eq!(eval_word(&sl).unwrap(), m(&[&[2, 1], &[3, 2]]));
    }

    #[test]
    fn factors() {
        assert!(make_factor(&SympFactor::TypeI(Matrix::<Scalar>::zeros(2, 2)), 2)
            .unwrap()
            .is_identity());
        let f = make_factor(&SympFactor::TypeIII(m(&[&[1, 1], &[0, 1]])), 2).unwrap();
        let expect = Matrix::block_diag(&[m(&[&[1, 1], &[0, 1]]), m(&[&[1, 0], &[-1, 1]])]);
        assert_eq!(f, expect);
        assert_eq!(
            make_factor(&SympFactor::TypeI(m(&[&[0, 1], &[0, 0]])), 2),
            Err(Error::NotSymmetric)
        );
        assert!(matches!(
            make_factor(&SympFactor::TypeIII(m(&[&[1, 1], &[1, 1]])), 2),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn expansion_examples() {
        let w = expand_type_i_to_elementary(&Matrix::<Scalar>::zeros(3, 3)).unwrap();
        assert!(w.is_empty());

        let b = m(&[&[1, 2], &[2, 0]]);
        let w = expand_type_i_to_elementary(&b).unwrap();
        assert_eq!(
            w.tokens,
            vec![GenToken::SpLong { i: 1, r: s(1) }, GenToken::SpShort { i: 1, j: 2, r: s(2) }]
        );
        assert_eq!(eval_word(&w).unwrap(), make_factor(&SympFactor::TypeI(b), 2).unwrap());

        let dense = m(&[&[1, 2, 3], &[2, 4, 5], &[3, 5, 6]]);
        let w = expand_type_i_to_elementary(&dense).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(eval_word(&w).unwrap(), make_factor(&SympFactor::TypeI(dense.clone()), 3).unwrap());
        let w = expand_type_ii_to_elementary(&dense).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(eval_word(&w).unwrap(), make_factor(&SympFactor::TypeII(dense), 3).unwrap());

        assert_eq!(expand_type_i_to_elementary(&m(&[&[0, 1], &[0, 0]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn jtilde_basis_change() {
        assert!(basis_change_to_jtilde(&Matrix::<Scalar>::identity(4), 2).unwrap().is_identity());
        let a = m(&[&[1, 2, 3], &[0, 1, 4], &[0, 0, 1]]);
        let f = make_factor(&SympFactor::TypeIII(a), 3).unwrap();
        assert!(!f.is_unitriangular(Side::Upper) && !f.is_unitriangular(Side::Lower));
        let g = basis_change_to_jtilde(&f, 3).unwrap();
        assert!(g.is_unitriangular(Side::Upper));
        assert!(g.is_symplectic(&SymplecticForm::j_tilde(3)).unwrap());

        let b = make_factor(&SympFactor::TypeI(m(&[&[1, 2, 3], &[2, 4, 5], &[3, 5, 6]])), 3).unwrap();
        assert!(basis_change_to_jtilde(&b, 3).unwrap().is_unitriangular(Side::Upper));
        assert!(basis_change_to_jtilde(&b, 2).is_err());
    }

    #[test]
    fn homotopy() {
        let b = SympFactor::TypeI(m(&[&[2, 0], &[0, 2]]));
        let z = homotopy_scale(&b, &s(0)).unwrap();
        assert!(make_factor(&z, 2).unwrap().is_identity());
        assert_eq!(homotopy_scale(&b, &s(1)).unwrap(), b);
        assert_eq!(
            homotopy_scale(&b, &Scalar::from_frac(1, 2)).unwrap(),
            SympFactor::TypeI(m(&[&[1, 0], &[0, 1]]))
        );
        assert!(homotopy_scale(&SympFactor::TypeIII(m(&[&[1, 0], &[0, 1]])), &s(0)).is_err());
    }
}
