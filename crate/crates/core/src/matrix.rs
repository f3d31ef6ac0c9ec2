//! Dense exact matrices and the symplectic predicates.
//!
//! Rows and columns of a `2n x 2n` symplectic matrix are labelled
//! `1..n, -1..-n`; label `i` lives at array index `i-1` and label `-i` at
//! `n+i-1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ring::{Field, Ring, Scalar};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Lower => Side::Upper,
            Side::Upper => Side::Lower,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn new(rows: usize, cols: usize, entries: Vec<R>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| R::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { R::one() } else { R::zero() })
    }

    /// `I + r*E_ij` (0-based indices).
    pub fn elementary(n: usize, i: usize, j: usize, r: R) -> Self {
        let mut m = Matrix::<R>::identity(n);
        let slot: &mut R = m.get_mut(i, j);
        *slot = slot.add(&r);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut R {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map<S: Ring>(&self, f: impl Fn(&R) -> Result<S>) -> Result<Matrix<S>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let slot: &mut R = out.get_mut(i, j);
                    *slot = slot.add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    /// Product of a nonempty list of square matrices of equal size, or the
    /// identity of size `n` for an empty list.
    pub fn product<'a>(n: usize, factors: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut acc = Matrix::identity(n);
        for f in factors {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, R::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, R::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(R::neg)
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(R::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// Block with rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Copy of `self` with `block` written at offset `(r0, c0)`.
    pub fn with_block(&self, r0: usize, c0: usize, block: &Self) -> Self {
        let mut out = self.clone();
        for i in 0..block.rows {
            for j in 0..block.cols {
                out.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
        out
    }

    /// `[[a, b], [c, d]]` from four blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Dimension("incompatible blocks".into()));
        }
        let z = Matrix::zeros(a.rows + c.rows, a.cols + b.cols);
        Ok(z.with_block(0, 0, a)
            .with_block(0, a.cols, b)
            .with_block(a.rows, 0, c)
            .with_block(a.rows, a.cols, d))
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out = out.with_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `N^dim = 0`.
    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).map(|p| p.is_zero()).unwrap_or(false)
    }

    pub fn max_bit_size(&self) -> u64 {
        self.entries.iter().map(R::bit_size).max().unwrap_or(0)
    }

    pub fn det(&self) -> Result<R> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("det of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        match n {
            0 => Ok(R::one()),
            1 => Ok(self.get(0, 0).clone()),
            2 => Ok(self.get(0, 0).mul(self.get(1, 1)).sub(&self.get(0, 1).mul(self.get(1, 0)))),
            3 => Ok(self.cofactor_det()),
            _ if R::is_field() => Ok(self.elimination_det()),
            _ => Ok(self.bareiss_det()),
        }
    }

    fn cofactor_det(&self) -> R {
        let n = self.rows;
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = R::zero();
        for j in 0..n {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let minor = self.minor(0, j);
            let t = a.mul(&minor.cofactor_det());
            acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        acc
    }

    /// Matrix with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        let mut entries = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for r in (0..self.rows).filter(|&r| r != i) {
            for c in (0..self.cols).filter(|&c| c != j) {
                entries.push(self.get(r, c).clone());
            }
        }
        Matrix { rows: self.rows - 1, cols: self.cols - 1, entries }
    }

    fn pivot_row(&self, k: usize) -> Option<usize> {
        (k..self.rows).find(|&i| !self.get(i, k).is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn elimination_det(&self) -> R {
        let mut m = self.clone();
        let n = m.rows;
        let mut det = R::one();
        for k in 0..n {
            let Some(p) = m.pivot_row(k) else { return R::zero() };
            if p != k {
                m.swap_rows(p, k);
                det = det.neg();
            }
            let pivot = m.get(k, k).clone();
            det = det.mul(&pivot);
            for i in k + 1..n {
                let f = m.get(i, k).div_exact(&pivot).expect("field division");
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Fraction-free elimination; every division is exact in an integral
    /// domain.
    fn bareiss_det(&self) -> R {
        let mut m = self.clone();
        let n = m.rows;
        let mut sign = R::one();
        let mut prev = R::one();
        for k in 0..n - 1 {
            let Some(p) = m.pivot_row(k) else { return R::zero() };
            if p != k {
                m.swap_rows(p, k);
                sign = sign.neg();
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m.get(i, j).mul(&pivot).sub(&m.get(i, k).mul(m.get(k, j)));
                    let v = v.div_exact(&prev).expect("Bareiss division is exact");
                    m.set(i, j, v);
                }
                m.set(i, k, R::zero());
            }
            prev = pivot;
        }
        sign.mul(m.get(n - 1, n - 1))
    }

    /// Exact inverse. Over a field this is Gauss-Jordan elimination; over
    /// other rings the adjugate is divided by the determinant, which must be
    /// a unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        if R::is_field() {
            self.gauss_jordan_inverse()
        } else {
            self.adjugate_inverse()
        }
    }

    fn gauss_jordan_inverse(&self) -> Result<Self> {
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::<R>::identity(n);
        for k in 0..n {
            let Some(p) = a.pivot_row(k) else {
                return Err(Error::Singular { det: self.det()?.to_string() });
            };
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let pivot_inv = a.get(k, k).unit_inverse().expect("nonzero pivot in a field");
            if !pivot_inv.is_one() {
                for j in 0..n {
                    a.set(k, j, a.get(k, j).mul(&pivot_inv));
                    inv.set(k, j, inv.get(k, j).mul(&pivot_inv));
                }
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a.get(i, k).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(i, j).sub(&f.mul(a.get(k, j)));
                    a.set(i, j, v);
                    let w = inv.get(i, j).sub(&f.mul(inv.get(k, j)));
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    fn adjugate_inverse(&self) -> Result<Self> {
        let n = self.rows;
        let det = self.det()?;
        let Some(det_inv) = det.unit_inverse() else {
            return Err(Error::Singular { det: det.to_string() });
        };
        if n == 1 {
            return Ok(Matrix::from_fn(1, 1, |_, _| det_inv.clone()));
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(j, i).det()?;
                let c = if (i + j) % 2 == 0 { c } else { c.neg() };
                out.set(i, j, c.mul(&det_inv));
            }
        }
        Ok(out)
    }

    /// Unit diagonal, zeros strictly below (`Upper`) or above (`Lower`).
    pub fn is_unitriangular(&self, side: Side) -> bool {
        if !self.is_square() {
            return false;
        }
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let x = self.get(i, j);
                match (i.cmp(&j), side) {
                    (std::cmp::Ordering::Equal, _) => x.is_one(),
                    (std::cmp::Ordering::Greater, Side::Upper) => x.is_zero(),
                    (std::cmp::Ordering::Less, Side::Lower) => x.is_zero(),
                    _ => true,
                }
            })
        })
    }

    pub fn is_symplectic(&self, form: &SymplecticForm) -> Result<bool> {
        let g = form.gram::<R>();
        self.check_dim(form)?;
        Ok(self.mul(&g)?.mul(&self.transpose())? == g)
    }

    /// `N^T G + G N = 0` for the Gramian `G` of `form`.
    pub fn is_sp_lie_algebra(&self, form: &SymplecticForm) -> Result<bool> {
        let g = form.gram::<R>();
        self.check_dim(form)?;
        Ok(self.transpose().mul(&g)?.add(&g.mul(self)?)?.is_zero())
    }

    fn check_dim(&self, form: &SymplecticForm) -> Result<()> {
        if self.rows != 2 * form.n || self.cols != 2 * form.n {
            return Err(Error::Dimension(format!(
                "{}x{} matrix against a form of size {}",
                self.rows,
                self.cols,
                2 * form.n
            )));
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..self.cols {
                    let (a, b) = (m.get(p, j).clone(), m.get(r, j).clone());
                    m.set(p, j, b);
                    m.set(r, j, a);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in (0..self.rows).filter(|&i| i != r) {
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (m, pivots) = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![F::zero(); self.cols];
                v[free] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(row, free).neg();
                }
                v
            })
            .collect()
    }
}

impl<R: Ring> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Matrix<Scalar> {
    /// Convenience constructor from small integers.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(),
        )
        .expect("rectangular")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// `[[0, I], [-I, 0]]`.
    J,
    /// `[[0, L], [-L, 0]]` with `L` the skew-diagonal permutation.
    JTilde,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymplecticForm {
    pub n: usize,
    pub kind: FormKind,
}

impl SymplecticForm {
    pub fn j(n: usize) -> Self {
        SymplecticForm { n, kind: FormKind::J }
    }

    pub fn j_tilde(n: usize) -> Self {
        SymplecticForm { n, kind: FormKind::JTilde }
    }

    pub fn gram<R: Ring>(&self) -> Matrix<R> {
        let n = self.n;
        Matrix::from_fn(2 * n, 2 * n, |i, j| {
            let (top, left) = (i < n, j < n);
            let (a, b) = (i % n, j % n);
            let hit = match self.kind {
                FormKind::J => a == b,
                FormKind::JTilde => a + b == n - 1,
            };
            match (top, left, hit) {
                (true, false, true) => R::one(),
                (false, true, true) => R::one().neg(),
                _ => R::zero(),
            }
        })
    }
}

/// Row index of the label `i` (`1..=n`) or `-i`.
pub fn label_index(n: usize, label: i64) -> Result<usize> {
    let a = label.unsigned_abs() as usize;
    if label == 0 || a > n {
        return Err(Error::Index(format!("label {label} outside 1..={n}")));
    }
    Ok(if label > 0 { a - 1 } else { n + a - 1 })
}
