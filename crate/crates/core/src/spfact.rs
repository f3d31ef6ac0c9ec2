//! Unitriangular factorization of symplectic matrices over a field.
//!
//! The pipeline is [`symplectic_gauss`] (elimination into elementary
//! symplectic tokens), [`to_fundamental_word`] (rewriting every root element
//! through Weyl conjugations into elements of simple roots and their
//! negatives) and [`tavgen_absorb`], which multiplies the generators one at
//! a time into a running four-factor product `U^- U U^- U` without ever
//! increasing the number of factors.
//!
//! Absorption works in the basis where the Borel subgroup is upper
//! triangular (the `J~` basis for type C). For a generator of a simple root
//! `alpha`, a Levi subsystem `Delta` of rank one less containing `alpha` is
//! chosen; every factor splits as `V = V_Delta V_Sigma`, the `Sigma` parts
//! are conjugated to the right past the `Delta` parts, the generator is
//! absorbed recursively into the `Delta` parts, and the `Sigma` parts are
//! conjugated back. Type `C_n` recurses into `A_{n-1}` (the `GL_n` block)
//! or `C_{n-1}`; type `A` recurses into `A`; rank one is solved directly by
//! the `SL_2` four-factor solver.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{Matrix, Side, SymplecticForm};
use crate::ring::{Field, Ring, Scalar};
use crate::sl2fact::{sl2_4factor_field, Frame, UnitriFactorization};
use crate::sympgen::{
    basis_change_from_jtilde, basis_change_to_jtilde, eval_token, expand_type_i_to_elementary,
    expand_type_ii_to_elementary, GenToken, GenWord, Group,
};
use crate::{Error, Result};

/// A root as its coordinate vector in the basis `e_1..e_n`.
pub type Root = Vec<i32>;

/// Root system of type `C_n` with simple roots `alpha_i = e_i - e_{i+1}`
/// (`i < n`) and `alpha_n = 2 e_n`.
#[derive(Clone, PartialEq, Debug)]
pub struct RootSystemCn {
    pub n: usize,
    pub roots: Vec<Root>,
    pub fundamental: Vec<Root>,
}

fn unit(n: usize, i: usize, c: i32) -> Root {
    let mut v = vec![0; n];
    v[i] = c;
    v
}

fn neg_root(r: &[i32]) -> Root {
    r.iter().map(|c| -c).collect()
}

fn dot(a: &[i32], b: &[i32]) -> i32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `s_alpha(beta) = beta - 2 (beta, alpha)/(alpha, alpha) alpha`.
fn reflect(alpha: &[i32], beta: &[i32]) -> Root {
    let k = 2 * dot(beta, alpha) / dot(alpha, alpha);
    beta.iter().zip(alpha).map(|(b, a)| b - k * a).collect()
}

pub fn build_cn(n: usize) -> Result<RootSystemCn> {
    if n == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let mut roots = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        roots.push(unit(n, i, 2));
        roots.push(unit(n, i, -2));
    }
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(1, 1), (-1, -1), (1, -1), (-1, 1)] {
                let mut v = vec![0; n];
                v[i] = si;
                v[j] = sj;
                roots.push(v);
            }
        }
    }
    let mut fundamental = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let mut v = vec![0; n];
        v[i] = 1;
        v[i + 1] = -1;
        fundamental.push(v);
    }
    fundamental.push(unit(n, n - 1, 2));
    Ok(RootSystemCn { n, roots, fundamental })
}

impl RootSystemCn {
    /// Coefficient `k_i(alpha)` of the simple root `alpha_i` (1-based).
    pub fn coeff(&self, i: usize, root: &[i32]) -> i32 {
        let partial: i32 = root[..i].iter().sum();
        if i == self.n {
            partial / 2
        } else {
            partial
        }
    }

    pub fn coeffs(&self, root: &[i32]) -> Vec<i32> {
        (1..=self.n).map(|i| self.coeff(i, root)).collect()
    }

    pub fn is_root(&self, root: &[i32]) -> bool {
        self.roots.iter().any(|r| r == root)
    }

    pub fn is_positive(&self, root: &[i32]) -> bool {
        self.coeffs(root).iter().all(|&k| k >= 0)
    }

    pub fn height(&self, root: &[i32]) -> i32 {
        self.coeffs(root).iter().sum()
    }

    /// Index (1-based) of `root` among the simple roots, if it is one.
    pub fn simple_index(&self, root: &[i32]) -> Option<usize> {
        self.fundamental.iter().position(|f| f == root).map(|k| k + 1)
    }

    pub fn is_fundamental_or_negative(&self, root: &[i32]) -> bool {
        self.simple_index(root).is_some() || self.simple_index(&neg_root(root)).is_some()
    }

    /// `Delta_r`: roots with `k_r = 0`.
    pub fn delta(&self, r: usize) -> Vec<Root> {
        self.roots.iter().filter(|a| self.coeff(r, a) == 0).cloned().collect()
    }

    /// `Sigma_r`: roots with `k_r > 0`.
    pub fn sigma(&self, r: usize) -> Vec<Root> {
        self.roots.iter().filter(|a| self.coeff(r, a) > 0).cloned().collect()
    }

    /// `Sigma_r^-`: roots with `k_r < 0`.
    pub fn sigma_minus(&self, r: usize) -> Vec<Root> {
        self.roots.iter().filter(|a| self.coeff(r, a) < 0).cloned().collect()
    }
}

/// Elementary token realizing `x_alpha(r)`.
pub fn root_token<R: Ring>(root: &[i32], r: R) -> Result<GenToken<R>> {
    let nz: Vec<(usize, i32)> =
        root.iter().enumerate().filter(|(_, c)| **c != 0).map(|(k, c)| (k + 1, *c)).collect();
    match nz.as_slice() {
        [(i, 2)] => Ok(GenToken::SpLong { i: *i, r }),
        [(i, -2)] => Ok(GenToken::SpLongLower { i: *i, r }),
        [(i, 1), (j, 1)] => Ok(GenToken::SpShort { i: *i, j: *j, r }),
        [(i, -1), (j, -1)] => Ok(GenToken::SpShortLower { i: *i, j: *j, r }),
        [(i, 1), (j, -1)] => Ok(GenToken::SpLevi { i: *i, j: *j, r }),
        [(i, -1), (j, 1)] => Ok(GenToken::SpLevi { i: *j, j: *i, r }),
        _ => Err(Error::InvalidArgument(format!("{root:?} is not a root of type C"))),
    }
}

/// Root of a symplectic token.
pub fn token_root<R: Ring>(t: &GenToken<R>, n: usize) -> Result<Root> {
    let check = |i: usize| {
        if i == 0 || i > n {
            Err(Error::Index(format!("{i} outside 1..={n}")))
        } else {
            Ok(i - 1)
        }
    };
    let mut v = vec![0; n];
    match *t {
        GenToken::SpLong { i, .. } => v[check(i)?] = 2,
        GenToken::SpLongLower { i, .. } => v[check(i)?] = -2,
        GenToken::SpShort { i, j, .. } | GenToken::SpShortLower { i, j, .. } => {
            let c = if matches!(t, GenToken::SpShort { .. }) { 1 } else { -1 };
            let (a, b) = (check(i)?, check(j)?);
            if a == b {
                return Err(Error::Index("short root token needs i != j".into()));
            }
            v[a] = c;
            v[b] = c;
        }
        GenToken::SpLevi { i, j, .. } => {
            let (a, b) = (check(i)?, check(j)?);
            if a == b {
                return Err(Error::Index("levi token needs i != j".into()));
            }
            v[a] = 1;
            v[b] = -1;
        }
        GenToken::SlTransvection { .. } => {
            return Err(Error::InvalidArgument("sl_transvection is not a symplectic root element".into()))
        }
    }
    Ok(v)
}

/// `x_alpha(r)` with its `2n x 2n` matrix in the `J` basis.
#[derive(Clone, PartialEq, Debug)]
pub struct RootElement<R> {
    pub root: Root,
    pub param: R,
    pub realization: Matrix<R>,
}

impl<R: Ring> RootElement<R> {
    pub fn new(root: Root, param: R) -> Result<Self> {
        let n = root.len();
        let realization = eval_token(&root_token(&root, param.clone())?, n)?;
        Ok(RootElement { root, param, realization })
    }

    pub fn token(&self) -> GenToken<R> {
        root_token(&self.root, self.param.clone()).expect("valid root")
    }
}

/// Word in `SL_n` transvections evaluating to `a` (which must have det 1).
pub fn sl_elementary_word<F: Field>(a: &Matrix<F>) -> Result<GenWord<F>> {
    let n = a.rows();
    let det = a.det()?;
    if !det.is_one() {
        return Err(Error::DeterminantNotOne { det: det.to_string() });
    }
    let mut w = a.clone();
    let mut ops: Vec<(usize, usize, F)> = Vec::new();
    let mut row_add = |w: &mut Matrix<F>, dst: usize, src: usize, f: F| {
        if f.is_zero() {
            return;
        }
        for j in 0..n {
            let v = w.get(dst, j).add(&f.mul(w.get(src, j)));
            w.set(dst, j, v);
        }
        ops.push((dst, src, f));
    };
    for k in 0..n.saturating_sub(1) {
        if w.get(k, k).is_zero() {
            let i = (k + 1..n).find(|&i| !w.get(i, k).is_zero()).ok_or_else(|| {
                Error::Consistency("singular matrix in SL elimination".into())
            })?;
            row_add(&mut w, k, i, F::one());
        }
        let p = w.get(k, k).clone();
        if !p.is_one() {
            if w.get(k + 1, k).is_zero() {
                row_add(&mut w, k + 1, k, F::one());
            }
            let f = F::one().sub(&p).div(w.get(k + 1, k))?;
            row_add(&mut w, k, k + 1, f);
        }
        for i in (0..n).filter(|&i| i != k) {
            let f = w.get(i, k).neg();
            row_add(&mut w, i, k, f);
        }
    }
    if n > 0 {
        for i in 0..n - 1 {
            let f = w.get(i, n - 1).neg();
            row_add(&mut w, i, n - 1, f);
        }
    }
    if !w.is_identity() {
        return Err(Error::Consistency("SL elimination did not reach the identity".into()));
    }
    // ops_m ... ops_1 a = I, so a = ops_1^-1 ... ops_m^-1.
    let mut word = GenWord::new(n, Group::Sl);
    for (dst, src, f) in ops {
        word.push(GenToken::SlTransvection { i: dst + 1, j: src + 1, r: f.neg() });
    }
    Ok(word)
}

fn lower_block<F: Field>(x: &Matrix<F>) -> Result<Matrix<F>> {
    let n = x.rows();
    Matrix::from_blocks(&Matrix::identity(n), &Matrix::zeros(n, n), x, &Matrix::identity(n))
}

/// Symmetric `X` with `A + B X` invertible; candidates are tried in a fixed
/// order (zero, 0/1 diagonals, then seeded random integer matrices).
fn regularizing_shift<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<Matrix<F>> {
    let n = a.rows();
    let works = |x: &Matrix<F>| -> Result<bool> { Ok(!a.add(&b.mul(x)?)?.det()?.is_zero()) };
    let zero = Matrix::zeros(n, n);
    if works(&zero)? {
        return Ok(zero);
    }
    if n <= 12 {
        for mask in 1u32..(1 << n) {
            let x = Matrix::from_fn(n, n, |i, j| {
                if i == j && mask & (1 << i) != 0 {
                    F::one()
                } else {
                    F::zero()
                }
            });
            if works(&x)? {
                return Ok(x);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..256 {
        let mut x = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = F::from_scalar(Scalar::from_int(rng.gen_range(-3..=3)));
                x.set(i, j, v.clone());
                x.set(j, i, v);
            }
        }
        if works(&x)? {
            return Ok(x);
        }
    }
    Err(Error::Consistency("no regularizing symmetric shift found".into()))
}

/// Word in elementary symplectic tokens for `diag(A, A^-T)`.
fn levi_word<F: Field>(a: &Matrix<F>) -> Result<GenWord<F>> {
    let n = a.rows();
    let lambda = a.det()?;
    let lambda_inv = lambda.inv()?;
    // a = a_sl * diag(1, .., 1, lambda)
    let mut a_sl = a.clone();
    for i in 0..n {
        a_sl.set(i, n - 1, a.get(i, n - 1).mul(&lambda_inv));
    }
    let mut word = GenWord::new(n, Group::Sp);
    for t in sl_elementary_word(&a_sl)?.tokens {
        if let GenToken::SlTransvection { i, j, r } = t {
            word.push(GenToken::SpLevi { i, j, r });
        }
    }
    if !lambda.is_one() {
        let torus = Matrix::from_rows(vec![
            vec![lambda.clone(), F::zero()],
            vec![F::zero(), lambda_inv],
        ])?;
        let g = sl2_4factor_field(&torus, None)?.params();
        word.push(GenToken::SpLongLower { i: n, r: g[0].clone() });
        word.push(GenToken::SpLong { i: n, r: g[1].clone() });
        word.push(GenToken::SpLongLower { i: n, r: g[2].clone() });
        word.push(GenToken::SpLong { i: n, r: g[3].clone() });
    }
    Ok(word)
}

/// Elementary symplectic word evaluating to the `J`-symplectic matrix `m`.
///
/// `m L(X) = L(C A^-1) diag(A, A^-T) U(A^-1 B)` for the blocks of
/// `m L(X)`, where `X` is a symmetric shift making the upper left block
/// invertible; the type (i)/(ii) parts expand into long/short root tokens
/// and the Levi part into `sp_levi` tokens plus a torus correction.
pub fn symplectic_gauss<F: Field>(m: &Matrix<F>) -> Result<GenWord<F>> {
    if m.rows() != m.cols() || !m.rows().is_multiple_of(2) || m.rows() == 0 {
        return Err(Error::Dimension(format!("expected 2n x 2n, got {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows() / 2;
    if !m.is_symplectic(&SymplecticForm::j(n))? {
        return Err(Error::NotSymplectic);
    }
    let a = m.submatrix(0, n, 0, n);
    let b = m.submatrix(0, n, n, 2 * n);
    let x = regularizing_shift(&a, &b)?;
    let m0 = m.mul(&lower_block(&x)?)?;
    let a0 = m0.submatrix(0, n, 0, n);
    let b0 = m0.submatrix(0, n, n, 2 * n);
    let c0 = m0.submatrix(n, 2 * n, 0, n);
    let a0_inv = a0.inverse()?;
    let sym = |r: Result<GenWord<F>>| {
        r.map_err(|e| match e {
            Error::NotSymmetric => Error::Consistency("block of a symplectic matrix not symmetric".into()),
            e => e,
        })
    };
    let word = sym(expand_type_ii_to_elementary(&c0.mul(&a0_inv)?))?
        .concat(&levi_word(&a0)?)?
        .concat(&sym(expand_type_i_to_elementary(&a0_inv.mul(&b0)?))?)?
        .concat(&sym(expand_type_ii_to_elementary(&x.neg()))?)?;
    Ok(word)
}

/// How a fundamental-root element's parameter depends on the original one.
#[derive(Clone, Copy, PartialEq, Debug)]
enum ParamSpec {
    Const(i32),
    Scaled(i32),
}

fn scalar_param<F: Field>(spec: ParamSpec, r: &F) -> F {
    match spec {
        ParamSpec::Const(c) => F::from_scalar(Scalar::from_int(c as i64)),
        ParamSpec::Scaled(1) => r.clone(),
        ParamSpec::Scaled(s) => r.mul(&F::from_scalar(Scalar::from_int(s as i64))),
    }
}

/// Fundamental-root pattern for `x_beta(r)`.
fn fundamental_pattern(beta: &[i32], rs: &RootSystemCn) -> Result<Vec<(Root, ParamSpec)>> {
    if rs.is_fundamental_or_negative(beta) {
        return Ok(vec![(beta.to_vec(), ParamSpec::Scaled(1))]);
    }
    let positive = rs.is_positive(beta);
    let alpha = rs
        .fundamental
        .iter()
        .find(|a| {
            let d = dot(beta, a);
            if positive {
                d > 0
            } else {
                d < 0
            }
        })
        .ok_or_else(|| Error::Consistency(format!("no reducing reflection for {beta:?}")))?
        .clone();
    let gamma = reflect(&alpha, beta);
    let neg_alpha = neg_root(&alpha);
    // n_alpha = x_a(1) x_-a(-1) x_a(1); compare n x_gamma(1) n^-1 with x_beta(+-1).
    let one = Scalar::one();
    let n_alpha = [
        RootElement::new(alpha.clone(), one.clone())?,
        RootElement::new(neg_alpha.clone(), one.neg())?,
        RootElement::new(alpha.clone(), one.clone())?,
    ];
    let n_mat = Matrix::product(2 * rs.n, n_alpha.iter().map(|e| &e.realization))?;
    let conj = n_mat
        .mul(&RootElement::new(gamma.clone(), one.clone())?.realization)?
        .mul(&n_mat.inverse()?)?;
    let sign = if conj == RootElement::new(beta.to_vec(), one.clone())?.realization {
        1
    } else if conj == RootElement::new(beta.to_vec(), one.neg())?.realization {
        -1
    } else {
        return Err(Error::Consistency(format!(
            "Weyl conjugate of x_{gamma:?} is not x_{beta:?}(+-1)"
        )));
    };
    let mut out = vec![
        (alpha.clone(), ParamSpec::Const(1)),
        (neg_alpha.clone(), ParamSpec::Const(-1)),
        (alpha.clone(), ParamSpec::Const(1)),
    ];
    for (root, spec) in fundamental_pattern(&gamma, rs)? {
        let spec = match spec {
            ParamSpec::Scaled(s) => ParamSpec::Scaled(s * sign),
            c => c,
        };
        out.push((root, spec));
    }
    out.extend([
        (alpha.clone(), ParamSpec::Const(-1)),
        (neg_alpha, ParamSpec::Const(1)),
        (alpha, ParamSpec::Const(-1)),
    ]);
    Ok(out)
}

/// Rewrite a symplectic word into root elements of `+-Pi` only.
pub fn to_fundamental_word<F: Field>(w: &GenWord<F>, rs: &RootSystemCn) -> Result<Vec<RootElement<F>>> {
    if w.group != Group::Sp || w.n != rs.n {
        return Err(Error::InvalidArgument("word and root system disagree".into()));
    }
    let mut cache: Vec<(Root, Vec<(Root, ParamSpec)>)> = Vec::new();
    let mut out = Vec::new();
    for t in &w.tokens {
        let beta = token_root(t, rs.n)?;
        let pattern = match cache.iter().find(|(b, _)| *b == beta) {
            Some((_, p)) => p.clone(),
            None => {
                let p = fundamental_pattern(&beta, rs)?;
                cache.push((beta.clone(), p.clone()));
                p
            }
        };
        for (root, spec) in pattern {
            let param = scalar_param(spec, t.param());
            if !param.is_zero() {
                out.push(RootElement::new(root, param)?);
            }
        }
    }
    Ok(out)
}

/// Chevalley type of a group in the absorption recursion.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    /// `SL_m`, rank `m - 1`, acting on `m x m` matrices.
    A(usize),
    /// `Sp_2n` in the `J~` basis.
    C(usize),
}

/// Which end of the Dynkin diagram is removed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum End {
    First,
    Last,
}

impl Kind {
    fn rank(self) -> usize {
        match self {
            Kind::A(m) => m - 1,
            Kind::C(n) => n,
        }
    }

    fn dim(self) -> usize {
        match self {
            Kind::A(m) => m,
            Kind::C(n) => 2 * n,
        }
    }

    /// Whether `root` lies in the Levi subsystem obtained by removing `end`.
    fn contains(self, end: End, root: &[i32]) -> bool {
        if self.rank() < 2 {
            return false;
        }
        match (self, end) {
            (Kind::C(_), End::Last) => root.iter().sum::<i32>() == 0,
            (_, End::First) => root[0] == 0,
            (Kind::A(m), End::Last) => root[m - 1] == 0,
        }
    }

    /// Admissible ends for `root`, `Delta_l` first: for simple roots this
    /// is `Delta_l` unless the root is `+-alpha_l`.
    fn ends(self, root: &[i32]) -> Vec<End> {
        [End::Last, End::First].into_iter().filter(|&e| self.contains(e, root)).collect()
    }

    fn sub_kind(self, end: End) -> Kind {
        match (self, end) {
            (Kind::C(n), End::Last) => Kind::A(n),
            (Kind::C(n), End::First) => Kind::C(n - 1),
            (Kind::A(m), _) => Kind::A(m - 1),
        }
    }

    /// Diagonal blocks of the parabolic subgroup for `end`.
    fn blocks(self, end: End) -> Vec<(usize, usize)> {
        match (self, end) {
            (Kind::C(n), End::Last) => vec![(0, n), (n, 2 * n)],
            (Kind::C(n), End::First) => vec![(0, 1), (1, 2 * n - 1), (2 * n - 1, 2 * n)],
            (Kind::A(m), End::First) => vec![(0, 1), (1, m)],
            (Kind::A(m), End::Last) => vec![(0, m - 1), (m - 1, m)],
        }
    }

    fn restrict<F: Field>(self, end: End, m: &Matrix<F>) -> Matrix<F> {
        let d = self.dim();
        match (self, end) {
            (Kind::C(n), End::Last) => m.submatrix(0, n, 0, n),
            (Kind::C(_), End::First) => m.submatrix(1, d - 1, 1, d - 1),
            (Kind::A(_), End::First) => m.submatrix(1, d, 1, d),
            (Kind::A(_), End::Last) => m.submatrix(0, d - 1, 0, d - 1),
        }
    }

    fn embed<F: Field>(self, end: End, sub: &Matrix<F>) -> Result<Matrix<F>> {
        let one = Matrix::identity(1);
        Ok(match (self, end) {
            (Kind::C(n), End::Last) => {
                let inv_t = sub.inverse()?.transpose();
                let flipped = Matrix::from_fn(n, n, |i, j| inv_t.get(n - 1 - i, n - 1 - j).clone());
                Matrix::block_diag(&[sub.clone(), flipped])
            }
            (Kind::C(_), End::First) => Matrix::block_diag(&[one.clone(), sub.clone(), one]),
            (Kind::A(_), End::First) => Matrix::block_diag(&[one, sub.clone()]),
            (Kind::A(_), End::Last) => Matrix::block_diag(&[sub.clone(), one]),
        })
    }

    /// `V = V_Delta V_Sigma`, checking that `V_Sigma` has identity diagonal
    /// blocks.
    fn levi_split<F: Field>(self, end: End, v: &Matrix<F>) -> Result<(Matrix<F>, Matrix<F>)> {
        let d = self.embed(end, &self.restrict(end, v))?;
        let s = d.inverse()?.mul(v)?;
        for (a, b) in self.blocks(end) {
            if !s.submatrix(a, b, a, b).is_identity() {
                return Err(Error::Consistency(format!(
                    "Sigma part of the Levi split has a non-identity diagonal block {a}..{b}"
                )));
            }
        }
        Ok((d, s))
    }

    /// Root elements (in the Borel-upper basis) whose product is `g`, each
    /// lying in at least one Levi subsystem.
    fn root_word<F: Field>(self, g: &Matrix<F>) -> Result<Vec<(Root, Matrix<F>)>> {
        let mut out = Vec::new();
        match self {
            Kind::C(n) => {
                let rs = build_cn(n)?;
                let word = symplectic_gauss(&basis_change_from_jtilde(g, n)?)?;
                for t in &word.tokens {
                    let beta = token_root(t, n)?;
                    let pieces = if self.ends(&beta).is_empty() {
                        fundamental_pattern(&beta, &rs)?
                            .into_iter()
                            .map(|(root, spec)| (root, scalar_param(spec, t.param())))
                            .collect()
                    } else {
                        vec![(beta, t.param().clone())]
                    };
                    for (root, r) in pieces {
                        if !r.is_zero() {
                            let m = basis_change_to_jtilde(&RootElement::new(root.clone(), r)?.realization, n)?;
                            out.push((root, m));
                        }
                    }
                }
            }
            Kind::A(m) => {
                let sl_root = |i: usize, j: usize| {
                    let mut v = vec![0; m];
                    v[i] = 1;
                    v[j] = -1;
                    v
                };
                let mut push = |i: usize, j: usize, r: F| {
                    out.push((sl_root(i, j), Matrix::elementary(m, i, j, r)));
                };
                for t in sl_elementary_word(g)?.tokens {
                    let GenToken::SlTransvection { i, j, r } = t else {
                        return Err(Error::Consistency("non-SL token in SL elimination".into()));
                    };
                    let (i, j) = (i - 1, j - 1);
                    // The corner roots +-(e_1 - e_m) lie in no Levi subsystem;
                    // write them as commutators through index 1.
                    if (i, j) == (0, m - 1) {
                        push(0, 1, r.clone());
                        push(1, m - 1, F::one());
                        push(0, 1, r.neg());
                        push(1, m - 1, F::one().neg());
                    } else if (i, j) == (m - 1, 0) {
                        push(m - 1, 1, F::one());
                        push(1, 0, r.clone());
                        push(m - 1, 1, F::one().neg());
                        push(1, 0, r.neg());
                    } else {
                        push(i, j, r);
                    }
                }
            }
        }
        Ok(out)
    }
}

const SIDES: [Side; 4] = [Side::Lower, Side::Upper, Side::Lower, Side::Upper];

fn identity_state<F: Field>(dim: usize) -> [Matrix<F>; 4] {
    let i = Matrix::identity(dim);
    [i.clone(), i.clone(), i.clone(), i]
}

/// Four-factor factorization of `g` in `E(kind)`, determined by `g` alone:
/// the rank one case is solved directly, higher ranks eliminate `g` into
/// root elements and absorb them into the identity state.
fn refactor<F: Field>(kind: Kind, g: &Matrix<F>) -> Result<[Matrix<F>; 4]> {
    if kind.rank() == 1 {
        let f = sl2_4factor_field(g, None)?;
        let [a, b, c, d]: [(Side, Matrix<F>); 4] =
            f.factors.try_into().map_err(|_| Error::Consistency("expected four factors".into()))?;
        return Ok([a.1, b.1, c.1, d.1]);
    }
    let mut state = identity_state(kind.dim());
    let elems = kind.root_word(g)?;
    for (range, end) in runs(kind, &elems)? {
        let x = Matrix::product(kind.dim(), elems[range].iter().map(|(_, m)| m))?;
        absorb(kind, &mut state, end, &x)?;
    }
    Ok(state)
}

/// Split a word into maximal runs, taken right to left, that are either
/// entirely lower unitriangular or lie in one common Levi subsystem.
fn runs<F: Field>(kind: Kind, elems: &[(Root, Matrix<F>)]) -> Result<Vec<(std::ops::Range<usize>, Option<End>)>> {
    let mut out = Vec::new();
    let mut k = elems.len();
    while k > 0 {
        let mut s = k - 1;
        let (root, m) = &elems[s];
        if m.is_unitriangular(Side::Lower) {
            while s > 0 && elems[s - 1].1.is_unitriangular(Side::Lower) {
                s -= 1;
            }
            out.push((s..k, None));
        } else {
            let mut ends = kind.ends(root);
            if ends.is_empty() && kind.rank() >= 2 {
                return Err(Error::Consistency(format!("{root:?} lies in no Levi subsystem")));
            }
            while s > 0 {
                let next: Vec<End> =
                    ends.iter().copied().filter(|&e| kind.contains(e, &elems[s - 1].0)).collect();
                if next.is_empty() {
                    break;
                }
                ends = next;
                s -= 1;
            }
            out.push((s..k, ends.first().copied()));
        }
        k = s;
    }
    Ok(out)
}

/// Replace `state` (a product `V1 V2 V3 V4` of factors in `U^-, U, U^-, U`)
/// by a factorization of the same shape of `x * V1 V2 V3 V4`, where `x`
/// lies in the Levi subgroup for `end`.
fn absorb<F: Field>(kind: Kind, state: &mut [Matrix<F>; 4], end: Option<End>, x: &Matrix<F>) -> Result<()> {
    if x.is_unitriangular(Side::Lower) {
        state[0] = x.mul(&state[0])?;
        return Ok(());
    }
    if x.is_unitriangular(Side::Upper) && state[0].is_identity() {
        state[1] = x.mul(&state[1])?;
        return Ok(());
    }
    let end = match end {
        Some(end) if kind.rank() >= 2 => end,
        _ => {
            let p = x.mul(&Matrix::product(kind.dim(), state.iter())?)?;
            *state = refactor(kind, &p)?;
            return Ok(());
        }
    };
    let dim = kind.dim();
    let x_sub = kind.restrict(end, x);
    if kind.embed(end, &x_sub)? != *x {
        return Err(Error::Consistency("absorbed element is not in the Levi subgroup".into()));
    }
    let mut deltas = Vec::with_capacity(4);
    let mut sigmas = Vec::with_capacity(4);
    for v in state.iter() {
        let (d, s) = kind.levi_split(end, v)?;
        deltas.push(d);
        sigmas.push(s);
    }
    // V1 V2 V3 V4 = (D1 D2 D3 D4) S'1 S'2 S'3 S'4 with S'k = T^-1 Sk T,
    // T = D_{k+1} ... D4.
    let mut tail = Matrix::identity(dim);
    let mut moved = vec![Matrix::identity(dim); 4];
    for k in (0..4).rev() {
        moved[k] = tail.inverse()?.mul(&sigmas[k])?.mul(&tail)?;
        tail = deltas[k].mul(&tail)?;
    }
    let mut collected = x_sub;
    for d in &deltas {
        collected = collected.mul(&kind.restrict(end, d))?;
    }
    let sub_state = refactor(kind.sub_kind(end), &collected)?;
    // New Vk = D'k (Q S'k Q^-1), Q = D'_{k+1} ... D'4.
    let mut q = Matrix::identity(dim);
    for k in (0..4).rev() {
        let d_new = kind.embed(end, &sub_state[k])?;
        let s_new = q.mul(&moved[k])?.mul(&q.inverse()?)?;
        state[k] = d_new.mul(&s_new)?;
        q = d_new.mul(&q)?;
    }
    Ok(())
}

/// Coefficient growth observed during absorption.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct AbsorbStats {
    /// Number of absorption steps (runs of generators sharing a Levi
    /// subsystem are absorbed together).
    pub steps: usize,
    /// Largest integer bit length in the four factors after each step.
    pub max_bits: Vec<u64>,
}

/// The running state of the absorption: four factors in `U^-, U, U^-, U`
/// (in the `J~` basis) and the product they must equal.
#[derive(Clone, PartialEq, Debug)]
pub struct AbsorptionState<F> {
    pub n: usize,
    pub factors: [Matrix<F>; 4],
    pub target: Matrix<F>,
}

impl<F: Field> AbsorptionState<F> {
    pub fn identity(n: usize) -> Self {
        AbsorptionState { n, factors: identity_state(2 * n), target: Matrix::identity(2 * n) }
    }

    /// Left-multiply one fundamental root element into the state.
    pub fn absorb(&mut self, x: &RootElement<F>) -> Result<()> {
        if x.root.len() != self.n {
            return Err(Error::Dimension("root element of the wrong rank".into()));
        }
        let kind = Kind::C(self.n);
        let xm = basis_change_to_jtilde(&x.realization, self.n)?;
        self.absorb_matrix(kind.ends(&x.root).first().copied(), &xm)
    }

    fn absorb_matrix(&mut self, end: Option<End>, xm: &Matrix<F>) -> Result<()> {
        absorb(Kind::C(self.n), &mut self.factors, end, xm)?;
        self.target = xm.mul(&self.target)?;
        self.check()
    }

    /// Side and product invariants.
    pub fn check(&self) -> Result<()> {
        for (k, (m, side)) in self.factors.iter().zip(SIDES).enumerate() {
            if !m.is_unitriangular(side) {
                return Err(Error::Consistency(format!("absorption factor {k} left U^{side}")));
            }
        }
        if Matrix::product(2 * self.n, self.factors.iter())? != self.target {
            return Err(Error::Consistency("absorption product drifted from the word".into()));
        }
        Ok(())
    }
}

/// Four-factor `L U L U` factorization (in the `J` basis) of the product of
/// `fundword`, absorbing its elements right to left.
pub fn tavgen_absorb<F: Field>(
    fundword: &[RootElement<F>],
    rs: &RootSystemCn,
) -> Result<(UnitriFactorization<F>, AbsorbStats)> {
    let n = rs.n;
    let kind = Kind::C(n);
    let mut elems = Vec::with_capacity(fundword.len());
    for x in fundword {
        if x.root.len() != n {
            return Err(Error::Dimension("root element of the wrong rank".into()));
        }
        if !rs.is_fundamental_or_negative(&x.root) {
            return Err(Error::InvalidArgument(format!("{:?} is not in +-Pi", x.root)));
        }
        elems.push((x.root.clone(), basis_change_to_jtilde(&x.realization, n)?));
    }
    let mut state = AbsorptionState::identity(n);
    let mut stats = AbsorbStats::default();
    for (range, end) in runs(kind, &elems)? {
        let x = Matrix::product(2 * n, elems[range].iter().map(|(_, m)| m))?;
        state.absorb_matrix(end, &x)?;
        stats.steps += 1;
        stats.max_bits.push(state.factors.iter().map(Matrix::max_bit_size).max().unwrap_or(0));
    }
    let factors = state
        .factors
        .iter()
        .zip(SIDES)
        .map(|(m, side)| Ok((side, basis_change_from_jtilde(m, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let f = UnitriFactorization {
        starts_lower: true,
        frame: Frame::Jtilde,
        factors,
        target: basis_change_from_jtilde(&state.target, n)?,
    };
    Ok((f, stats))
}

/// Levi split of a `J`-symplectic unitriangular matrix for `r` in `{1, n}`.
pub fn levi_split<F: Field>(v: &Matrix<F>, r: usize, rs: &RootSystemCn) -> Result<(Matrix<F>, Matrix<F>)> {
    let n = rs.n;
    if n < 2 || (r != 1 && r != n) {
        return Err(Error::InvalidArgument(format!("Levi split needs n >= 2 and r in {{1, {n}}}")));
    }
    let vt = basis_change_to_jtilde(v, n)?;
    if !vt.is_unitriangular(Side::Upper) && !vt.is_unitriangular(Side::Lower) {
        return Err(Error::InvalidArgument("matrix is not in U or U^-".into()));
    }
    let end = if r == 1 { End::First } else { End::Last };
    let (d, s) = Kind::C(n).levi_split(end, &vt)?;
    Ok((basis_change_from_jtilde(&d, n)?, basis_change_from_jtilde(&s, n)?))
}

/// Four alternating unitriangular symplectic factors of a symplectic matrix
/// over a field.
pub fn unitriangular_factor_sp<F: Field>(m: &Matrix<F>) -> Result<UnitriFactorization<F>> {
    let word = symplectic_gauss(m)?;
    let rs = build_cn(word.n)?;
    let fund = to_fundamental_word(&word, &rs)?;
    let (f, _) = tavgen_absorb(&fund, &rs)?;
    if f.target != *m {
        return Err(Error::Consistency("elimination word does not evaluate to the input".into()));
    }
    f.verify()?;
    Ok(f)
}
