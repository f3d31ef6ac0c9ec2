//! Unitriangular factorization of `SL_2` matrices.
//!
//! The four-factor solver writes `M = L(g1) U(g2) L(g3) U(g4)` where
//! `L(x) = [[1, 0], [x, 1]]` and `U(x) = [[1, x], [0, 1]]`. With
//! `M = [[a, b], [c, d]]` and `a` invertible the fiber equations are
//! `a = 1 + g2 g3`, `g4 = (b - g2)/a`, `g1 = (c - g3)/a`; the cases `a = 0`
//! and `a = 1` are handled separately.

use serde::{Deserialize, Serialize};

use crate::matrix::{Matrix, Side};
use crate::ring::{Field, Poly, Ring, Scalar};
use crate::sympgen::basis_change_to_jtilde;
use crate::{Error, Result};

/// Basis in which the unitriangular shape of factors is checked.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// The matrices themselves.
    #[default]
    Standard,
    /// After reversing the last half of the basis (symplectic factors).
    Jtilde,
}

#[derive(Clone, PartialEq, Debug)]
pub struct UnitriFactorization<R> {
    pub starts_lower: bool,
    pub frame: Frame,
    pub factors: Vec<(Side, Matrix<R>)>,
    pub target: Matrix<R>,
}

impl<R: Ring> UnitriFactorization<R> {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn product(&self) -> Result<Matrix<R>> {
        Matrix::product(self.target.rows(), self.factors.iter().map(|(_, m)| m))
    }

    pub fn side_ok(&self, side: Side, m: &Matrix<R>) -> bool {
        match self.frame {
            Frame::Standard => m.is_unitriangular(side),
            Frame::Jtilde => {
                m.rows().is_multiple_of(2)
                    && basis_change_to_jtilde(m, m.rows() / 2)
                        .map(|t| t.is_unitriangular(side))
                        .unwrap_or(false)
            }
        }
    }

    /// Alternation, declared sides and exact product equality.
    pub fn verify(&self) -> Result<()> {
        let mut expect = if self.starts_lower { Side::Lower } else { Side::Upper };
        for (k, (side, m)) in self.factors.iter().enumerate() {
            if *side != expect {
                return Err(Error::NotAlternating);
            }
            if !self.side_ok(*side, m) {
                return Err(Error::Consistency(format!("factor {k} is not {side} unitriangular")));
            }
            expect = expect.flip();
        }
        if self.product()? != self.target {
            return Err(Error::Consistency("product of factors differs from target".into()));
        }
        Ok(())
    }

    /// Off-diagonal parameters of 2x2 factors.
    pub fn params(&self) -> Vec<R> {
        self.factors
            .iter()
            .map(|(side, m)| match side {
                Side::Lower => m.get(1, 0).clone(),
                Side::Upper => m.get(0, 1).clone(),
            })
            .collect()
    }
}

pub fn lower<R: Ring>(x: R) -> Matrix<R> {
    Matrix::elementary(2, 1, 0, x)
}

pub fn upper<R: Ring>(x: R) -> Matrix<R> {
    Matrix::elementary(2, 0, 1, x)
}

fn lulu<R: Ring>(g: [R; 4], target: Matrix<R>) -> UnitriFactorization<R> {
    let [g1, g2, g3, g4] = g;
    UnitriFactorization {
        starts_lower: true,
        frame: Frame::Standard,
        factors: vec![
            (Side::Lower, lower(g1)),
            (Side::Upper, upper(g2)),
            (Side::Lower, lower(g3)),
            (Side::Upper, upper(g4)),
        ],
        target,
    }
}

/// `L(z1) U(z2) L(z3) U(z4)`.
pub fn phi4<R: Ring>(z1: R, z2: R, z3: R, z4: R) -> Matrix<R> {
    [lower(z1), upper(z2), lower(z3), upper(z4)]
        .iter()
        .fold(Matrix::identity(2), |acc, f| acc.mul(f).expect("2x2"))
}

fn entries<R: Ring>(m: &Matrix<R>) -> Result<(R, R, R, R)> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension(format!("expected 2x2, got {}x{}", m.rows(), m.cols())));
    }
    let det = m.det()?;
    if !det.is_one() {
        return Err(Error::DeterminantNotOne { det: det.to_string() });
    }
    Ok((m.get(0, 0).clone(), m.get(0, 1).clone(), m.get(1, 0).clone(), m.get(1, 1).clone()))
}

/// Four-factor solver over a field. `g3_choice` (default 1) is the free
/// parameter of the generic branch and must be nonzero.
pub fn sl2_4factor_field<F: Field>(m: &Matrix<F>, g3_choice: Option<&F>) -> Result<UnitriFactorization<F>> {
    let g3c = g3_choice.cloned().unwrap_or_else(F::one);
    if g3c.is_zero() {
        return Err(Error::InvalidArgument("g3 must be nonzero".into()));
    }
    let (a, b, c, d) = entries(m)?;
    let g = if a.is_zero() {
        // 1 + g2 g3 = 0 forces g2 = b, g3 = c; bc = -1 so c != 0.
        let g4 = d.sub(&F::one()).div(&c)?;
        [F::zero(), b, c, g4]
    } else if a.is_one() {
        [c, F::zero(), F::zero(), b]
    } else {
        let g2 = a.sub(&F::one()).div(&g3c)?;
        let g4 = b.sub(&g2).div(&a)?;
        let g1 = c.sub(&g3c).div(&a)?;
        [g1, g2, g3c, g4]
    };
    let f = lulu(g, m.clone());
    if f.product()? != *m {
        return Err(Error::Consistency("four-factor solution does not reproduce M".into()));
    }
    Ok(f)
}

/// Which exact division failed in [`sl2_4factor_poly_try`].
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct DivisibilityFailure {
    pub failed: Vec<String>,
    pub a: String,
    pub g3: String,
}

#[derive(Clone, PartialEq, Debug)]
pub enum PolyAttempt {
    Factored(UnitriFactorization<Poly>),
    Failed(DivisibilityFailure),
}

/// Four-factor solver over a polynomial ring; succeeds exactly when the
/// divisions in the fiber equations are exact.
pub fn sl2_4factor_poly_try(m: &Matrix<Poly>, g3_choice: &Poly) -> Result<PolyAttempt> {
    if g3_choice.is_zero() {
        return Err(Error::InvalidArgument("g3 must be nonzero".into()));
    }
    let (a, b, c, d) = entries(m)?;
    let mut failed = Vec::new();
    let mut div = |num: Poly, den: &Poly, label: &str| match num.exact_div(den) {
        Ok(q) => Some(q),
        Err(_) => {
            failed.push(label.to_string());
            None
        }
    };
    let g = if a.is_zero() {
        let g4 = div(d.sub(&Poly::one()), &c, "(d-1)/c");
        g4.map(|g4| [Poly::zero(), b.clone(), c.clone(), g4])
    } else if a.is_one() {
        Some([c.clone(), Poly::zero(), Poly::zero(), b.clone()])
    } else {
        let g2 = div(a.sub(&Poly::one()), g3_choice, "(a-1)/g3");
        let g4 = g2.as_ref().and_then(|g2| div(b.sub(g2), &a, "(b-g2)/a"));
        let g1 = div(c.sub(g3_choice), &a, "(c-g3)/a");
        match (g1, g2, g4) {
            (Some(g1), Some(g2), Some(g4)) => Some([g1, g2, g3_choice.clone(), g4]),
            _ => None,
        }
    };
    match g {
        Some(g) => {
            let f = lulu(g, m.clone());
            if f.product()? != *m {
                return Err(Error::Consistency("polynomial solution does not reproduce M".into()));
            }
            Ok(PolyAttempt::Factored(f))
        }
        None => Ok(PolyAttempt::Failed(DivisibilityFailure {
            failed,
            a: a.to_string(),
            g3: g3_choice.to_string(),
        })),
    }
}

/// Append a factor, merging with a same-side neighbour and dropping
/// identities so that sides keep alternating.
fn push_merged<R: Ring>(stack: &mut Vec<(Side, R)>, side: Side, x: R) {
    if x.is_zero() {
        return;
    }
    if let Some((s, y)) = stack.last_mut() {
        if *s == side {
            let sum = y.add(&x);
            if sum.is_zero() {
                stack.pop();
            } else {
                *y = sum;
            }
            return;
        }
    }
    stack.push((side, x));
}

fn factorization_from_params<R: Ring>(params: Vec<(Side, R)>, target: Matrix<R>) -> UnitriFactorization<R> {
    let starts_lower = params.first().is_none_or(|(s, _)| *s == Side::Lower);
    let factors = params
        .into_iter()
        .map(|(s, x)| {
            let m = match s {
                Side::Lower => lower(x),
                Side::Upper => upper(x),
            };
            (s, m)
        })
        .collect();
    UnitriFactorization { starts_lower, frame: Frame::Standard, factors, target }
}

/// Unbounded-length factorization over a univariate polynomial ring by
/// Euclidean reduction of the first column, finished by the field solver.
/// Identity factors are dropped, so the result may be empty.
pub fn sl2_euclid_factor(m: &Matrix<Poly>) -> Result<UnitriFactorization<Poly>> {
    let (a0, b0, c0, d0) = entries(m)?;
    let mut used: Vec<String> = Vec::new();
    for e in [&a0, &b0, &c0, &d0] {
        for v in e.used_vars() {
            if !used.contains(&v) {
                used.push(v);
            }
        }
    }
    if used.len() > 1 {
        return Err(Error::NotUnivariate(used));
    }
    let mut w = m.clone();
    // Left multiplications applied to w, in order.
    let mut ops: Vec<(Side, Poly)> = Vec::new();
    let mut apply = |w: &mut Matrix<Poly>, side: Side, q: Poly| -> Result<()> {
        let e = match side {
            Side::Upper => upper(q.clone()),
            Side::Lower => lower(q.clone()),
        };
        *w = e.mul(w)?;
        ops.push((side, q));
        Ok(())
    };
    loop {
        let (a, c) = (w.get(0, 0).clone(), w.get(1, 0).clone());
        if a.is_zero() || c.is_zero() {
            break;
        }
        let (da, dc) = (a.total_degree().unwrap_or(0), c.total_degree().unwrap_or(0));
        if da >= dc {
            let (q, _) = a.euclid_div(&c)?;
            apply(&mut w, Side::Upper, q.neg())?;
        } else {
            let (q, _) = c.euclid_div(&a)?;
            apply(&mut w, Side::Lower, q.neg())?;
        }
    }
    if w.get(0, 0).is_zero() {
        // c is a nonzero constant since det = -b c = 1.
        apply(&mut w, Side::Upper, Poly::one())?;
    }
    if !w.get(1, 0).is_zero() {
        let q = w.get(1, 0).exact_div(w.get(0, 0))?;
        apply(&mut w, Side::Lower, q.neg())?;
    }
    let a = w.get(0, 0).clone();
    let a_const = a.as_constant().ok_or_else(|| {
        Error::Consistency(format!("Euclidean reduction left a non-constant pivot {a}"))
    })?;
    if !w.get(0, 1).is_zero() {
        let q = w.get(0, 1).mul(&a);
        apply(&mut w, Side::Upper, q.neg())?;
    }
    let d_const = w.get(1, 1).as_constant().ok_or_else(|| {
        Error::Consistency("Euclidean reduction left a non-constant diagonal".into())
    })?;
    let remnant = Matrix::from_rows(vec![
        vec![a_const, Scalar::zero()],
        vec![Scalar::zero(), d_const],
    ])?;
    let base = sl2_4factor_field(&remnant, None)?;

    let mut params: Vec<(Side, Poly)> = Vec::new();
    for (side, q) in ops {
        push_merged(&mut params, side, q.neg());
    }
    for ((side, _), g) in base.factors.iter().zip(base.params()) {
        push_merged(&mut params, *side, Poly::constant(g));
    }
    let f = factorization_from_params(params, m.clone());
    if f.product()? != *m {
        return Err(Error::Consistency("Euclidean factors do not reproduce M".into()));
    }
    Ok(f)
}
