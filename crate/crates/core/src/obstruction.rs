//! An `SL_2` matrix over `Q[z, w]` without a continuous four-factor
//! factorization.
//!
//! The first row of
//!
//! ```text
//! f(z, w) = [[(zw - 1)(zw - 2), (zw - 1) z + (zw - 2) z^2], [h1, h2]]
//! ```
//!
//! vanishes in the `(1,1)` entry on `zw = 1` and `zw = 2`, where the
//! four-factor equations force `g2` to equal the `(1,2)` entry, i.e. `-z^2`
//! and `z`. Restricted to the circles `theta -> (theta, c/theta)` these have
//! degrees 2 and 1, so no continuous family can connect them.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::matrix::Matrix;
use crate::ring::{Monomial, Poly, Ring, Scalar};
use crate::sl2fact::{sl2_4factor_poly_try, PolyAttempt};
use crate::{Error, Result};

/// Largest argument step accepted between consecutive samples.
pub const MAX_JUMP: f64 = PI / 2.0;

const BEZOUT_CAPS: [u32; 3] = [4, 8, 16];

fn zw() -> (Poly, Poly) {
    (Poly::var("z", &["z", "w"]), Poly::var("w", &["z", "w"]))
}

fn int(n: i64) -> Poly {
    Poly::constant(Scalar::from_int(n))
}

/// `a = (zw - 1)(zw - 2)` and `b = (zw - 1) z + (zw - 2) z^2`.
pub fn first_row() -> (Poly, Poly) {
    let (z, w) = zw();
    let u = z.mul(&w);
    let u1 = u.sub(&int(1));
    let u2 = u.sub(&int(2));
    (u1.mul(&u2), u1.mul(&z).add(&u2.mul(&z.mul(&z))))
}

/// The example matrix, with a second row solving `a h2 - b h1 = 1`.
pub fn build_example() -> Result<Matrix<Poly>> {
    let (a, b) = first_row();
    let (h1, h2) = bezout_second_row(&a, &b, None)?;
    let m = Matrix::from_rows(vec![vec![a, b], vec![h1, h2]])?;
    if !m.det()?.is_one() {
        return Err(Error::Consistency("second row does not give determinant one".into()));
    }
    Ok(m)
}

fn monomials(nvars: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=max_deg - used).map(move |k| {
                    let mut e = e.clone();
                    e.push(k);
                    e
                })
            })
            .collect();
    }
    out.sort_by_key(|e| Monomial(e.clone()));
    out
}

fn union_vars(a: &Poly, b: &Poly) -> Vec<String> {
    let mut vars: Vec<String> = a.vars().to_vec();
    for v in b.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars
}

/// `(h1, h2)` with `a h2 - b h1 = 1`, by a linear solve over the
/// coefficients of `h1, h2` up to a total degree cap. Without an explicit
/// cap the caps 4, 8, 16 are tried in turn.
pub fn bezout_second_row(a: &Poly, b: &Poly, cap: Option<u32>) -> Result<(Poly, Poly)> {
    let caps: Vec<u32> = match cap {
        Some(c) => vec![c],
        None => BEZOUT_CAPS.to_vec(),
    };
    let vars = union_vars(a, b);
    let a = a.with_vars(&vars)?;
    let b = b.with_vars(&vars)?;
    for &cap in &caps {
        if let Some(sol) = bezout_at(&a, &b, &vars, cap)? {
            return Ok(sol);
        }
    }
    Err(Error::BezoutInfeasible { cap: *caps.last().expect("nonempty") as usize })
}

fn bezout_at(a: &Poly, b: &Poly, vars: &[String], cap: u32) -> Result<Option<(Poly, Poly)>> {
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let basis = monomials(vars.len(), cap);
    // Unknowns: h1 coefficients then h2 coefficients, low degree first so
    // that high-degree coefficients end up free (and zero).
    let mut columns: Vec<Poly> = Vec::with_capacity(2 * basis.len());
    for e in &basis {
        let m = Poly::from_terms(&names, [(e.clone(), Scalar::one())]);
        columns.push(b.mul(&m).neg());
    }
    for e in &basis {
        let m = Poly::from_terms(&names, [(e.clone(), Scalar::one())]);
        columns.push(a.mul(&m));
    }
    let mut rows: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    rows.insert(vec![0; vars.len()], 0);
    for c in &columns {
        for (m, _) in c.with_vars(vars)?.terms() {
            let next = rows.len();
            rows.entry(m.0.clone()).or_insert(next);
        }
    }
    let ncols = columns.len();
    let mut system = Matrix::<Scalar>::zeros(rows.len(), ncols + 1);
    for (j, c) in columns.iter().enumerate() {
        for (m, coef) in c.with_vars(vars)?.terms() {
            system.set(rows[&m.0], j, coef.clone());
        }
    }
    system.set(rows[&vec![0; vars.len()]], ncols, Scalar::one());
    let (r, pivots) = system.rref();
    if pivots.contains(&ncols) {
        return Ok(None);
    }
    let mut coef = vec![Scalar::zero(); ncols];
    for (row, &p) in pivots.iter().enumerate() {
        coef[p] = r.get(row, ncols).clone();
    }
    let k = basis.len();
    let h1 = Poly::from_terms(&names, basis.iter().cloned().zip(coef[..k].iter().cloned()));
    let h2 = Poly::from_terms(&names, basis.iter().cloned().zip(coef[k..].iter().cloned()));
    if !a.mul(&h2).sub(&b.mul(&h1)).is_one() {
        return Err(Error::Consistency("Bezout solution fails the identity".into()));
    }
    Ok(Some((h1, h2)))
}

/// Laurent polynomial in one variable.
#[derive(Clone, PartialEq, Debug)]
pub struct Laurent {
    pub var: String,
    pub terms: BTreeMap<i32, Scalar>,
}

impl Laurent {
    pub fn monomial(var: &str, exp: i32, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Laurent { var: var.to_string(), terms }
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.terms.iter().map(|(&k, c)| c.to_complex64() * x.powi(k)).sum()
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (&e, c)) in self.terms.iter().rev().enumerate() {
            let power = match e {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{e}", self.var),
            };
            let coef = if !c.is_real() && !c.re().is_zero() { format!("({c})") } else { c.to_string() };
            let text = match (power.is_empty(), coef.as_str()) {
                (true, _) => coef,
                (false, "1") => power,
                (false, "-1") => format!("-{power}"),
                (false, _) => format!("{coef}*{power}"),
            };
            if k > 0 && !text.starts_with('-') {
                write!(f, "+")?;
            }
            write!(f, "{text}")?;
        }
        Ok(())
    }
}

/// `p(z, c/z)`: the restriction of a polynomial in `z, w` to the curve
/// `zw = c`, as a Laurent polynomial in `z`.
pub fn restrict_to_hyperbola(p: &Poly, c: &Scalar) -> Result<Laurent> {
    let vars = ["z".to_string(), "w".to_string()];
    let p = p.with_vars(&vars)?;
    let mut terms: BTreeMap<i32, Scalar> = BTreeMap::new();
    for (m, coef) in p.terms() {
        let (i, j) = (m.0[0] as i32, m.0[1]);
        let v = coef * &Ring::pow(c, j);
        let slot = terms.entry(i - j as i32).or_insert_with(Scalar::zero);
        *slot = &*slot + &v;
    }
    terms.retain(|_, v| !v.is_zero());
    Ok(Laurent { var: "z".into(), terms })
}

/// Samples of a closed loop in `C^*`; the last point is followed by the
/// first.
#[derive(Clone, PartialEq, Debug)]
pub struct LoopSamples {
    pub points: Vec<Complex64>,
}

impl LoopSamples {
    /// `f` on `samples` equally spaced points of the circle `|theta| = radius`.
    pub fn on_circle(radius: f64, samples: usize, f: impl Fn(Complex64) -> Complex64) -> Self {
        let points = (0..samples)
            .map(|k| f(Complex64::from_polar(radius, TAU * k as f64 / samples as f64)))
            .collect();
        LoopSamples { points }
    }

    /// Pointwise product of two loops with the same number of samples.
    pub fn pointwise_mul(&self, other: &LoopSamples) -> Result<LoopSamples> {
        if self.points.len() != other.points.len() {
            return Err(Error::Dimension("loops with different sample counts".into()));
        }
        Ok(LoopSamples { points: self.points.iter().zip(&other.points).map(|(a, b)| a * b).collect() })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re,im\n");
        for (k, p) in self.points.iter().enumerate() {
            out.push_str(&format!("{k},{},{}\n", p.re, p.im));
        }
        out
    }
}

/// Degree of a sampled loop in `C^*`: the summed principal argument
/// increments divided by `2 pi`.
pub fn winding_number(samples: &LoopSamples) -> Result<i64> {
    let pts = &samples.points;
    if pts.is_empty() {
        return Err(Error::Resample("empty loop".into()));
    }
    if let Some(k) = pts.iter().position(|p| p.norm() == 0.0 || !p.norm().is_finite()) {
        return Err(Error::Resample(format!("sample {k} is zero or not finite")));
    }
    let mut total = 0.0;
    for k in 0..pts.len() {
        let step = (pts[(k + 1) % pts.len()] / pts[k]).arg();
        if step.abs() >= MAX_JUMP {
            return Err(Error::Resample(format!(
                "argument jumps by {step:.3} between samples {k} and {}",
                (k + 1) % pts.len()
            )));
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ObstructionReport {
    pub radius: f64,
    pub samples: usize,
    /// Restriction of the `(1,2)` entry to `zw = 1`.
    pub restriction_start: String,
    /// Restriction of the `(1,2)` entry to `zw = 2`.
    pub restriction_end: String,
    pub degree_start: i64,
    pub degree_end: i64,
    pub curve: String,
    /// Roots of `(D - 1)(D - 2) = 1`, which the curve avoids.
    pub xi: [f64; 2],
    /// Smallest distance from the sampled curve to `xi`.
    pub curve_clearance: f64,
    /// Divisions that fail in the polynomial four-factor solver.
    pub polynomial_solver_failures: Vec<String>,
    pub obstructed: bool,
}

/// `gamma(t) = 1 + t`.
pub fn gamma(t: f64) -> f64 {
    1.0 + t
}

pub fn xi() -> [f64; 2] {
    let r = 5f64.sqrt();
    [(3.0 - r) / 2.0, (3.0 + r) / 2.0]
}

/// The loop `theta -> b(theta, c / theta)` on `|theta| = radius`.
pub fn restriction_loop(c: f64, radius: f64, samples: usize) -> LoopSamples {
    let (_, b) = first_row();
    let vars = ["z".to_string(), "w".to_string()];
    let b = b.with_vars(&vars).expect("b is in z, w");
    LoopSamples::on_circle(radius, samples, |theta| b.eval_complex(&[theta, Complex64::new(c, 0.0) / theta]))
}

/// Degrees of `theta -> -theta^2` and `theta -> theta`, obtained as the
/// restrictions of the `(1,2)` entry to `zw = gamma(0)` and `zw = gamma(1)`.
pub fn degree_obstruction_check(radius: f64, samples: usize) -> Result<ObstructionReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    if samples < 64 {
        return Err(Error::InvalidArgument(format!("{samples} samples, need at least 64")));
    }
    let m = build_example()?;
    let (a, b) = (m.get(0, 0), m.get(0, 1));
    let mut restrictions = Vec::new();
    let mut degrees = Vec::new();
    for c in [gamma(0.0), gamma(1.0)] {
        let cs = Scalar::from_int(c as i64);
        if !restrict_to_hyperbola(a, &cs)?.terms.is_empty() {
            return Err(Error::Consistency(format!("(1,1) entry does not vanish on zw = {c}")));
        }
        let r = restrict_to_hyperbola(b, &cs)?;
        degrees.push(winding_number(&LoopSamples::on_circle(radius, samples, |t| r.eval_complex(t)))?);
        restrictions.push(r.to_string());
    }
    let xi = xi();
    let curve_clearance = (0..=samples)
        .map(|k| gamma(k as f64 / samples as f64))
        .flat_map(|g| xi.map(|x| (g - x).abs()))
        .fold(f64::INFINITY, f64::min);
    if curve_clearance <= 0.0 {
        return Err(Error::Consistency("connecting curve meets xi".into()));
    }
    let failures = match sl2_4factor_poly_try(&m, &Poly::one())? {
        PolyAttempt::Factored(_) => Vec::new(),
        PolyAttempt::Failed(f) => f.failed,
    };
    Ok(ObstructionReport {
        radius,
        samples,
        restriction_start: restrictions[0].clone(),
        restriction_end: restrictions[1].clone(),
        degree_start: degrees[0],
        degree_end: degrees[1],
        curve: "gamma(t) = 1 + t, t in [0, 1]".into(),
        xi,
        curve_clearance,
        polynomial_solver_failures: failures,
        obstructed: degrees[0] != degrees[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, &["z", "w"]).unwrap()
    }

    #[test]
    fn example_has_determinant_one() {
        let m = build_example().unwrap();
        assert!(m.det().unwrap().is_one());
        assert_eq!(m.get(0, 0), &p("(z*w-1)*(z*w-2)"));
        let at = |q: &Poly| q.eval_named(&[("z", Scalar::from_int(1)), ("w", Scalar::from_int(2))]).unwrap();
        assert_eq!(at(m.get(0, 0)), Scalar::zero());
        assert_eq!(at(m.get(0, 1)), Scalar::one());
    }

    #[test]
    fn restrictions() {
        let (a, b) = first_row();
        let one = Scalar::one();
        let two = Scalar::from_int(2);
        assert!(restrict_to_hyperbola(&a, &one).unwrap().terms.is_empty());
        assert!(restrict_to_hyperbola(&a, &two).unwrap().terms.is_empty());
        assert_eq!(restrict_to_hyperbola(&b, &one).unwrap(), Laurent::monomial("z", 2, Scalar::from_int(-1)));
        assert_eq!(restrict_to_hyperbola(&b, &two).unwrap(), Laurent::monomial("z", 1, one.clone()));
        assert_eq!(restrict_to_hyperbola(&b, &one).unwrap().to_string(), "-z^2");
        assert_eq!(Laurent::monomial("z", -2, Scalar::from_int(3)).to_string(), "3*z^-2");
    }

    #[test]
    fn bezout_examples() {
        let (h1, h2) = bezout_second_row(&p("z"), &p("z+1"), None).unwrap();
        assert_eq!((h1.clone(), h2.clone()), (p("-1"), p("-1")));
        let (h1, h2) = bezout_second_row(&Poly::one(), &p("z*w+3"), None).unwrap();
        assert_eq!((h1, h2), (Poly::zero(), Poly::one()));
        assert_eq!(bezout_second_row(&p("z"), &p("z"), None), Err(Error::BezoutInfeasible { cap: 16 }));
    }

    #[test]
    fn winding_examples() {
        let id = LoopSamples::on_circle(1.0, 1024, |t| t);
        assert_eq!(winding_number(&id).unwrap(), 1);
        let sq = LoopSamples::on_circle(1.0, 1024, |t| -t * t);
        assert_eq!(winding_number(&sq).unwrap(), 2);
        let c = LoopSamples::on_circle(1.0, 1024, |_| Complex64::new(2.0, 1.0));
        assert_eq!(winding_number(&c).unwrap(), 0);
        for k in -3..=3 {
            let l = LoopSamples::on_circle(2.0, 256, |t| t.powi(k));
            assert_eq!(winding_number(&l).unwrap(), k as i64);
        }
        let coarse = LoopSamples::on_circle(1.0, 4, |t| t.powi(3));
        assert!(matches!(winding_number(&coarse), Err(Error::Resample(_))));
        let zero = LoopSamples { points: vec![Complex64::new(0.0, 0.0); 8] };
        assert!(matches!(winding_number(&zero), Err(Error::Resample(_))));
    }

    #[test]
    fn obstruction_report() {
        let r = degree_obstruction_check(1.0, 1024).unwrap();
        assert_eq!((r.degree_start, r.degree_end), (2, 1));
        assert!(r.obstructed);
        assert!(!r.polynomial_solver_failures.is_empty());
        assert!((r.xi[0] - 0.381966).abs() < 1e-5 && (r.xi[1] - 2.618034).abs() < 1e-5);
        for x in r.xi {
            assert!(((x - 1.0) * (x - 2.0) - 1.0).abs() < 1e-12);
        }
        let r5 = degree_obstruction_check(5.0, 1024).unwrap();
        assert_eq!((r5.degree_start, r5.degree_end), (2, 1));
        let r64 = degree_obstruction_check(1.0, 64).unwrap();
        assert_eq!((r64.degree_start, r64.degree_end), (2, 1));
        assert!(degree_obstruction_check(0.0, 1024).is_err());
        assert!(degree_obstruction_check(1.0, 16).is_err());
    }
}
