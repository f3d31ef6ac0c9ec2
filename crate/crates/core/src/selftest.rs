//! Randomized invariant suites, run by the `selftest` subcommand and the
//! test suite.
//!
//! Each case gets its own generator seeded from the suite seed and the case
//! index, so a failure report names a reproducible case and `--parallel`
//! gives the same results as a sequential run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::expfact::{group_exponentials, nilpotent_exp, nilpotent_log};
use crate::matrix::{Matrix, Side, SymplecticForm};
use crate::obstruction::{winding_number, LoopSamples};
use crate::random;
use crate::ring::{Ring, Scalar};
use crate::sl2fact::{sl2_4factor_field, sl2_euclid_factor, Frame, UnitriFactorization};
use crate::spfact::unitriangular_factor_sp;
use crate::sympgen::{eval_word, expand_type_i_to_elementary, make_factor, SympFactor};

type Case = fn(&mut ChaCha8Rng) -> std::result::Result<(), String>;

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    /// Cases per suite; the slow factorization suites run a tenth of this.
    pub cases: usize,
    pub parallel: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 2024, cases: 50, parallel: false }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// `case k: message` for every failing case.
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Suite {
    name: &'static str,
    slow: bool,
    case: Case,
}

const SUITES: &[Suite] = &[
    Suite { name: "ring_axioms", slow: false, case: ring_axioms },
    Suite { name: "poly_ring_axioms", slow: false, case: poly_ring_axioms },
    Suite { name: "symplectic_closure", slow: false, case: symplectic_closure },
    Suite { name: "word_homomorphism", slow: false, case: word_homomorphism },
    Suite { name: "type_i_expansion", slow: false, case: type_i_expansion },
    Suite { name: "winding_multiplicativity", slow: false, case: winding_multiplicativity },
    Suite { name: "one_parameter_subgroup", slow: false, case: one_parameter_subgroup },
    Suite { name: "log_exp_roundtrip", slow: false, case: log_exp_roundtrip },
    Suite { name: "sl2_four_factors", slow: false, case: sl2_four_factors },
    Suite { name: "euclid_roundtrip", slow: true, case: euclid_roundtrip },
    Suite { name: "exponential_grouping", slow: false, case: exponential_grouping },
    Suite { name: "sp4_four_factors", slow: true, case: sp4_four_factors },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

fn case_rng(seed: u64, name: &str, k: usize) -> ChaCha8Rng {
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn run(suite: &Suite, cfg: &Config) -> SuiteReport {
    let cases = if suite.slow { (cfg.cases / 10).max(1) } else { cfg.cases };
    let one = |k: usize| -> Option<String> {
        let mut rng = case_rng(cfg.seed, suite.name, k);
        (suite.case)(&mut rng).err().map(|e| format!("case {k}: {e}"))
    };
    let failures = if cfg.parallel {
        (0..cases).into_par_iter().filter_map(one).collect()
    } else {
        (0..cases).filter_map(one).collect()
    };
    SuiteReport { name: suite.name, cases, failures }
}

/// Run one suite by name.
pub fn run_suite(name: &str, cfg: &Config) -> Option<SuiteReport> {
    SUITES.iter().find(|s| s.name == name).map(|s| run(s, cfg))
}

pub fn run_all(cfg: &Config) -> Vec<SuiteReport> {
    SUITES.iter().map(|s| run(s, cfg)).collect()
}

fn check(ok: bool, what: &str) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn ring_axioms(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let [a, b, c] = [(); 3].map(|_| random::scalar(rng, 50));
    check(a.add(&b) == b.add(&a), "addition commutes")?;
    check(a.mul(&b) == b.mul(&a), "multiplication commutes")?;
    check(a.mul(&b).mul(&c) == a.mul(&b.mul(&c)), "multiplication associates")?;
    check(a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c)), "distributivity")?;
    check(a.sub(&a).is_zero(), "a - a = 0")?;
    if !a.is_zero() {
        check(a.mul(&a.inverse().map_err(|e| e.to_string())?).is_one(), "a a^-1 = 1")?;
    }
    Ok(())
}

fn poly_ring_axioms(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let [a, b, c] = [(); 3].map(|_| random::poly(rng, "z", 3, 5));
    check(a.mul(&b) == b.mul(&a), "multiplication commutes")?;
    check(a.mul(&b).mul(&c) == a.mul(&b.mul(&c)), "multiplication associates")?;
    check(a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c)), "distributivity")?;
    if !b.is_zero() {
        let (q, r) = a.euclid_div(&b).map_err(|e| e.to_string())?;
        check(q.mul(&b).add(&r) == a, "division with remainder")?;
        check(r.is_zero() || r.total_degree() < b.total_degree(), "remainder degree")?;
    }
    Ok(())
}

fn symplectic_closure(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let n = rng.gen_range(1..=3);
    let form = SymplecticForm::j(n);
    let a = eval_word(&random::sp_word(rng, n, 6, 3)).map_err(|e| e.to_string())?;
    let b = eval_word(&random::sp_word(rng, n, 6, 3)).map_err(|e| e.to_string())?;
    let ab = a.mul(&b).map_err(|e| e.to_string())?;
    let a_inv = a.inverse().map_err(|e| e.to_string())?;
    check(ab.is_symplectic(&form).unwrap_or(false), "product is symplectic")?;
    check(a_inv.is_symplectic(&form).unwrap_or(false), "inverse is symplectic")?;
    check(a.det().map(|d| d.is_one()).unwrap_or(false), "determinant is one")
}

fn word_homomorphism(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let n = rng.gen_range(1..=3);
    let (len1, len2) = (rng.gen_range(0..6), rng.gen_range(0..6));
    let u = random::sp_word(rng, n, len1, 3);
    let v = random::sp_word(rng, n, len2, 3);
    let ev = |w| eval_word(w).map_err(|e: crate::Error| e.to_string());
    let uv = u.concat(&v).map_err(|e| e.to_string())?;
    check(ev(&uv)? == ev(&u)?.mul(&ev(&v)?).map_err(|e| e.to_string())?, "eval(uv) = eval(u) eval(v)")?;
    check(ev(&u.inverse())? == ev(&u)?.inverse().map_err(|e| e.to_string())?, "eval(u^-1) = eval(u)^-1")
}

fn type_i_expansion(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let n = rng.gen_range(1..=4);
    let mut b = Matrix::<Scalar>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = if rng.gen_bool(0.7) { random::gaussian_int(rng, 4) } else { Scalar::zero() };
            b.set(i, j, x.clone());
            b.set(j, i, x);
        }
    }
    let w = expand_type_i_to_elementary(&b).map_err(|e| e.to_string())?;
    check(w.len() <= n * (n + 1) / 2, "at most n(n+1)/2 tokens")?;
    let target = make_factor(&SympFactor::TypeI(b), n).map_err(|e| e.to_string())?;
    check(eval_word(&w).map_err(|e| e.to_string())? == target, "expansion evaluates to the factor")
}

/// `prod (x - a_k)` on a circle winds once per root inside it.
fn winding_multiplicativity(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let roots = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..rng.gen_range(0..4))
            .map(|_| loop {
                let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if (z.norm() - 1.0).abs() > 0.2 {
                    break z;
                }
            })
            .collect()
    };
    let (ra, rb) = (roots(rng), roots(rng));
    let sample = |r: &[Complex64]| {
        let r = r.to_vec();
        LoopSamples::on_circle(1.0, 256, move |x| r.iter().map(|a| x - a).product())
    };
    let (la, lb) = (sample(&ra), sample(&rb));
    let w = |l: &LoopSamples| winding_number(l).map_err(|e| e.to_string());
    let (wa, wb) = (w(&la)?, w(&lb)?);
    check(wa == ra.iter().filter(|a| a.norm() < 1.0).count() as i64, "winding counts roots inside")?;
    check(w(&la.pointwise_mul(&lb).map_err(|e| e.to_string())?)? == wa + wb, "deg(fg) = deg f + deg g")?;
    let (j, k) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
    let (cj, ck) = (random::nonzero_gaussian_int(rng, 5).to_complex64(), random::nonzero_gaussian_int(rng, 5).to_complex64());
    let mj = LoopSamples::on_circle(1.0, 256, move |x| cj * x.powi(j));
    let mk = LoopSamples::on_circle(1.0, 256, move |x| ck * x.powi(k));
    check(w(&mj)? == j as i64, "deg(c theta^k) = k")?;
    check(w(&mj.pointwise_mul(&mk).map_err(|e| e.to_string())?)? == (j + k) as i64, "monomial degrees add")
}

fn one_parameter_subgroup(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let size = rng.gen_range(2..=5);
    let n = random::nilpotent(rng, size, 3);
    let (s, t) = (random::scalar(rng, 5), random::scalar(rng, 5));
    let e = |x: &Scalar| nilpotent_exp(&n.scale(x)).map_err(|e| e.to_string());
    let lhs = e(&s.add(&t))?;
    check(lhs == e(&s)?.mul(&e(&t)?).map_err(|e| e.to_string())?, "exp((s+t)N) = exp(sN) exp(tN)")?;
    check(e(&Scalar::zero())?.is_identity(), "exp(0) = I")
}

fn log_exp_roundtrip(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let size = rng.gen_range(2..=6);
    let n = random::nilpotent(rng, size, 3);
    let u = nilpotent_exp(&n).map_err(|e| e.to_string())?;
    check(nilpotent_log(&u).map_err(|e| e.to_string())? == n, "log(exp N) = N")?;
    let u = random::unipotent(rng, size, 3);
    let back = nilpotent_exp(&nilpotent_log(&u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check(back == u, "exp(log U) = U")
}

fn sl2_four_factors(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let m = random::sl2(rng, 1000);
    let f = sl2_4factor_field(&m, None).map_err(|e| e.to_string())?;
    check(f.len() == 4, "four factors")?;
    f.verify().map_err(|e| e.to_string())
}

fn euclid_roundtrip(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let word = random::sl2_poly_word(rng, "z", 8, 3, 3);
    let m = Matrix::product(2, word.iter()).map_err(|e| e.to_string())?;
    let f = sl2_euclid_factor(&m).map_err(|e| e.to_string())?;
    f.verify().map_err(|e| e.to_string())
}

fn exponential_grouping(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let t = rng.gen_range(1..=6);
    let size = rng.gen_range(2..=4);
    let first = if rng.gen_bool(0.5) { Side::Lower } else { Side::Upper };
    let factors = random::unitri_chain(rng, size, t, first, 3);
    let target = Matrix::product(size, factors.iter().map(|(_, m)| m)).map_err(|e| e.to_string())?;
    let f = UnitriFactorization { starts_lower: first == Side::Lower, frame: Frame::Standard, factors, target };
    let e = group_exponentials(&f).map_err(|e| e.to_string())?;
    check(e.len() == t / 2 + 1, "floor(t/2) + 1 exponents")?;
    e.verify().map_err(|e| e.to_string())
}

fn sp4_four_factors(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let m = eval_word(&random::sp_word(rng, 2, 10, 3)).map_err(|e| e.to_string())?;
    let f = unitriangular_factor_sp(&m).map_err(|e| e.to_string())?;
    check(f.len() == 4, "four factors")?;
    f.verify().map_err(|e| e.to_string())?;
    let form = SymplecticForm::j(2);
    check(f.factors.iter().all(|(_, x)| x.is_symplectic(&form).unwrap_or(false)), "factors are symplectic")
}
