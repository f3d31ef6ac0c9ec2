//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the timings are sequential and the report is always shown.

mod common;

use std::time::{Duration, Instant};

use common::Rows;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sympfact::expfact::{commutant_blocks, exp_factor_sp, group_exponentials, nilpotent_exp, nilpotent_log};
use sympfact::obstruction::{build_example, degree_obstruction_check, restrict_to_hyperbola, Laurent};
use sympfact::random;
use sympfact::selftest::{self, Config};
use sympfact::sl2fact::{sl2_4factor_field, sl2_euclid_factor, Frame, UnitriFactorization};
use sympfact::spfact::unitriangular_factor_sp;
use sympfact::sympgen::{eval_word, expand_type_i_to_elementary, make_factor, SympFactor};
use sympfact::{Matrix, Poly, RatFn, Ring, Scalar, Side};

type Check = Result<(), String>;
type Criterion<'a> = (u32, &'a str, Duration, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alternates<R: Ring>(f: &UnitriFactorization<R>) -> bool {
    let mut lower = f.starts_lower;
    f.factors.iter().all(|(s, _)| {
        let ok = (*s == Side::Lower) == lower;
        lower = !lower;
        ok
    })
}

/// Sides checked by the oracle, in the frame the factorization declares.
fn sides_ok<R: Ring>(f: &UnitriFactorization<R>) -> bool {
    f.factors.iter().all(|(s, m)| {
        let r = common::rows(m);
        let r = match f.frame {
            Frame::Standard => r,
            Frame::Jtilde => common::to_jtilde(&r),
        };
        common::is_unitriangular(&r, *s == Side::Lower)
    })
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..1000 {
        let m = random::sl2(&mut rng, 1_000_000);
        let f = sl2_4factor_field(&m, None).map_err(|e| format!("matrix {k}: {e}"))?;
        ensure(f.len() == 4, || format!("matrix {k}: {} factors", f.len()))?;
        ensure(alternates(&f) && sides_ok(&f), || format!("matrix {k}: factor shapes"))?;
        ensure(common::product(2, f.factors.iter().map(|(_, x)| x)) == common::rows(&m), || {
            format!("matrix {k}: product differs")
        })?;
    }
    Ok(())
}

/// 100 `Sp_4` and 25 `Sp_6` matrices from random 10-token words.
fn sp_corpus() -> Vec<Matrix<Scalar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut out = Vec::new();
    for (n, count) in [(2, 100), (3, 25)] {
        for _ in 0..count {
            out.push(eval_word(&random::sp_word(&mut rng, n, 10, 3)).expect("valid word"));
        }
    }
    out
}

fn criterion_2(corpus: &[Matrix<Scalar>]) -> Check {
    for (k, m) in corpus.iter().enumerate() {
        let f = unitriangular_factor_sp(m).map_err(|e| format!("matrix {k}: {e}"))?;
        ensure(f.len() == 4, || format!("matrix {k}: {} factors", f.len()))?;
        ensure(alternates(&f) && sides_ok(&f), || format!("matrix {k}: factor shapes"))?;
        ensure(f.factors.iter().all(|(_, x)| common::is_symplectic(&common::rows(x))), || {
            format!("matrix {k}: non-symplectic factor")
        })?;
        ensure(common::product(m.rows(), f.factors.iter().map(|(_, x)| x)) == common::rows(m), || {
            format!("matrix {k}: product differs")
        })?;
    }
    Ok(())
}

fn exp_product(dim: usize, exponents: &[Matrix<Scalar>]) -> Rows<Scalar> {
    exponents
        .iter()
        .fold(common::identity(dim), |acc, n| common::mul(&acc, &common::exp_nilpotent(&common::rows(n))))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 2..=6 {
        for k in 0..100 {
            let first = if rng.gen_bool(0.5) { Side::Lower } else { Side::Upper };
            let symplectic = k % 2 == 1;
            let (factors, dim, frame) = if symplectic {
                let n = rng.gen_range(1..=3);
                let mut side = first;
                let fs: Vec<_> = (0..t)
                    .map(|_| {
                        let m = random::sp_unitriangular(&mut rng, n, side, 3);
                        let out = (side, m);
                        side = side.flip();
                        out
                    })
                    .collect();
                (fs, 2 * n, Frame::Jtilde)
            } else {
                let size = rng.gen_range(2..=5);
                (random::unitri_chain(&mut rng, size, t, first, 5), size, Frame::Standard)
            };
            let target_rows = common::product(dim, factors.iter().map(|(_, m)| m));
            let target = Matrix::from_rows(target_rows.clone()).expect("square");
            let f = UnitriFactorization { starts_lower: first == Side::Lower, frame, factors, target };
            let e = group_exponentials(&f).map_err(|e| format!("t={t} chain {k}: {e}"))?;
            ensure(e.len() == t / 2 + 1, || format!("t={t} chain {k}: {} exponents", e.len()))?;
            ensure(exp_product(dim, &e.exponents) == target_rows, || format!("t={t} chain {k}: product differs"))?;
            if symplectic {
                ensure(e.exponents.iter().all(|n| common::in_sp_algebra(&common::rows(n))), || {
                    format!("t={t} chain {k}: exponent outside sp")
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_4(corpus: &[Matrix<Scalar>]) -> Check {
    for (k, m) in corpus.iter().filter(|m| m.rows() == 4).enumerate() {
        let e = exp_factor_sp(m).map_err(|e| format!("matrix {k}: {e}"))?;
        ensure(e.len() == 3, || format!("matrix {k}: {} exponents", e.len()))?;
        ensure(exp_product(4, &e.exponents) == common::rows(m), || format!("matrix {k}: product differs"))?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..500 {
        let size = 2 + k % 5;
        let u = random::unipotent(&mut rng, size, 3);
        let l = nilpotent_log(&u).map_err(|e| format!("case {k}: {e}"))?;
        ensure(nilpotent_exp(&l).ok().as_ref() == Some(&u), || format!("case {k}: exp(log U) != U"))?;
        ensure(common::exp_nilpotent(&common::rows(&l)) == common::rows(&u), || {
            format!("case {k}: oracle exp(log U) != U")
        })?;
        let n = random::nilpotent(&mut rng, size, 3);
        let e = nilpotent_exp(&n).map_err(|e| format!("case {k}: {e}"))?;
        ensure(common::exp_nilpotent(&common::rows(&n)) == common::rows(&e), || format!("case {k}: exp differs"))?;
        ensure(nilpotent_log(&e).ok().as_ref() == Some(&n), || format!("case {k}: log(exp N) != N"))?;
    }
    Ok(())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..=4 {
        let bound = n * (n + 1) / 2;
        for dense in [true, false] {
            for k in 0..20 {
                let mut b = Matrix::<Scalar>::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let x = if dense {
                            random::nonzero_gaussian_int(&mut rng, 5)
                        } else if rng.gen_bool(0.4) {
                            random::gaussian_int(&mut rng, 5)
                        } else {
                            Scalar::zero()
                        };
                        b.set(i, j, x.clone());
                        b.set(j, i, x);
                    }
                }
                let w = expand_type_i_to_elementary(&b).map_err(|e| e.to_string())?;
                let ok = if dense { w.len() == bound } else { w.len() <= bound };
                ensure(ok, || format!("n={n} case {k}: {} tokens, bound {bound}", w.len()))?;
                let target = make_factor(&SympFactor::TypeI(b.clone()), n).map_err(|e| e.to_string())?;
                let tokens: Vec<_> = w.tokens.iter().map(|t| sympfact::sympgen::eval_token(t, n).unwrap()).collect();
                ensure(common::product(2 * n, &tokens) == common::rows(&target), || {
                    format!("n={n} case {k}: product differs")
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    let m = build_example().map_err(|e| e.to_string())?;
    let r = common::rows(&m);
    let det = r[0][0].mul(&r[1][1]).sub(&r[0][1].mul(&r[1][0]));
    ensure(det == Poly::one(), || format!("det = {det}"))?;
    let restrict = |c: i64| restrict_to_hyperbola(&r[0][1], &Scalar::from_int(c)).map_err(|e| e.to_string());
    ensure(restrict(1)? == Laurent::monomial("z", 2, Scalar::from_int(-1)), || "restriction to zw = 1".into())?;
    ensure(restrict(2)? == Laurent::monomial("z", 1, Scalar::one()), || "restriction to zw = 2".into())?;
    let report = degree_obstruction_check(1.0, 1024).map_err(|e| e.to_string())?;
    ensure((report.degree_start, report.degree_end) == (2, 1), || {
        format!("degrees {} and {}", report.degree_start, report.degree_end)
    })?;
    ensure(report.obstructed, || "report not obstructed".into())
}

fn criterion_8() -> Check {
    for (n, mv) in [(3, 3), (4, 2)] {
        let c = commutant_blocks(n, &Scalar::from_int(mv)).map_err(|e| e.to_string())?;
        let expect = (n - 2) * (n - 2) + 2;
        ensure(c.dimension() == expect, || format!("n={n}: dimension {} != {expect}", c.dimension()))?;
        let t = common::rows(&c.t_n);
        for s in &c.basis {
            let s = common::rows(s);
            ensure(common::mul(&s, &t) == common::mul(&t, &s), || format!("n={n}: basis element does not commute"))?;
            for (i, row) in s.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if (i < n - 2) != (j < n - 2) {
                        ensure(*x == RatFn::zero(), || format!("n={n}: off-diagonal block entry ({i},{j})"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..100 {
        let len = rng.gen_range(1..=8);
        let word: Vec<Matrix<Poly>> = (0..len)
            .map(|i| {
                let deg = rng.gen_range(0..=3);
                let p = Poly::from_terms(&["z"], (0..=deg).map(|d| (vec![d], Scalar::from_int(rng.gen_range(-4..=4)))));
                if i % 2 == 0 {
                    Matrix::elementary(2, 1, 0, p)
                } else {
                    Matrix::elementary(2, 0, 1, p)
                }
            })
            .collect();
        let target = common::product(2, &word);
        let m = Matrix::from_rows(target.clone()).expect("2x2");
        let f = sl2_euclid_factor(&m).map_err(|e| format!("word {k}: {e}"))?;
        ensure(alternates(&f) && sides_ok(&f), || format!("word {k}: factor shapes"))?;
        ensure(common::product(2, f.factors.iter().map(|(_, x)| x)) == target, || format!("word {k}: product differs"))?;
    }
    Ok(())
}

fn criterion_10() -> Check {
    let reports = selftest::run_all(&Config { seed: 10, cases: 100, parallel: true });
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{}: {}", r.name, r.failures.join("; ")))
        .collect();
    ensure(failed.is_empty(), || failed.join(" | "))
}

fn main() {
    let corpus = sp_corpus();
    let criteria: Vec<Criterion> = vec![
        (1, "SL2 four factors", Duration::from_secs(5), Box::new(criterion_1)),
        (2, "Sp4/Sp6 four factors", Duration::from_secs(60), Box::new(|| criterion_2(&corpus))),
        (3, "exponential count", Duration::from_secs(30), Box::new(criterion_3)),
        (4, "three symplectic exponentials", Duration::from_secs(60), Box::new(|| criterion_4(&corpus))),
        (5, "log/exp roundtrip", Duration::from_secs(10), Box::new(criterion_5)),
        (6, "elementary expansion count", Duration::from_secs(1), Box::new(criterion_6)),
        (7, "winding obstruction", Duration::from_secs(1), Box::new(criterion_7)),
        (8, "commutant lemma", Duration::from_secs(5), Box::new(criterion_8)),
        (9, "Euclidean SL2 roundtrip", Duration::from_secs(30), Box::new(criterion_9)),
        (10, "invariant suites", Duration::from_secs(600), Box::new(criterion_10)),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in &criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let verdict = match (&result, elapsed <= *limit) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (over the {:.0} s limit)", limit.as_secs_f64()),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        if !verdict.starts_with("PASS") {
            failures += 1;
        }
        println!("criterion {id:>2} [{name}]: {verdict} in {:.3} s (limit {:.0} s)", elapsed.as_secs_f64(), limit.as_secs_f64());
    }
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}
