//! Browser bindings: SL2 factorization with its exponentials, random
//! symplectic factorizations and the winding loops of the obstruction.
//!
//! Every export returns a JSON string; `www/index.html` renders it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use sympfact::expfact::{exp_factor_sp, group_exponentials};
use sympfact::json::{exp_to_json, matrix_to_json, unitri_to_json};
use sympfact::obstruction::{gamma, restriction_loop, winding_number};
use sympfact::ring::parse_scalar;
use sympfact::sl2fact::sl2_4factor_field;
use sympfact::spfact::unitriangular_factor_sp;
use sympfact::sympgen::eval_word;
use sympfact::{random, Matrix, Scalar};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn sl2_report(entries: &[&str; 4], g3: &str) -> Result<Value, String> {
    let xs = entries.iter().map(|t| parse_scalar(t)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let m = Matrix::new(2, 2, xs).map_err(err)?;
    let g3 = if g3.trim().is_empty() { None } else { Some(parse_scalar(g3).map_err(err)?) };
    let f = sl2_4factor_field(&m, g3.as_ref()).map_err(err)?;
    let e = group_exponentials(&f).map_err(err)?;
    Ok(json!({
        "factorization": unitri_to_json(&f),
        "params": f.params().iter().map(Scalar::to_string).collect::<Vec<_>>(),
        "verified": f.verify().is_ok() && e.verify().is_ok(),
        "exponentials": exp_to_json(&e, e.verify().is_ok()),
    }))
}

pub fn sp_report(n: usize, len: usize, seed: u64) -> Result<Value, String> {
    if !(1..=3).contains(&n) || len > 30 {
        return Err("choose n in 1..=3 and at most 30 tokens".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = eval_word(&random::sp_word(&mut rng, n, len, 3)).map_err(err)?;
    let f = unitriangular_factor_sp(&m).map_err(err)?;
    let e = exp_factor_sp(&m).map_err(err)?;
    Ok(json!({
        "matrix": matrix_to_json(&m),
        "factorization": unitri_to_json(&f),
        "verified": f.verify().is_ok(),
        "exponentials": exp_to_json(&e, e.verify().is_ok()),
    }))
}

/// Loop of the `(1,2)` entry over `zw = gamma(t)` and its winding number,
/// or `null` where the loop passes through zero.
pub fn loop_report(t: f64, samples: usize) -> Result<Value, String> {
    if !(0.0..=1.0).contains(&t) || !(16..=8192).contains(&samples) {
        return Err("t must lie in [0, 1] and samples in 16..=8192".into());
    }
    let c = gamma(t);
    let l = restriction_loop(c, 1.0, samples);
    let winding = winding_number(&l).ok();
    Ok(json!({
        "c": c,
        "winding": winding,
        "points": l.points.iter().map(|p| [p.re, p.im]).collect::<Vec<_>>(),
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn factor_sl2(a: &str, b: &str, c: &str, d: &str, g3: &str) -> Result<String, JsError> {
    to_js(sl2_report(&[a, b, c, d], g3))
}

#[wasm_bindgen]
pub fn factor_random_sp(n: usize, len: usize, seed: u64) -> Result<String, JsError> {
    to_js(sp_report(n, len, seed))
}

#[wasm_bindgen]
pub fn winding_loop(t: f64, samples: usize) -> Result<String, JsError> {
    to_js(loop_report(t, samples))
}
