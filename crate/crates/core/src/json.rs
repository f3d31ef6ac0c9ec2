//! JSON forms of matrices, words and factorizations.
//!
//! A matrix is
//!
//! ```text
//! {"rows": 2, "cols": 2, "ring": {"kind": "gaussian"},
//!  "entries": [["2", "3"], ["1", "2"]]}
//! ```
//!
//! with `{"kind": "poly", "vars": ["z", "w"]}` for polynomial entries.
//! Entries are strings in the text form of [`crate::ring::parse`]; integer
//! JSON numbers are accepted on input. A bare array of rows is also read as
//! a matrix, with the ring taken from the caller's default.
//!
//! Output uses `serde_json`'s sorted maps and the canonical term order of
//! the ring types, so serialize, parse, serialize is a fixed point.

use serde_json::{json, Map, Value};

use crate::expfact::ExpFactorization;
use crate::matrix::{Matrix, Side};
use crate::ring::{parse_poly, parse_scalar, Poly, Ring, Scalar};
use crate::sl2fact::{Frame, UnitriFactorization};
use crate::sympgen::{GenToken, GenWord, Group};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub enum RingSpec {
    #[default]
    Gaussian,
    Poly(Vec<String>),
}

impl RingSpec {
    pub fn to_json(&self) -> Value {
        match self {
            RingSpec::Gaussian => json!({"kind": "gaussian"}),
            RingSpec::Poly(vars) => json!({"kind": "poly", "vars": vars}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = field(v, "kind", "ring")?.as_str().ok_or_else(|| bad("ring.kind must be a string"))?;
        match kind {
            "gaussian" => Ok(RingSpec::Gaussian),
            "poly" => {
                let vars = field(v, "vars", "ring")?
                    .as_array()
                    .ok_or_else(|| bad("ring.vars must be an array"))?
                    .iter()
                    .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("ring.vars entries must be strings")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RingSpec::Poly(vars))
            }
            other => Err(bad(&format!("unknown ring kind {other:?}"))),
        }
    }
}

/// Entry types with a JSON form.
pub trait JsonRing: Ring {
    fn ring_spec(entries: &[Self]) -> RingSpec;
    fn parse_entry(text: &str, spec: &RingSpec) -> Result<Self>;
}

impl JsonRing for Scalar {
    fn ring_spec(_: &[Self]) -> RingSpec {
        RingSpec::Gaussian
    }

    fn parse_entry(text: &str, _: &RingSpec) -> Result<Self> {
        parse_scalar(text)
    }
}

impl JsonRing for Poly {
    fn ring_spec(entries: &[Self]) -> RingSpec {
        let mut vars: Vec<String> = Vec::new();
        for p in entries {
            for v in p.vars() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        RingSpec::Poly(vars)
    }

    fn parse_entry(text: &str, spec: &RingSpec) -> Result<Self> {
        let vars: Vec<&str> = match spec {
            RingSpec::Gaussian => Vec::new(),
            RingSpec::Poly(v) => v.iter().map(String::as_str).collect(),
        };
        let p = parse_poly(text, &vars)?;
        if matches!(spec, RingSpec::Gaussian) && !p.is_constant() {
            return Err(Error::Parse { pos: 0, msg: "variables are not allowed over the gaussian ring".into() });
        }
        Ok(p)
    }
}

/// A matrix whose ring is known only after parsing.
#[derive(Clone, PartialEq, Debug)]
pub enum AnyMatrix {
    Gaussian(Matrix<Scalar>),
    Poly(Matrix<Poly>),
}

fn bad(msg: &str) -> Error {
    Error::Parse { pos: 0, msg: msg.to_string() }
}

fn field<'a>(v: &'a Value, key: &str, ctx: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(&format!("{ctx}: missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(&format!("{what} must be a nonnegative integer")))
}

/// Parse JSON text; syntax errors carry the byte offset of the failure.
pub fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        let pos = byte_offset(text, e.line(), e.column());
        Error::Parse { pos, msg: format!("invalid JSON at line {} column {}: {e}", e.line(), e.column()) }
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn entry_text(v: &Value, path: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        _ => Err(bad(&format!("{path}: expected a string or an integer"))),
    }
}

fn locate(e: Error, path: &str) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{path}: {msg} (offset {pos} in entry)") },
        other => Error::Parse { pos: 0, msg: format!("{path}: {other}") },
    }
}

pub fn matrix_to_json<R: JsonRing>(m: &Matrix<R>) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "ring": R::ring_spec(m.entries()).to_json(),
        "entries": m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// The ring named by a matrix object, if any.
pub fn matrix_ring(v: &Value) -> Result<Option<RingSpec>> {
    v.get("ring").map(RingSpec::from_json).transpose()
}

fn rows_of(v: &Value) -> Result<&Vec<Value>> {
    let rows = match v {
        Value::Array(_) => v,
        Value::Object(_) => field(v, "entries", "matrix")?,
        _ => return Err(bad("matrix must be an object or an array of rows")),
    };
    rows.as_array().ok_or_else(|| bad("matrix entries must be an array of rows"))
}

/// Parse a matrix over `R`. `default` is used when the value does not name
/// its ring.
pub fn matrix_from_json<R: JsonRing>(v: &Value, default: &RingSpec) -> Result<Matrix<R>> {
    let spec = matrix_ring(v)?.unwrap_or_else(|| default.clone());
    let rows = rows_of(v)?;
    let mut entries = Vec::new();
    let mut cols = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad(&format!("entries[{i}] must be an array")))?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(bad(&format!("entries[{i}] has {} columns, expected {}", row.len(), cols.unwrap_or(0))));
        }
        for (j, x) in row.iter().enumerate() {
            let path = format!("entries[{i}][{j}]");
            let text = entry_text(x, &path)?;
            entries.push(R::parse_entry(&text, &spec).map_err(|e| locate(e, &path))?);
        }
    }
    let (r, c) = (rows.len(), cols.unwrap_or(0));
    if let Value::Object(_) = v {
        let rr = as_usize(field(v, "rows", "matrix")?, "rows")?;
        let cc = as_usize(field(v, "cols", "matrix")?, "cols")?;
        if (rr, cc) != (r, c) {
            return Err(bad(&format!("declared {rr}x{cc} but entries are {r}x{c}")));
        }
    }
    Matrix::new(r, c, entries)
}

pub fn any_matrix_from_json(v: &Value, default: &RingSpec) -> Result<AnyMatrix> {
    match matrix_ring(v)?.unwrap_or_else(|| default.clone()) {
        RingSpec::Gaussian => matrix_from_json(v, default).map(AnyMatrix::Gaussian),
        RingSpec::Poly(_) => matrix_from_json(v, default).map(AnyMatrix::Poly),
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Lower => "lower",
        Side::Upper => "upper",
    }
}

fn side_from(v: &Value, path: &str) -> Result<Side> {
    match v.as_str() {
        Some("lower") => Ok(Side::Lower),
        Some("upper") => Ok(Side::Upper),
        _ => Err(bad(&format!("{path}: side must be \"lower\" or \"upper\""))),
    }
}

pub fn unitri_to_json<R: JsonRing>(f: &UnitriFactorization<R>) -> Value {
    json!({
        "starts_lower": f.starts_lower,
        "frame": serde_json::to_value(f.frame).expect("frame serializes"),
        "factors": f.factors.iter().map(|(s, m)| json!({"side": side_name(*s), "matrix": matrix_to_json(m)})).collect::<Vec<_>>(),
        "target": matrix_to_json(&f.target),
    })
}

pub fn unitri_from_json<R: JsonRing>(v: &Value, default: &RingSpec) -> Result<UnitriFactorization<R>> {
    let starts_lower = field(v, "starts_lower", "factorization")?
        .as_bool()
        .ok_or_else(|| bad("starts_lower must be a boolean"))?;
    let frame = match v.get("frame") {
        None => Frame::Standard,
        Some(f) => serde_json::from_value(f.clone()).map_err(|_| bad("frame must be \"standard\" or \"jtilde\""))?,
    };
    let target = matrix_from_json(field(v, "target", "factorization")?, default).map_err(|e| nest(e, "target"))?;
    let factors = field(v, "factors", "factorization")?
        .as_array()
        .ok_or_else(|| bad("factors must be an array"))?
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let path = format!("factors[{k}]");
            let side = side_from(field(f, "side", &path)?, &path)?;
            let m = matrix_from_json(field(f, "matrix", &path)?, default).map_err(|e| nest(e, &path))?;
            Ok((side, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitriFactorization { starts_lower, frame, factors, target })
}

fn nest(e: Error, path: &str) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{path}.{msg}") },
        other => other,
    }
}

pub fn exp_to_json<R: JsonRing>(f: &ExpFactorization<R>, verified: bool) -> Value {
    json!({
        "exponents": f.exponents.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "target": matrix_to_json(&f.target),
        "verified": verified,
        "count": f.len(),
    })
}

pub fn exp_from_json<R: JsonRing>(v: &Value, default: &RingSpec) -> Result<ExpFactorization<R>> {
    let target = matrix_from_json(field(v, "target", "exponential factorization")?, default).map_err(|e| nest(e, "target"))?;
    let exponents = field(v, "exponents", "exponential factorization")?
        .as_array()
        .ok_or_else(|| bad("exponents must be an array"))?
        .iter()
        .enumerate()
        .map(|(k, m)| matrix_from_json(m, default).map_err(|e| nest(e, &format!("exponents[{k}]"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpFactorization { exponents, target })
}

pub fn token_to_json<R: JsonRing>(t: &GenToken<R>) -> Value {
    let (i, j) = t.indices();
    let mut m = Map::new();
    m.insert("kind".into(), json!(t.kind_name()));
    m.insert("i".into(), json!(i));
    if let Some(j) = j {
        m.insert("j".into(), json!(j));
    }
    m.insert("r".into(), json!(t.param().to_string()));
    Value::Object(m)
}

pub fn token_from_json<R: JsonRing>(v: &Value, spec: &RingSpec, path: &str) -> Result<GenToken<R>> {
    let kind = field(v, "kind", path)?.as_str().ok_or_else(|| bad(&format!("{path}.kind must be a string")))?;
    let i = as_usize(field(v, "i", path)?, &format!("{path}.i"))?;
    let j = || as_usize(field(v, "j", path)?, &format!("{path}.j"));
    let r = R::parse_entry(&entry_text(field(v, "r", path)?, path)?, spec).map_err(|e| locate(e, &format!("{path}.r")))?;
    Ok(match kind {
        "sl_transvection" => GenToken::SlTransvection { i, j: j()?, r },
        "sp_short" => GenToken::SpShort { i, j: j()?, r },
        "sp_short_lower" => GenToken::SpShortLower { i, j: j()?, r },
        "sp_long" => GenToken::SpLong { i, r },
        "sp_long_lower" => GenToken::SpLongLower { i, r },
        "sp_levi" => GenToken::SpLevi { i, j: j()?, r },
        other => return Err(bad(&format!("{path}: unknown token kind {other:?}"))),
    })
}

pub fn word_to_json<R: JsonRing>(w: &GenWord<R>) -> Value {
    let params: Vec<R> = w.tokens.iter().map(|t| t.param().clone()).collect();
    json!({
        "n": w.n,
        "group": serde_json::to_value(w.group).expect("group serializes"),
        "ring": R::ring_spec(&params).to_json(),
        "tokens": w.tokens.iter().map(token_to_json).collect::<Vec<_>>(),
    })
}

pub fn word_from_json<R: JsonRing>(v: &Value, default: &RingSpec) -> Result<GenWord<R>> {
    let n = as_usize(field(v, "n", "word")?, "n")?;
    let group: Group = serde_json::from_value(field(v, "group", "word")?.clone())
        .map_err(|_| bad("group must be \"sl\" or \"sp\""))?;
    let spec = match v.get("ring") {
        Some(r) => RingSpec::from_json(r)?,
        None => default.clone(),
    };
    let mut w = GenWord::new(n, group);
    for (k, t) in field(v, "tokens", "word")?
        .as_array()
        .ok_or_else(|| bad("tokens must be an array"))?
        .iter()
        .enumerate()
    {
        let t: GenToken<R> = token_from_json(t, &spec, &format!("tokens[{k}]"))?;
        if t.group() != group {
            return Err(bad(&format!("tokens[{k}]: {} does not belong to the word's group", t.kind_name())));
        }
        w.tokens.push(t);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2fact::sl2_4factor_field;

    fn roundtrip(v: &Value, f: impl Fn(&Value) -> Value) {
        let again = f(v);
        assert_eq!(&again, v);
        let text = serde_json::to_string(v).unwrap();
        assert_eq!(serde_json::to_string(&f(&parse_text(&text).unwrap())).unwrap(), text);
    }

    #[test]
    fn gaussian_matrix() {
        let m = Matrix::new(2, 2, vec![Scalar::complex(1, 2, -3, 1), Scalar::i(), Scalar::zero(), Scalar::from_int(-7)]).unwrap();
        let v = matrix_to_json(&m);
        assert_eq!(v["entries"], json!([["1/2-3*i", "i"], ["0", "-7"]]));
        let back: Matrix<Scalar> = matrix_from_json(&v, &RingSpec::Gaussian).unwrap();
        assert_eq!(back, m);
        roundtrip(&v, |v| matrix_to_json(&matrix_from_json::<Scalar>(v, &RingSpec::Gaussian).unwrap()));
    }

    #[test]
    fn bare_rows_and_numbers() {
        let v = json!([[2, 3], ["1", 2]]);
        let m: Matrix<Scalar> = matrix_from_json(&v, &RingSpec::Gaussian).unwrap();
        assert_eq!(m, Matrix::from_ints(&[&[2, 3], &[1, 2]]));
    }

    #[test]
    fn poly_matrix() {
        let v = json!({"rows": 1, "cols": 2, "ring": {"kind": "poly", "vars": ["z", "w"]}, "entries": [["z*w-1", "w^2+i*z"]]});
        let m: Matrix<Poly> = matrix_from_json(&v, &RingSpec::Gaussian).unwrap();
        assert_eq!(m.get(0, 0).vars(), &["z".to_string(), "w".to_string()]);
        roundtrip(&v, |v| matrix_to_json(&matrix_from_json::<Poly>(v, &RingSpec::Gaussian).unwrap()));
        assert!(matches!(any_matrix_from_json(&v, &RingSpec::Gaussian).unwrap(), AnyMatrix::Poly(_)));
    }

    #[test]
    fn errors_are_located() {
        let e = parse_text("{\"rows\": 2,\n \"cols\": }").unwrap_err();
        match e {
            Error::Parse { pos, .. } => assert_eq!(pos, 21),
            other => panic!("{other:?}"),
        }
        let e = matrix_from_json::<Scalar>(&json!([["1", "2+"], ["0", "1"]]), &RingSpec::Gaussian).unwrap_err();
        assert!(e.to_string().contains("entries[0][1]"), "{e}");
        let e = matrix_from_json::<Scalar>(&json!([["1", "2"], ["0"]]), &RingSpec::Gaussian).unwrap_err();
        assert!(e.to_string().contains("entries[1]"), "{e}");
        let e = matrix_from_json::<Scalar>(&json!([["z"]]), &RingSpec::Gaussian).unwrap_err();
        assert!(e.to_string().contains("entries[0][0]"), "{e}");
        let v = json!({"rows": 3, "cols": 1, "entries": [["1"]]});
        assert!(matrix_from_json::<Scalar>(&v, &RingSpec::Gaussian).is_err());
    }

    #[test]
    fn factorization_roundtrip() {
        let f = sl2_4factor_field(&Matrix::from_ints(&[&[2, 3], &[1, 2]]), None).unwrap();
        let v = unitri_to_json(&f);
        assert_eq!(v["factors"][0]["side"], "lower");
        let back: UnitriFactorization<Scalar> = unitri_from_json(&v, &RingSpec::Gaussian).unwrap();
        assert_eq!(back, f);
        roundtrip(&v, |v| unitri_to_json(&unitri_from_json::<Scalar>(v, &RingSpec::Gaussian).unwrap()));
    }

    #[test]
    fn exp_roundtrip() {
        let f = ExpFactorization {
            exponents: vec![Matrix::from_ints(&[&[0, 1], &[0, 0]])],
            target: Matrix::from_ints(&[&[1, 1], &[0, 1]]),
        };
        let v = exp_to_json(&f, true);
        assert_eq!(v["count"], 1);
        let back: ExpFactorization<Scalar> = exp_from_json(&v, &RingSpec::Gaussian).unwrap();
        assert_eq!(back, f);
        roundtrip(&v, |v| exp_to_json(&exp_from_json::<Scalar>(v, &RingSpec::Gaussian).unwrap(), true));
    }

    #[test]
    fn word_roundtrip() {
        let mut w = GenWord::new(2, Group::Sp);
        w.push(GenToken::SpLong { i: 1, r: Scalar::from_int(3) });
        w.push(GenToken::SpShortLower { i: 2, j: 1, r: Scalar::complex(0, 1, 1, 2) });
        w.push(GenToken::SpLevi { i: 1, j: 2, r: Scalar::from_int(-1) });
        let v = word_to_json(&w);
        let back: GenWord<Scalar> = word_from_json(&v, &RingSpec::Gaussian).unwrap();
        assert_eq!(back, w);
        roundtrip(&v, |v| word_to_json(&word_from_json::<Scalar>(v, &RingSpec::Gaussian).unwrap()));
        let mut bad_word = v.clone();
        bad_word["tokens"][0]["kind"] = json!("sl_transvection");
        bad_word["tokens"][0]["j"] = json!(2);
        assert!(word_from_json::<Scalar>(&bad_word, &RingSpec::Gaussian).is_err());
    }
}
