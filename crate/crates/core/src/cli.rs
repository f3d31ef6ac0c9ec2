//! Command line front end.
//!
//! Every subcommand reads one JSON document (a file path or stdin) and
//! writes one JSON document to stdout. Exit codes: 0 on success, 1 when an
//! exact re-verification fails, 2 on parse, usage or precondition errors.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::expfact::{exp_factor_sp, group_exponentials, nilpotent_log, ExpFactorization};
use crate::json::{
    any_matrix_from_json, exp_from_json, exp_to_json, matrix_from_json, matrix_ring, matrix_to_json, parse_text,
    unitri_from_json, unitri_to_json, word_from_json, word_to_json, AnyMatrix, JsonRing, RingSpec,
};
use crate::matrix::{Matrix, SymplecticForm};
use crate::obstruction::{degree_obstruction_check, gamma, restriction_loop};
use crate::ring::{parse_poly, parse_scalar, Poly, Ring, Scalar};
use crate::selftest;
use crate::sl2fact::{sl2_4factor_field, sl2_4factor_poly_try, sl2_euclid_factor, PolyAttempt, UnitriFactorization};
use crate::spfact::unitriangular_factor_sp;
use crate::sympgen::{eval_word, expand_type_i_to_elementary, expand_type_ii_to_elementary, make_factor, SympFactor};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "sympfact", version, about = "Exact unitriangular and exponential factorization of SL2 and symplectic matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum RingArg {
    Gaussian,
    Poly,
}

#[derive(clap::Args, Debug, Clone)]
pub struct InputArgs {
    /// JSON input file; stdin when omitted or `-`.
    pub input: Option<PathBuf>,
    /// Ring of matrices that do not name one.
    #[arg(long, value_enum, default_value = "gaussian")]
    pub ring: RingArg,
    /// Variables of the polynomial ring, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "z")]
    pub vars: Vec<String>,
}

impl InputArgs {
    fn default_ring(&self) -> RingSpec {
        match self.ring {
            RingArg::Gaussian => RingSpec::Gaussian,
            RingArg::Poly => RingSpec::Poly(self.vars.clone()),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Four alternating unitriangular factors of an SL2 matrix.
    FactorSl2 {
        #[command(flatten)]
        input: InputArgs,
        /// Value of the third parameter in the generic case.
        #[arg(long)]
        g3: Option<String>,
        /// Exit 1 unless the output has exactly this many factors.
        #[arg(long)]
        count_check: Option<usize>,
    },
    /// Four alternating unitriangular factors of a symplectic matrix.
    FactorSp {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        count_check: Option<usize>,
    },
    /// Exponential factorization of a symplectic or unipotent matrix, or
    /// regrouping of a unitriangular factorization.
    ExpFactor {
        #[command(flatten)]
        input: InputArgs,
        /// Drop zero exponents.
        #[arg(long)]
        trim: bool,
        #[arg(long)]
        count_check: Option<usize>,
    },
    /// Elementary symplectic word of `[[I, B], [0, I]]` for symmetric `B`.
    ExpandElementary {
        #[command(flatten)]
        input: InputArgs,
        /// Expand `[[I, 0], [B, I]]` instead.
        #[arg(long)]
        lower: bool,
    },
    /// Winding-number obstruction to continuous four-factor factorization.
    ObstructionDemo {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// Also write the sampled loops as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-check a factorization, exponential factorization or word file.
    Verify {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run the randomized invariant suites.
    Selftest {
        #[arg(long)]
        parallel: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

/// Outcome of a subcommand: the document to print and the exit code.
struct Outcome {
    doc: Value,
    code: i32,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome { doc, code: 0 }
    }

    fn checked(doc: Value, verified: bool) -> Self {
        Outcome { doc, code: if verified { 0 } else { 1 } }
    }
}

fn read_input(args: &InputArgs, stdin: &mut dyn Read) -> Result<Value, Error> {
    let mut text = String::new();
    match &args.input {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| Error::InvalidArgument(format!("cannot read stdin: {e}")))?;
        }
    }
    parse_text(&text)
}

/// The factorization object with `verified`, `count` and per-check results
/// merged in.
fn unitri_report<R: JsonRing>(f: &UnitriFactorization<R>, extra: &[(&str, Value)]) -> (Value, bool) {
    let product = f.product().map(|p| p == f.target).unwrap_or(false);
    let sides: Vec<bool> = f.factors.iter().map(|(s, m)| f.side_ok(*s, m)).collect();
    let verified = f.verify().is_ok();
    let mut doc = unitri_to_json(f);
    let obj = doc.as_object_mut().expect("object");
    obj.insert("verified".into(), json!(verified));
    obj.insert("count".into(), json!(f.len()));
    obj.insert("checks".into(), json!({"product": product, "sides": sides}));
    for (k, v) in extra {
        obj.insert(k.to_string(), v.clone());
    }
    (doc, verified)
}

fn count_ok(doc: &mut Value, count: usize, expect: Option<usize>) -> bool {
    match expect {
        None => true,
        Some(t) => {
            let ok = count == t;
            doc["count_check"] = json!({"expected": t, "ok": ok});
            ok
        }
    }
}

fn factor_sl2(input: &InputArgs, g3: Option<&str>, count: Option<usize>, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    let v = read_input(input, stdin)?;
    let (mut doc, verified, n) = match any_matrix_from_json(&v, &input.default_ring())? {
        AnyMatrix::Gaussian(m) => {
            let g3 = g3.map(parse_scalar).transpose()?;
            let f = sl2_4factor_field(&m, g3.as_ref())?;
            let (doc, ok) = unitri_report(&f, &[("method", json!("four_factor"))]);
            (doc, ok, f.len())
        }
        AnyMatrix::Poly(m) => {
            let vars: Vec<String> = match matrix_ring(&v)?.unwrap_or_else(|| input.default_ring()) {
                RingSpec::Poly(vars) => vars,
                RingSpec::Gaussian => Vec::new(),
            };
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            let g3 = match g3 {
                Some(t) => parse_poly(t, &names)?,
                None => Poly::one(),
            };
            match sl2_4factor_poly_try(&m, &g3)? {
                PolyAttempt::Factored(f) => {
                    let (doc, ok) = unitri_report(&f, &[("method", json!("four_factor"))]);
                    (doc, ok, f.len())
                }
                PolyAttempt::Failed(fail) => match sl2_euclid_factor(&m) {
                    Ok(f) => {
                        let extra = [("method", json!("euclid")), ("four_factor_failure", json!(fail))];
                        let (doc, ok) = unitri_report(&f, &extra);
                        (doc, ok, f.len())
                    }
                    Err(Error::NotUnivariate(_)) => {
                        return Ok(Outcome::ok(json!({"factored": false, "four_factor_failure": fail})));
                    }
                    Err(e) => return Err(e),
                },
            }
        }
    };
    let counted = count_ok(&mut doc, n, count);
    Ok(Outcome::checked(doc, verified && counted))
}

fn gaussian_input(input: &InputArgs, stdin: &mut dyn Read, what: &str) -> Result<Matrix<Scalar>, Error> {
    let v = read_input(input, stdin)?;
    match any_matrix_from_json(&v, &input.default_ring())? {
        AnyMatrix::Gaussian(m) => Ok(m),
        AnyMatrix::Poly(_) => Err(Error::InvalidArgument(format!("{what} needs a matrix over the gaussian ring"))),
    }
}

fn factor_sp(input: &InputArgs, count: Option<usize>, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    let m = gaussian_input(input, stdin, "factor-sp")?;
    if m.rows() % 2 != 0 || !m.is_symplectic(&SymplecticForm::j(m.rows() / 2))? {
        return Err(Error::NotSymplectic);
    }
    let f = unitriangular_factor_sp(&m)?;
    let form = SymplecticForm::j(m.rows() / 2);
    let symplectic: Vec<bool> = f.factors.iter().map(|(_, x)| x.is_symplectic(&form).unwrap_or(false)).collect();
    let (mut doc, verified) = unitri_report(&f, &[]);
    doc["checks"]["symplectic"] = json!(symplectic);
    let verified = verified && symplectic.iter().all(|&b| b);
    doc["verified"] = json!(verified);
    let counted = count_ok(&mut doc, f.len(), count);
    Ok(Outcome::checked(doc, verified && counted))
}

fn exp_report<R: JsonRing>(e: ExpFactorization<R>, trim: bool, count: Option<usize>, sp: Option<bool>) -> Outcome {
    let e = if trim { e.trimmed() } else { e };
    let verified = e.verify().is_ok() && sp.unwrap_or(true);
    let mut doc = exp_to_json(&e, verified);
    if let Some(s) = sp {
        doc["in_sp"] = json!(s);
    }
    let counted = count_ok(&mut doc, e.len(), count);
    Outcome::checked(doc, verified && counted)
}

fn exp_factor(input: &InputArgs, trim: bool, count: Option<usize>, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    let v = read_input(input, stdin)?;
    let ring = input.default_ring();
    if v.get("factors").is_some() {
        let target_ring = v.get("target").map(matrix_ring).transpose()?.flatten().unwrap_or_else(|| ring.clone());
        return Ok(match target_ring {
            RingSpec::Gaussian => exp_report(group_exponentials(&unitri_from_json::<Scalar>(&v, &ring)?)?, trim, count, None),
            RingSpec::Poly(_) => exp_report(group_exponentials(&unitri_from_json::<Poly>(&v, &ring)?)?, trim, count, None),
        });
    }
    let m = match any_matrix_from_json(&v, &ring)? {
        AnyMatrix::Gaussian(m) => m,
        AnyMatrix::Poly(m) => {
            let n = nilpotent_log(&m)?;
            let e = ExpFactorization { exponents: vec![n], target: m };
            return Ok(exp_report(e, trim, count, None));
        }
    };
    let dim = m.rows();
    if m.is_square() && dim % 2 == 0 && m.is_symplectic(&SymplecticForm::j(dim / 2))? {
        let e = exp_factor_sp(&m)?;
        let in_sp = e.exponents_in_sp(&SymplecticForm::j(dim / 2))?;
        return Ok(exp_report(e, trim, count, Some(in_sp)));
    }
    match nilpotent_log(&m) {
        Ok(n) => Ok(exp_report(ExpFactorization { exponents: vec![n], target: m }, trim, count, None)),
        Err(Error::NotUnipotent) => Err(Error::InvalidArgument(
            "exp-factor needs a symplectic matrix, a unipotent matrix or a unitriangular factorization".into(),
        )),
        Err(e) => Err(e),
    }
}

fn expand_elementary(input: &InputArgs, lower: bool, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    let v = read_input(input, stdin)?;
    fn go<R: JsonRing>(b: &Matrix<R>, lower: bool) -> Result<Outcome, Error> {
        let n = b.rows();
        let (w, f) = if lower {
            (expand_type_ii_to_elementary(b)?, make_factor(&SympFactor::TypeII(b.clone()), n)?)
        } else {
            (expand_type_i_to_elementary(b)?, make_factor(&SympFactor::TypeI(b.clone()), n)?)
        };
        let verified = eval_word(&w)? == f;
        let bound = n * (n + 1) / 2;
        let doc = json!({
            "word": word_to_json(&w),
            "matrix": matrix_to_json(&f),
            "count": w.len(),
            "bound": bound,
            "verified": verified,
        });
        Ok(Outcome::checked(doc, verified && w.len() <= bound))
    }
    match any_matrix_from_json(&v, &input.default_ring())? {
        AnyMatrix::Gaussian(b) => go(&b, lower),
        AnyMatrix::Poly(b) => go(&b, lower),
    }
}

fn obstruction_demo(radius: f64, samples: usize, csv: Option<&PathBuf>) -> Result<Outcome, Error> {
    let report = degree_obstruction_check(radius, samples)?;
    if let Some(path) = csv {
        let mut out = String::from("c,k,re,im\n");
        for c in [gamma(0.0), gamma(1.0)] {
            for (k, p) in restriction_loop(c, radius, samples).points.iter().enumerate() {
                out.push_str(&format!("{c},{k},{},{}\n", p.re, p.im));
            }
        }
        std::fs::write(path, out).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
    }
    let doc = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome::checked(doc, report.obstructed))
}

fn verify_doc<R: JsonRing>(v: &Value, ring: &RingSpec) -> Result<Outcome, Error> {
    let (kind, result) = if v.get("factors").is_some() {
        ("unitriangular", unitri_from_json::<R>(v, ring)?.verify())
    } else if v.get("exponents").is_some() {
        ("exponential", exp_from_json::<R>(v, ring)?.verify())
    } else if let Some(w) = v.get("word") {
        let w = word_from_json::<R>(w, ring)?;
        let target = matrix_from_json::<R>(v.get("matrix").ok_or_else(|| Error::Parse { pos: 0, msg: "missing field \"matrix\"".into() })?, ring)?;
        let ok = eval_word(&w)? == target;
        ("word", if ok { Ok(()) } else { Err(Error::Consistency("word does not evaluate to matrix".into())) })
    } else {
        return Err(Error::Parse { pos: 0, msg: "expected a factorization, an exponential factorization or a word".into() });
    };
    Ok(match result {
        Ok(()) => Outcome::ok(json!({"kind": kind, "verified": true})),
        Err(e) => Outcome::checked(json!({"kind": kind, "verified": false, "reason": e.to_string()}), false),
    })
}

fn verify(input: &InputArgs, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    let v = read_input(input, stdin)?;
    let ring = input.default_ring();
    let probe = v
        .get("target")
        .or_else(|| v.get("matrix"))
        .map(matrix_ring)
        .transpose()?
        .flatten()
        .unwrap_or_else(|| ring.clone());
    match probe {
        RingSpec::Gaussian => verify_doc::<Scalar>(&v, &ring),
        RingSpec::Poly(_) => verify_doc::<Poly>(&v, &ring),
    }
}

fn selftest_cmd(parallel: bool, seed: u64, cases: usize) -> Outcome {
    let reports = selftest::run_all(&selftest::Config { seed, cases, parallel });
    let passed = reports.iter().all(selftest::SuiteReport::passed);
    Outcome::checked(json!({"passed": passed, "seed": seed, "suites": reports}), passed)
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    match &cli.command {
        Command::FactorSl2 { input, g3, count_check } => factor_sl2(input, g3.as_deref(), *count_check, stdin),
        Command::FactorSp { input, count_check } => factor_sp(input, *count_check, stdin),
        Command::ExpFactor { input, trim, count_check } => exp_factor(input, *trim, *count_check, stdin),
        Command::ExpandElementary { input, lower } => expand_elementary(input, *lower, stdin),
        Command::ObstructionDemo { radius, samples, csv } => obstruction_demo(*radius, *samples, csv.as_ref()),
        Command::Verify { input } => verify(input, stdin),
        Command::Selftest { parallel, seed, cases } => Ok(selftest_cmd(*parallel, *seed, *cases)),
    }
}

/// Parse `args` (including the program name), run the subcommand and
/// return the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, stdin) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.doc).expect("JSON values serialize");
            let _ = writeln!(stdout, "{text}");
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["sympfact"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn factor_sl2_example() {
        let (code, out, _) = call(&["factor-sl2"], "[[2,3],[1,2]]");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verified"], true);
        assert_eq!(v["factors"].as_array().unwrap().len(), 4);
        let (code, _, _) = call(&["factor-sl2", "--count-check", "3"], "[[2,3],[1,2]]");
        assert_eq!(code, 1);
    }

    #[test]
    fn usage_and_parse_errors() {
        assert_eq!(call(&["factor-sl2", "--bogus"], "").0, 2);
        assert_eq!(call(&[], "").0, 2);
        let (code, _, err) = call(&["factor-sl2"], "[[2,3],[1,");
        assert_eq!(code, 2);
        assert!(err.contains("parse error"), "{err}");
        assert_eq!(call(&["factor-sl2"], "[[2,3],[1,1]]").0, 2);
        assert_eq!(call(&["factor-sp"], "[[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]").0, 2);
    }

    #[test]
    fn verify_detects_tampering() {
        let (_, out, _) = call(&["factor-sl2"], "[[2,3],[1,2]]");
        assert_eq!(call(&["verify"], &out).0, 0);
        let mut v: Value = serde_json::from_str(&out).unwrap();
        v["factors"][1]["matrix"]["entries"][0][1] = json!("5");
        assert_eq!(call(&["verify"], &v.to_string()).0, 1);
    }

    #[test]
    fn obstruction_demo_degrees() {
        let (code, out, _) = call(&["obstruction-demo"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["degree_start"].as_i64(), v["degree_end"].as_i64()), (Some(2), Some(1)));
        assert_eq!(v["obstructed"], true);
    }

    #[test]
    fn poly_factor_falls_back_to_euclid() {
        let m = json!({"rows": 2, "cols": 2, "ring": {"kind": "poly", "vars": ["z"]},
                       "entries": [["z^2+1", "z"], ["z", "1"]]});
        let (code, out, _) = call(&["factor-sl2"], &m.to_string());
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verified"], true);
        assert_eq!(call(&["verify"], &out).0, 0);
    }
}
