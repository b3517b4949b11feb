//! Command-line front end for `polyaut`.
//!
//! [`run`] parses arguments, executes one verb and writes either a text report
//! or (with `--json`) a single JSON object. Exit codes: 0 on success, 1 for
//! parse and usage errors, 2 when a precondition or certificate check fails;
//! in that case the report carries the failing polynomial or step.

use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use polyaut::degeneration::{
    closure_witness, degeneration_data, normalize, torus_conjugate, triangular_witness,
    verify_limit, NormalizationRecord,
};
use polyaut::groups::{nagata, parse_word, random_tame_word};
use polyaut::planefactor::{factor_plane, Rejection, RejectionReason};
use polyaut::rational::parse_rational;
use polyaut::selfcheck;
use polyaut::{parse_endo, Endo, Error, Point, Poly, Rational, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "polyaut", version, about = "Exact computations with polynomial automorphisms")]
pub struct Cli {
    /// Print one JSON object instead of text
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Degree, Jacobian determinant and shape of a map
    Info { operand: String },
    /// Composite of the operands; the rightmost is applied first
    Compose {
        #[arg(num_args = 2.., required = true)]
        operands: Vec<String>,
    },
    /// Image of a rational point, e.g. `apply "[x1 + x2^2, x2]" "(1, -2)"`
    Apply {
        operand: String,
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Triangular shear reached by the torus degeneration
    Degenerate { operand: String },
    /// Points on the degeneration curve written as words in the affine maps and the input
    Witness {
        operand: String,
        /// Comma-separated nonzero rationals
        #[arg(long, default_value = "1,-1,2,1/2", allow_hyphen_values = true)]
        samples: String,
    },
    /// The curve t -> a_t^-1 psi a_t, its specializations and the limit check
    Curve {
        operand: String,
        /// Comma-separated nonzero rationals
        #[arg(long, default_value = "1,-1,1/2", allow_hyphen_values = true)]
        samples: String,
    },
    /// Factor a plane map into affine and triangular letters
    Factor2 { operand: String },
    /// The Nagata map: inverse, Jacobian and degeneration
    Nagata,
    /// A seeded random word alternating affine and triangular letters
    RandomTame {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        length: usize,
        #[arg(long, default_value_t = 3)]
        dmax: u32,
    },
    /// Run the seeded property suites
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per suite
        #[arg(long, default_value_t = selfcheck::STANDARD_CASES)]
        cases: usize,
    },
}

/// A finished verb: text for people, JSON for scripts.
struct Report {
    text: String,
    json: Value,
}

enum Failure {
    Usage(String),
    Certificate {
        kind: &'static str,
        message: String,
        certificate: Value,
    },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::VariableOutOfRange { .. } | Error::Dimension { .. } => {
                Failure::Usage(e.to_string())
            }
            other => {
                let (kind, certificate) = certificate_of(&other);
                Failure::Certificate {
                    kind,
                    message: other.to_string(),
                    certificate,
                }
            }
        }
    }
}

fn certificate_of(e: &Error) -> (&'static str, Value) {
    match e {
        Error::NotACoordinate { f1 } => (
            "not-a-coordinate",
            json!({ "f1": f1.to_string(), "f1_at_x1_zero": "0" }),
        ),
        Error::OverringViolation {
            component,
            shift,
            residual,
        } => (
            "overring-violation",
            json!({ "component": component, "shift": shift, "residual": residual.to_string() }),
        ),
        Error::NotAnAutomorphism(r) => ("not-an-automorphism", rejection_json(r)),
        Error::NothingToNormalize => ("nothing-to-normalize", json!({})),
        Error::SingularLinearPart => ("singular-linear-part", json!({})),
        Error::InvalidSample => ("invalid-sample", json!({ "t0": "0" })),
        Error::NormalizationRequired(why) => ("normalization-required", json!({ "reason": why })),
        Error::CrossCheck(why) => ("cross-check", json!({ "reason": why })),
        Error::DegenerateInput => ("degenerate-input", json!({})),
        other => ("precondition", json!({ "reason": other.to_string() })),
    }
}

fn rejection_json(r: &Rejection) -> Value {
    let reason = match &r.reason {
        RejectionReason::NonConstantJacobian { jacobian } => {
            json!({ "kind": "non-constant-jacobian", "jacobian": jacobian.to_string() })
        }
        RejectionReason::Divisibility { d1, d2 } => {
            json!({ "kind": "divisibility", "d1": d1, "d2": d2 })
        }
        RejectionReason::NotProportional { larger, smaller, k } => json!({
            "kind": "not-proportional",
            "larger": larger.to_string(),
            "smaller": smaller.to_string(),
            "k": k,
        }),
        RejectionReason::NoDecrease { before, after } => {
            json!({ "kind": "no-decrease", "before": [before.0, before.1], "after": [after.0, after.1] })
        }
        RejectionReason::SingularAffine => json!({ "kind": "singular-affine" }),
    };
    json!({
        "reason": reason,
        "at": r.at.to_string(),
        "steps": r.steps.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

/// An operand is an endomorphism when it starts with `[` or `(`, otherwise a word.
enum Operand {
    Map(Endo),
    Word(Word),
}

impl Operand {
    fn endo(&self) -> Result<Endo, Failure> {
        match self {
            Operand::Map(e) => Ok(e.clone()),
            Operand::Word(w) => Ok(w.to_endo()?),
        }
    }
}

struct Input<'a> {
    stdin: &'a mut dyn Read,
    cached: Option<String>,
}

impl Input<'_> {
    fn operand(&mut self, text: &str) -> Result<Operand, Failure> {
        let text = if text == "-" {
            if self.cached.is_none() {
                let mut buf = String::new();
                self.stdin
                    .read_to_string(&mut buf)
                    .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
                self.cached = Some(buf);
            }
            self.cached.clone().unwrap_or_default()
        } else {
            text.to_string()
        };
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Failure::Usage("empty operand".into()));
        }
        if trimmed.starts_with('[') || trimmed.starts_with('(') {
            Ok(Operand::Map(parse_endo(trimmed)?))
        } else {
            Ok(Operand::Word(parse_word(trimmed)?))
        }
    }

    fn endo(&mut self, text: &str) -> Result<Endo, Failure> {
        self.operand(text)?.endo()
    }
}

fn parse_rationals(text: &str) -> Result<Vec<Rational>, Failure> {
    let inner = text
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|s| parse_rational(s.trim()).map_err(Failure::from))
        .collect()
}

fn degree_json(e: &Endo) -> Value {
    e.degree().map_or(Value::Null, Value::from)
}

fn degree_text(e: &Endo) -> String {
    e.degree().map_or_else(|_| "-inf".to_string(), |d| d.to_string())
}

fn normalization_json(r: &NormalizationRecord) -> Value {
    json!({
        "result": r.result.to_string(),
        "affine_correction": r.applied_affine_inverse.as_ref().map(ToString::to_string),
        "transposition": r.applied_transposition.map(|(i, j)| vec![i, j]),
    })
}

fn normalization_text(r: &NormalizationRecord) -> String {
    let mut notes = Vec::new();
    if let Some(a) = &r.applied_affine_inverse {
        notes.push(format!("affine correction {a}"));
    }
    if let Some((i, j)) = r.applied_transposition {
        notes.push(format!("transposition ({i}, {j})"));
    }
    if notes.is_empty() {
        r.result.to_string()
    } else {
        format!("{}  ({})", r.result, notes.join(", "))
    }
}

fn info(input: &mut Input, operand: &str) -> Result<Report, Failure> {
    let op = input.operand(operand)?;
    let e = op.endo()?;
    let jac = e.jacobian_det();
    let word = match &op {
        Operand::Word(w) => Some(w.to_string()),
        Operand::Map(_) => None,
    };
    let mut text = String::new();
    if let Some(w) = &word {
        text += &format!("word        {w}\n");
    }
    text += &format!(
        "map         {e}\nn           {}\ndegree      {}\njacobian    {jac}\naffine      {}\ntriangular  {}\naffine part {}\n",
        e.n(),
        degree_text(&e),
        e.is_affine(),
        e.is_triangular(),
        e.affine_part(),
    );
    Ok(Report {
        text,
        json: json!({
            "word": word,
            "map": e.to_string(),
            "n": e.n(),
            "degree": degree_json(&e),
            "jacobian": jac.to_string(),
            "affine": e.is_affine(),
            "triangular": e.is_triangular(),
            "affine_part": e.affine_part().to_string(),
        }),
    })
}

fn compose(input: &mut Input, operands: &[String]) -> Result<Report, Failure> {
    let maps = operands
        .iter()
        .map(|o| input.endo(o))
        .collect::<Result<Vec<_>, _>>()?;
    let mut acc = maps.last().cloned().expect("at least two operands");
    for m in maps.iter().rev().skip(1) {
        acc = m.compose(&acc)?;
    }
    Ok(Report {
        text: format!("{acc}\ndegree {}\n", degree_text(&acc)),
        json: json!({ "result": acc.to_string(), "degree": degree_json(&acc) }),
    })
}

fn apply(input: &mut Input, operand: &str, point: &str) -> Result<Report, Failure> {
    let e = input.endo(operand)?;
    let p = Point(parse_rationals(point)?);
    if p.0.len() != e.n() {
        return Err(Failure::Usage(format!(
            "point has {} coordinates, map has {}",
            p.0.len(),
            e.n()
        )));
    }
    let v = e.eval(&p)?;
    Ok(Report {
        text: format!("{v}\n"),
        json: json!({
            "point": p.0.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "value": v.0.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
    })
}

fn degenerate(input: &mut Input, operand: &str) -> Result<Report, Failure> {
    let phi = input.endo(operand)?;
    let record = normalize(&phi)?;
    let data = degeneration_data(&record.result)?;
    let limit = triangular_witness(&phi)?;
    Ok(Report {
        text: format!(
            "input      {phi}\nnormalized {}\ng0         {}\nw          {}\nh          {}\nd          {}\nlimit      {limit}\n",
            normalization_text(&record),
            data.g0,
            data.w,
            data.h,
            data.d,
        ),
        json: json!({
            "input": phi.to_string(),
            "normalized": normalization_json(&record),
            "g0": data.g0.to_string(),
            "w": data.w,
            "h": data.h.to_string(),
            "d": data.d,
            "limit": limit.to_string(),
        }),
    })
}

fn witness(input: &mut Input, operand: &str, samples: &str) -> Result<Report, Failure> {
    let phi = input.endo(operand)?;
    let samples = parse_rationals(samples)?;
    let points = closure_witness(&phi, &samples)?;
    let limit = triangular_witness(&phi)?;
    let mut text = format!("input {phi}\n");
    for pt in &points {
        text += &format!(
            "t = {}: {}  (degree {})\n  word {}\n",
            pt.t0,
            pt.map,
            degree_text(&pt.map),
            pt.word
        );
    }
    text += &format!("t = 0: {limit}\n");
    Ok(Report {
        text,
        json: json!({
            "input": phi.to_string(),
            "points": points.iter().map(|pt| json!({
                "t0": pt.t0.to_string(),
                "map": pt.map.to_string(),
                "degree": degree_json(&pt.map),
                "word": pt.word.to_string(),
            })).collect::<Vec<_>>(),
            "limit": limit.to_string(),
        }),
    })
}

fn curve(input: &mut Input, operand: &str, samples: &str) -> Result<Report, Failure> {
    let phi = input.endo(operand)?;
    let samples = parse_rationals(samples)?;
    if samples.iter().any(|s| *s == polyaut::rational::zero()) {
        return Err(Error::InvalidSample.into());
    }
    let record = normalize(&phi)?;
    let psi = &record.result;
    let data = degeneration_data(psi)?;
    let c = torus_conjugate(psi, data.w)?;
    let limit = triangular_witness(&phi)?;
    let report = verify_limit(&c, &limit)?;
    let specs: Vec<(Rational, Endo)> = samples
        .iter()
        .map(|t0| (t0.clone(), c.specialize(t0)))
        .collect();

    let valuations: Vec<Value> = report
        .valuations
        .iter()
        .map(|v| v.map_or(Value::Null, Value::from))
        .collect();
    let val_text: Vec<String> = report
        .valuations
        .iter()
        .map(|v| v.map_or_else(|| "inf".to_string(), |k| k.to_string()))
        .collect();
    let mut text = format!(
        "input      {phi}\nnormalized {}\nw          {}\nd          {}\ncurve      {c}\n",
        normalization_text(&record),
        data.w,
        data.d
    );
    for (t0, s) in &specs {
        text += &format!("t = {t0}: {s}  (degree {})\n", degree_text(s));
    }
    text += &format!(
        "limit      {limit}\nh          {}\nvaluations [{}]\npass       {}\n",
        report.h,
        val_text.join(", "),
        report.pass
    );
    let json = json!({
        "input": phi.to_string(),
        "normalized": normalization_json(&record),
        "g0": data.g0.to_string(),
        "curve": c.to_string(),
        "specializations": specs.iter().map(|(t0, s)| json!({
            "t0": t0.to_string(),
            "map": s.to_string(),
            "degree": degree_json(s),
        })).collect::<Vec<_>>(),
        "limit": limit.to_string(),
        "w": report.w,
        "d": report.d,
        "h": report.h.to_string(),
        "valuations": valuations,
        "pass": report.pass,
    });
    if !report.pass {
        return Err(Failure::Certificate {
            kind: "limit-check",
            message: format!("limit check failed; valuations [{}]", val_text.join(", ")),
            certificate: json,
        });
    }
    Ok(Report { text, json })
}

fn factor2(input: &mut Input, operand: &str) -> Result<Report, Failure> {
    let sigma = input.endo(operand)?;
    let f = factor_plane(&sigma)?;
    let steps: Vec<String> = f.steps.iter().map(ToString::to_string).collect();
    let mut text = format!("input {sigma}\nword  {}\nsteps\n", f.word);
    for s in &steps {
        text += &format!("  {s}\n");
    }
    Ok(Report {
        text,
        json: json!({
            "input": sigma.to_string(),
            "word": f.word.to_string(),
            "letters": f.word.len(),
            "steps": steps,
        }),
    })
}

fn nagata_report() -> Result<Report, Failure> {
    let (n, inv) = nagata();
    let id = Endo::identity(3);
    let inverse_ok = n.compose(&inv)? == id && inv.compose(&n)? == id;
    let jac = n.jacobian_det();
    let record = normalize(&n)?;
    let data = degeneration_data(&record.result)?;
    let limit = triangular_witness(&n)?;
    let ok = inverse_ok && jac == Poly::one(3);
    let json = json!({
        "map": n.to_string(),
        "inverse": inv.to_string(),
        "inverse_check": inverse_ok,
        "jacobian": jac.to_string(),
        "degree": degree_json(&n),
        "g0": data.g0.to_string(),
        "w": data.w,
        "h": data.h.to_string(),
        "limit": limit.to_string(),
    });
    if !ok {
        return Err(Failure::Certificate {
            kind: "cross-check",
            message: "Nagata inverse or Jacobian check failed".into(),
            certificate: json,
        });
    }
    Ok(Report {
        text: format!(
            "map      {n}\ninverse  {inv}\ncheck    N N^-1 = N^-1 N = id\njacobian {jac}\ndegree   {}\ng0       {}\nw        {}\nlimit    {limit}\n",
            degree_text(&n),
            data.g0,
            data.w
        ),
        json,
    })
}

fn random_tame(n: usize, seed: u64, length: usize, dmax: u32) -> Result<Report, Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let w = random_tame_word(n, seed, length, dmax);
    let e = w.to_endo()?;
    Ok(Report {
        text: format!("word   {w}\nmap    {e}\ndegree {}\n", degree_text(&e)),
        json: json!({
            "n": n,
            "seed": seed,
            "length": length,
            "dmax": dmax,
            "word": w.to_string(),
            "map": e.to_string(),
            "degree": degree_json(&e),
        }),
    })
}

fn selfcheck_report(seed: u64, cases: usize) -> Result<Report, Failure> {
    let reports = selfcheck::run_all(seed, cases);
    let ok = reports.iter().all(selfcheck::SuiteReport::ok);
    let text: String = reports.iter().map(|r| format!("{r}\n")).collect();
    let json = json!({
        "seed": seed,
        "suites": reports.iter().map(|r| json!({
            "name": r.name,
            "passed": r.passed(),
            "total": r.total,
            "failures": r.failures.iter().map(|f| json!({
                "index": f.index,
                "seed": f.seed,
                "detail": f.detail,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "pass": ok,
    });
    if !ok {
        return Err(Failure::Certificate {
            kind: "selfcheck",
            message: text,
            certificate: json,
        });
    }
    Ok(Report { text, json })
}

fn execute(cli: &Cli, input: &mut Input) -> Result<Report, Failure> {
    match &cli.verb {
        Verb::Info { operand } => info(input, operand),
        Verb::Compose { operands } => compose(input, operands),
        Verb::Apply { operand, point } => apply(input, operand, point),
        Verb::Degenerate { operand } => degenerate(input, operand),
        Verb::Witness { operand, samples } => witness(input, operand, samples),
        Verb::Curve { operand, samples } => curve(input, operand, samples),
        Verb::Factor2 { operand } => factor2(input, operand),
        Verb::Nagata => nagata_report(),
        Verb::RandomTame {
            n,
            seed,
            length,
            dmax,
        } => random_tame(*n, *seed, *length, *dmax),
        Verb::Selfcheck { seed, cases } => selfcheck_report(*seed, *cases),
    }
}

fn print_json(out: &mut dyn Write, v: &Value) {
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("values are serializable")
    );
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut input = Input {
        stdin,
        cached: None,
    };
    match execute(&cli, &mut input) {
        Ok(report) => {
            if cli.json {
                print_json(out, &report.json);
            } else {
                let _ = write!(out, "{}", report.text);
            }
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            if cli.json {
                print_json(out, &json!({ "error": "usage", "message": msg }));
            } else {
                let _ = writeln!(err, "error: {msg}");
            }
            EXIT_USAGE
        }
        Err(Failure::Certificate {
            kind,
            message,
            certificate,
        }) => {
            if cli.json {
                print_json(
                    out,
                    &json!({ "error": kind, "message": message, "certificate": certificate }),
                );
            } else {
                let _ = writeln!(err, "error ({kind}): {message}");
                let _ = writeln!(
                    err,
                    "certificate: {}",
                    serde_json::to_string(&certificate).expect("serializable")
                );
            }
            EXIT_CERTIFICATE
        }
    }
}
