//! Acceptance criteria 1-8, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use serde_json::Value;

use polyaut::degeneration::{degeneration_data, torus_conjugate, triangular_witness};
use polyaut::groups::{nagata, parse_word, random_tame_word};
use polyaut::rational::int;
use polyaut::selfcheck::{self, SuiteReport};
use polyaut::{parse_endo, Endo, Monomial, Poly, Rational};

const SEED: u64 = 0;

type Dict = BTreeMap<Vec<u32>, Rational>;

fn var(i: usize) -> Dict {
    let mut e = vec![0; 3];
    e[i - 1] = 1;
    Dict::from([(e, int(1))])
}

fn scale(a: &Dict, c: i64) -> Dict {
    a.iter().map(|(k, v)| (k.clone(), v * int(c))).collect()
}

fn add(a: &Dict, b: &Dict) -> Dict {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(k.clone()).or_insert_with(Rational::zero) += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn mul(a: &Dict, b: &Dict) -> Dict {
    let mut out = Dict::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let k = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            *out.entry(k).or_insert_with(Rational::zero) += va * vb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn to_poly(d: &Dict) -> Poly {
    d.iter().fold(Poly::zero(3), |acc, (e, c)| {
        acc + Poly::term(3, Monomial::new(e, 0), c.clone())
    })
}

/// Substitute `(t^3 x1, t x2, t x3)`, divide by `t^shift`, set `t = 0`.
fn torus_limit(f: &Dict, shift: u32) -> Dict {
    f.iter()
        .filter_map(|(e, c)| {
            let weight = 3 * e[0] + e[1] + e[2];
            assert!(weight >= shift, "t^-{} survives", shift - weight);
            (weight == shift).then(|| (e.clone(), c.clone()))
        })
        .collect()
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let (x1, x2, x3) = (var(1), var(2), var(3));
    let delta = add(&mul(&x2, &x2), &mul(&x1, &x3));
    let f1 = add(
        &add(&x1, &scale(&mul(&x2, &delta), -2)),
        &scale(&mul(&x3, &mul(&delta, &delta)), -1),
    );
    let f2 = add(&x2, &mul(&x3, &delta));
    let oracle = Endo::new(vec![
        to_poly(&torus_limit(&f1, 3)),
        to_poly(&torus_limit(&f2, 1)),
        to_poly(&torus_limit(&x3, 1)),
    ])
    .unwrap();
    let golden = parse_endo("[x1 - 2*x2^3, x2, x3]").unwrap();
    if oracle != golden {
        return Err(format!("oracle gives {oracle}"));
    }

    let (n, _) = nagata();
    let data = degeneration_data(&n).map_err(|e| e.to_string())?;
    let g0 = polyaut::parse_poly("-2*x2^3 - x3*x2^4", 3).unwrap();
    let h = polyaut::parse_poly("-2*x2^3", 3).unwrap();
    if data.g0 != g0 || data.w != 3 || data.h != h {
        return Err(format!("data g0 = {}, w = {}, h = {}", data.g0, data.w, data.h));
    }
    let limit_path = torus_conjugate(&n, 3)
        .map_err(|e| e.to_string())?
        .specialize(&int(0));
    let formula_path = triangular_witness(&n).map_err(|e| e.to_string())?;
    if limit_path != golden || formula_path != golden {
        return Err(format!("limit path {limit_path}, formula path {formula_path}"));
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:.2?}"));
    }
    Ok(format!("w = 3, limit {golden}, {elapsed:.2?}"))
}

fn suites(reports: &[SuiteReport], limit: Option<Duration>) -> Result<String, String> {
    let mut notes = Vec::new();
    for r in reports {
        if !r.ok() {
            return Err(r.to_string());
        }
        if let Some(l) = limit {
            if r.elapsed >= l {
                return Err(format!("{} took {:.2?}", r.name, r.elapsed));
            }
        }
        notes.push(format!("{}/{} {} in {:.2?}", r.passed(), r.total, r.name, r.elapsed));
    }
    Ok(notes.join("; "))
}

fn criterion_5() -> Result<String, String> {
    let words = suites(&[selfcheck::inversion_suite(100, SEED)], None)?;
    let (n, inv) = nagata();
    let id = Endo::identity(3);
    if n.compose(&inv).unwrap() != id || inv.compose(&n).unwrap() != id {
        return Err("N and its inverse do not compose to the identity".into());
    }
    if n.jacobian_det() != Poly::one(3) {
        return Err(format!("jacobian(N) = {}", n.jacobian_det()));
    }
    Ok(format!("{words}; Nagata inverse and unit Jacobian exact"))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("polyaut").chain(args.iter().copied());
    let code = polyaut_cli::run(argv, &mut Cursor::new(Vec::new()), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

const CORPUS: &[&str] = &[
    "[x1 + x2^2, x2]",
    "[x - 2*y*(y^2+x*z) - z*(y^2+x*z)^2, y + z*(y^2+x*z), z]",
    "[x1, x1]",
    "[x1, x2 + x1^2]",
    "[x1, x1*x2]",
    "[x1 + x2, x1]",
    "[x1 + (x1+x2)^2, x1 + x2]",
    "[x1 + 2*x2 + 3, x2]",
    "[x1 + 3 + 2*x2 + x2^2, x2]",
    "[x1 + x2^2 + x2^3, x2]",
    "[x1 + x2^2 + x2^3/2, x2]",
    "[x1 + x2^2, x2 + x1^2]",
    "[x1 + x2^2/2, x2]",
    "[x1 + x2^2*x3 + x2^5, x2, x3]",
    "[x1 + x2^2*x3, x2, x3]",
    "[x1 + x2^3, 2*x2 + 5, x3]",
    "[x1 - 2*x2^3, x2, x3]",
    "[x1 + x2, x2 + 1]",
    "[x1 + x2^2 + x3, x2 + x3^2, x3 + 1]",
    "[x1 + x2^3, x2]",
    "[x1, x1 + x2]",
    "[x1/2 - x2^2/2, x2]",
    "[x1/2, x2]",
    "[x1^2, x2]",
    "[x1*x2 + x1, x2]",
    "[x1*x2, x2]",
    "[x1 - x2^2, x2]",
    "[x2 + x1^2, x1]",
    "[x2 + x3, x2 - x3, x1]",
    "[x2, x1]",
    "[x2, x1 + x2^2]",
    "[0, 0]",
    "[-7/3]",
];

fn criterion_8() -> Result<String, String> {
    let (code, out, _) = cli(&["degenerate", "[x1, x2 + x1^2]"]);
    if code != 0 || !out.contains("[x1 + x2^2, x2]") || !out.lines().any(|l| l.split_whitespace().eq(["w", "2"])) {
        return Err(format!("degenerate: exit {code}\n{out}"));
    }

    let (code, out, _) = cli(&["curve", "--samples", "1,-1,1/2", "nagata"]);
    let degrees = out.matches("(degree 5)").count();
    if code != 0 || degrees != 3 || !out.contains("limit      [x1 - 2*x2^3, x2, x3]") || !out.contains("pass       true") {
        return Err(format!("curve: exit {code}\n{out}"));
    }

    let (code, _, err) = cli(&["factor2", "[x1, x1*x2]"]);
    if code != 2 || !err.contains("\"jacobian\":\"x1\"") {
        return Err(format!("factor2: exit {code}\n{err}"));
    }

    let mut words: Vec<String> = (0..20)
        .map(|s| random_tame_word(2 + (s % 3) as usize, s, 1 + (s % 4) as usize, 3).to_string())
        .collect();
    words.push("nagata; nagata^-1".into());
    for text in CORPUS {
        let e = parse_endo(text).map_err(|e| format!("{text}: {e}"))?;
        let back = parse_endo(&e.to_string()).map_err(|err| format!("{e}: {err}"))?;
        if back != e {
            return Err(format!("round trip of {text} gave {back}"));
        }
    }
    for text in &words {
        let w = parse_word(text).map_err(|e| format!("{text}: {e}"))?;
        if w.to_string() != *text {
            return Err(format!("word {text} printed as {w}"));
        }
    }

    let (code, out, _) = cli(&["curve", "--json", "--samples", "1,-1,1/2", "nagata"]);
    let v: Value = serde_json::from_str(&out).map_err(|e| format!("json: {e}"))?;
    let ok = code == 0
        && v["w"] == 3
        && v["d"] == 5
        && v["h"] == "-2*x2^3"
        && v["valuations"] == serde_json::json!([2, 2, null])
        && v["pass"] == true;
    if !ok {
        return Err(format!("json record {v}"));
    }
    Ok(format!(
        "3 run() examples, {} maps and {} words round-trip, json record parsed",
        CORPUS.len(),
        words.len()
    ))
}

fn main() -> ExitCode {
    let sixty = Some(Duration::from_secs(60));
    type Check = Box<dyn Fn() -> Result<String, String>>;
    let criteria: Vec<(&str, Check)> = vec![
        ("Nagata degeneration golden value", Box::new(criterion_1)),
        (
            "degeneration suite on random tame maps",
            Box::new(move || suites(&[selfcheck::theorem_suite(100, SEED)], sixty)),
        ),
        (
            "degree and Jacobian rigidity along the curve",
            Box::new(|| suites(&[selfcheck::rigidity_suite(100, SEED)], None)),
        ),
        (
            "monoid laws",
            Box::new(|| suites(&[selfcheck::monoid_suite(100, SEED)], None)),
        ),
        ("word inversion and Nagata inverse", Box::new(criterion_5)),
        (
            "plane factorization round trip and rejections",
            Box::new(move || {
                suites(
                    &[
                        selfcheck::plane_suite(100, SEED),
                        selfcheck::plane_rejection_suite(),
                    ],
                    sixty,
                )
            }),
        ),
        (
            "homogeneous shears are fixed points",
            Box::new(|| suites(&[selfcheck::shear_suite(25, SEED)], None)),
        ),
        ("CLI conformance", Box::new(criterion_8)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(note) => println!("criterion {}: PASS  {name} ({note})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}\n{why}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
