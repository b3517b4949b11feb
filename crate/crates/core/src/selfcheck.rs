//! Seeded property suites over random tame automorphisms.
//!
//! Every suite is deterministic for a given base seed: case `i` uses seed
//! `base + i`, and results are reported in that order. Word samplers are capped
//! by the product of letter degrees so that composition stays tractable; the
//! caps depend on the dimension (see [`degree_cap`]).

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degeneration::{
    degenerate, degeneration_data, normalize, torus_conjugate, verify_limit,
};
use crate::endo::{Endo, Point};
use crate::groups::{letter_degree_bound, random_tame_word_bounded, Letter, Word};
use crate::planefactor::{factor_plane, is_plane_automorphism, PlaneVerdict, RejectionReason};
use crate::poly::{Monomial, Poly};
use crate::rational::{self, Rational};

pub const DIMENSIONS: [usize; 3] = [2, 3, 4];
pub const MAX_LENGTH: usize = 6;
pub const DMAX: u32 = 3;

/// Cap on the product of letter degrees of sampled words.
pub fn degree_cap(n: usize) -> u64 {
    match n {
        2 => 27,
        3 => 18,
        _ => 12,
    }
}

/// Per-factor degree in the monoid suite; three factors stay within 64.
pub fn monoid_factor_degree(n: usize) -> u32 {
    match n {
        2 => 4,
        3 => 3,
        _ => 2,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseFailure {
    pub index: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub total: usize,
    pub failures: Vec<CaseFailure>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.total - self.failures.len()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Timing is left out so that output is reproducible.
impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{} passed", self.name, self.passed(), self.total)?;
        for fail in &self.failures {
            write!(f, "\n  case {} (seed {}): {}", fail.index, fail.seed, fail.detail)?;
        }
        Ok(())
    }
}

fn run_suite<F>(name: &'static str, count: usize, base: u64, case: F) -> SuiteReport
where
    F: Fn(usize, u64) -> Result<(), String>,
{
    let start = Instant::now();
    let failures = (0..count)
        .filter_map(|i| {
            let seed = base.wrapping_add(i as u64);
            let outcome = panic::catch_unwind(AssertUnwindSafe(|| case(i, seed)))
                .unwrap_or_else(|p| {
                    let msg = p
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    Err(format!("panic: {msg}"))
                });
            outcome.err().map(|detail| CaseFailure {
                index: i,
                seed,
                detail,
            })
        })
        .collect();
    SuiteReport {
        name,
        total: count,
        failures,
        elapsed: start.elapsed(),
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Shape of case `i`: dimension cycles through 2, 3, 4 and length through 1..=6.
pub fn case_shape(i: usize) -> (usize, usize) {
    (DIMENSIONS[i % 3], 1 + (i / 3) % MAX_LENGTH)
}

/// A non-affine tame automorphism for case `i`. Affine draws are replaced by
/// redraws from derived seeds.
pub fn tame_case(i: usize, seed: u64) -> Result<(Word, Endo), String> {
    let (n, length) = case_shape(i);
    for sub in 0..64u64 {
        let s = seed ^ (sub << 40);
        let w = random_tame_word_bounded(n, s, length, DMAX, degree_cap(n))
            .ok_or_else(|| format!("no word within degree cap for n = {n}, length {length}"))?;
        let phi = w.to_endo().map_err(e2s)?;
        if !phi.is_affine() {
            return Ok((w, phi));
        }
    }
    Err("only affine draws".into())
}

/// Normalization, `(g0, w, h)`, exact overring clearance, limit verification
/// and the shape of the limit.
pub fn theorem_suite(count: usize, base: u64) -> SuiteReport {
    run_suite("degeneration", count, base, |i, seed| {
        let (_, phi) = tame_case(i, seed)?;
        let d = phi.degree().map_err(e2s)?;
        let record = normalize(&phi).map_err(e2s)?;
        let psi = &record.result;
        check(psi.degree().map_err(e2s)? == d, || "normalization changed the degree".into())?;
        let data = degeneration_data(psi).map_err(e2s)?;
        check(!data.g0.is_zero(), || "g0 = 0".into())?;
        check((2..=d).contains(&data.w), || format!("w = {} outside [2, {d}]", data.w))?;
        let curve = torus_conjugate(psi, data.w).map_err(e2s)?;
        let limit = degenerate(psi).map_err(e2s)?;
        let report = verify_limit(&curve, &limit).map_err(e2s)?;
        check(report.pass, || format!("limit valuations {:?}", report.valuations))?;
        check(limit.is_triangular() && !limit.is_affine(), || {
            format!("limit {limit} is not a non-affine triangular map")
        })
    })
}

pub const RIGIDITY_SAMPLES: [(i64, i64); 4] = [(1, 1), (-1, 1), (2, 1), (1, 2)];

/// Degree and Jacobian along the curve.
pub fn rigidity_suite(count: usize, base: u64) -> SuiteReport {
    run_suite("curve rigidity", count, base, |i, seed| {
        let (_, phi) = tame_case(i, seed)?;
        let psi = normalize(&phi).map_err(e2s)?.result;
        let d = psi.degree().map_err(e2s)?;
        let data = degeneration_data(&psi).map_err(e2s)?;
        let curve = torus_conjugate(&psi, data.w).map_err(e2s)?;
        let jac = psi.jacobian_det();
        for (p, q) in RIGIDITY_SAMPLES {
            let t0 = rational::ratio(p, q);
            let s = curve.specialize(&t0);
            let ds = s.degree().map_err(e2s)?;
            check(ds == d, || format!("degree {ds} != {d} at t = {t0}"))?;
            // an identical map has an identical determinant
            let js = if s == psi { jac.clone() } else { s.jacobian_det() };
            check(js == jac, || format!("jacobian {js} != {jac} at t = {t0}"))?;
        }
        let w0 = curve.specialize(&rational::zero()).degree().map_err(e2s)?;
        check(w0 == data.w, || format!("degree at t = 0 is {w0}, expected {}", data.w))
    })
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rational::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Point {
    Point((0..n).map(|_| random_rational(rng)).collect())
}

/// Random endomorphism whose components have 1 to 4 terms, one of them of
/// total degree exactly `deg`, and nonzero integer coefficients in `[-5, 5]`.
pub fn random_endo(n: usize, deg: u32, rng: &mut ChaCha8Rng) -> Endo {
    let vars: Vec<usize> = (1..=n).collect();
    let comps = (0..n)
        .map(|_| loop {
            let terms = rng.gen_range(1..=4);
            let mut p = Poly::zero(n);
            for k in 0..terms {
                let dk = if k == 0 { deg } else { rng.gen_range(0..=deg) };
                let mut exps = vec![0u32; n];
                for _ in 0..dk {
                    exps[*vars.choose(rng).unwrap() - 1] += 1;
                }
                let mut c = 0;
                while c == 0 {
                    c = rng.gen_range(-5..=5);
                }
                p = p + Poly::term(n, Monomial::new(&exps, 0), rational::int(c));
            }
            if p.total_degree().finite() == Some(deg) {
                break p;
            }
        })
        .collect();
    Endo::new(comps).expect("t-free components")
}

pub const MONOID_POINTS: usize = 20;

/// Associativity, identity, the evaluation homomorphism and the Jacobian chain
/// rule on random triples of endomorphisms.
pub fn monoid_suite(count: usize, base: u64) -> SuiteReport {
    run_suite("monoid laws", count, base, |i, seed| {
        let n = DIMENSIONS[i % 3];
        let deg = monoid_factor_degree(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (
            random_endo(n, deg, &mut rng),
            random_endo(n, deg, &mut rng),
            random_endo(n, deg, &mut rng),
        );
        let ab = a.compose(&b).map_err(e2s)?;
        let bc = b.compose(&c).map_err(e2s)?;
        let left = ab.compose(&c).map_err(e2s)?;
        let right = a.compose(&bc).map_err(e2s)?;
        check(left == right, || "composition is not associative".into())?;
        let dl = left.degree().map_err(e2s)?;
        check(dl <= 64, || format!("composed degree {dl} exceeds 64"))?;
        let id = Endo::identity(n);
        check(
            id.compose(&a).map_err(e2s)? == a && a.compose(&id).map_err(e2s)? == a,
            || "identity law fails".into(),
        )?;
        for _ in 0..MONOID_POINTS {
            let p = random_point(n, &mut rng);
            let cp = c.eval(&p).map_err(e2s)?;
            let bcp = b.eval(&cp).map_err(e2s)?;
            let abcp = a.eval(&bcp).map_err(e2s)?;
            check(left.eval(&p).map_err(e2s)? == abcp, || {
                format!("evaluation homomorphism fails at {p}")
            })?;
            let chain = a.jacobian_det_at(&bcp).map_err(e2s)?
                * b.jacobian_det_at(&cp).map_err(e2s)?
                * c.jacobian_det_at(&p).map_err(e2s)?;
            check(left.jacobian_det_at(&p).map_err(e2s)? == chain, || {
                format!("chain rule fails at {p}")
            })?;
        }
        Ok(())
    })
}

fn concat(a: &Word, b: &Word) -> Result<Word, String> {
    let letters: Vec<Letter> = a.letters().iter().chain(b.letters()).cloned().collect();
    Word::new(a.n(), letters).map_err(e2s)
}

/// A word whose inverse also satisfies the degree cap.
pub fn invertible_case(i: usize, seed: u64) -> Result<Word, String> {
    let (n, length) = case_shape(i);
    for sub in 0..1024u64 {
        let s = seed ^ (sub << 40);
        let w = random_tame_word_bounded(n, s, length, DMAX, degree_cap(n))
            .ok_or_else(|| format!("no word within degree cap for n = {n}, length {length}"))?;
        if letter_degree_bound(&w.inverse()).map_err(e2s)? <= degree_cap(n) {
            return Ok(w);
        }
    }
    Err("no word with a capped inverse".into())
}

/// `w · w⁻¹` and `w⁻¹ · w` evaluate to the identity.
pub fn inversion_suite(count: usize, base: u64) -> SuiteReport {
    run_suite("word inversion", count, base, |i, seed| {
        let w = invertible_case(i, seed)?;
        let id = Endo::identity(w.n());
        let inv = w.inverse();
        check(concat(&w, &inv)?.to_endo().map_err(e2s)? == id, || {
            format!("w w^-1 != id for {w}")
        })?;
        check(concat(&inv, &w)?.to_endo().map_err(e2s)? == id, || {
            format!("w^-1 w != id for {w}")
        })
    })
}

/// Plane words recompose exactly after factorization.
pub fn plane_suite(count: usize, base: u64) -> SuiteReport {
    run_suite("plane factorization", count, base, |i, seed| {
        let length = 1 + i % MAX_LENGTH;
        let w = random_tame_word_bounded(2, seed, length, DMAX, 64)
            .ok_or_else(|| "no plane word within degree cap".to_string())?;
        let phi = w.to_endo().map_err(e2s)?;
        let f = factor_plane(&phi).map_err(e2s)?;
        check(f.word.to_endo().map_err(e2s)? == phi, || {
            format!("{} does not recompose to {phi}", f.word)
        })?;
        let sums: Vec<u32> = f.steps.iter().map(|s| s.before.0 + s.before.1).collect();
        check(sums.windows(2).all(|p| p[0] > p[1]), || {
            format!("degree sums {sums:?} do not strictly decrease")
        })
    })
}

/// The non-automorphisms that the plane procedure must reject.
pub const PLANE_REJECTS: [&str; 2] = ["[x1, x1*x2]", "[x1^2, x2]"];

/// Rejection of [`PLANE_REJECTS`]; each certificate must be a non-constant
/// Jacobian that matches the input.
pub fn plane_rejection_suite() -> SuiteReport {
    run_suite("plane rejection", PLANE_REJECTS.len(), 0, |i, _| {
        let sigma = crate::parse::parse_endo(PLANE_REJECTS[i]).map_err(e2s)?;
        match is_plane_automorphism(&sigma).map_err(e2s)? {
            PlaneVerdict::Automorphism(f) => Err(format!("accepted as {}", f.word)),
            PlaneVerdict::Rejected(r) => match r.reason {
                RejectionReason::NonConstantJacobian { jacobian } => check(
                    jacobian == sigma.jacobian_det() && jacobian.as_constant().is_none(),
                    || format!("certificate {jacobian} does not match"),
                ),
                other => Err(format!("unexpected certificate {other:?}")),
            },
        }
    })
}

/// `(x1 + h(x2, ..., xn), x2, ..., xn)` with `h` homogeneous of degree 2 to 4.
pub fn random_homogeneous_shear(n: usize, rng: &mut ChaCha8Rng) -> Endo {
    let vars: Vec<usize> = (2..=n).collect();
    let deg = rng.gen_range(2..=4u32);
    let h = loop {
        let mut h = Poly::zero(n);
        for _ in 0..rng.gen_range(1..=4) {
            let mut exps = vec![0u32; n];
            for _ in 0..deg {
                exps[*vars.choose(rng).unwrap() - 1] += 1;
            }
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-9..=9);
            }
            h = h + Poly::term(n, Monomial::new(&exps, 0), rational::int(c));
        }
        if !h.is_zero() {
            break h;
        }
    };
    let mut comps: Vec<Poly> = (1..=n).map(|i| Poly::var(n, i)).collect();
    comps[0] = &comps[0] + &h;
    Endo::new(comps).expect("t-free")
}

/// Homogeneous shears are fixed by the degeneration.
pub fn shear_suite(count: usize, base: u64) -> SuiteReport {
    run_suite("shear fixed points", count, base, |i, seed| {
        let n = DIMENSIONS[i % 3];
        let shear = random_homogeneous_shear(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let out = degenerate(&shear).map_err(e2s)?;
        check(out == shear, || format!("{shear} degenerates to {out}"))
    })
}

/// Standard number of cases per suite; the shear suite uses a quarter.
pub const STANDARD_CASES: usize = 100;

/// All suites, `cases` cases each.
pub fn run_all(base: u64, cases: usize) -> Vec<SuiteReport> {
    vec![
        theorem_suite(cases, base),
        rigidity_suite(cases, base),
        monoid_suite(cases, base),
        inversion_suite(cases, base),
        plane_suite(cases, base),
        plane_rejection_suite(),
        shear_suite(cases.div_ceil(4), base),
    ]
}
