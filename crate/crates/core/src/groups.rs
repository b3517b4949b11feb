//! Generators of the tame group and words over them.
//!
//! [`AffineMap`] and [`TriangularMap`] are the two generator kinds; a [`Word`]
//! is a product of generators (or adjoined named automorphisms) with
//! exponents `±1`. Words are how tame elements are carried around whenever an
//! inverse is needed, since raw endomorphisms cannot be inverted in general.

use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::parse::{parse_endo_at, parse_poly, split_top_level, strip_delimiters};
use crate::poly::{Monomial, Poly};
use crate::rational::{self, parse_rational, Rational};

/// `x ↦ linear·x + translation` with invertible `linear`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: Matrix,
    translation: Vec<Rational>,
}

impl AffineMap {
    pub fn new(linear: Matrix, translation: Vec<Rational>) -> Result<Self> {
        let n = linear.len();
        if n == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        if let Some(row) = linear.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: row.len(),
            });
        }
        if translation.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: translation.len(),
            });
        }
        if linalg::determinant(&linear).is_zero() {
            return Err(Error::SingularLinearPart);
        }
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: linalg::identity(n),
            translation: vec![rational::zero(); n],
        }
    }

    pub fn diagonal(scalings: &[Rational]) -> Result<Self> {
        let n = scalings.len();
        let mut m = linalg::identity(n);
        for (i, a) in scalings.iter().enumerate() {
            m[i][i] = a.clone();
        }
        AffineMap::new(m, vec![rational::zero(); n])
    }

    /// The permutation `x_i ↔ x_j` (1-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        for k in [i, j] {
            if !(1..=n).contains(&k) {
                return Err(Error::VariableOutOfRange { index: k, nvars: n });
            }
        }
        let mut m = linalg::identity(n);
        m.swap(i - 1, j - 1);
        Ok(AffineMap {
            linear: m,
            translation: vec![rational::zero(); n],
        })
    }

    /// Reads off the affine map of a degree `<= 1` endomorphism.
    pub fn from_endo(e: &Endo) -> Result<Self> {
        if e.components().iter().any(|f| f.truncate(1) != *f) {
            return Err(Error::NotAffine(format!("{e} has degree > 1")));
        }
        AffineMap::new(e.linear_matrix(), e.translation())
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn is_identity(&self) -> bool {
        self.linear == linalg::identity(self.n()) && self.translation.iter().all(Zero::is_zero)
    }

    pub fn to_endo(&self) -> Endo {
        let n = self.n();
        let comps = self
            .linear
            .iter()
            .zip(&self.translation)
            .map(|(row, b)| {
                let mut f = Poly::constant(n, b.clone());
                for (j, a) in row.iter().enumerate() {
                    f = f + Poly::var(n, j + 1).scale(a);
                }
                f
            })
            .collect();
        Endo::new(comps).expect("well-formed affine map")
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = linalg::inverse(&self.linear).expect("linear part is invertible");
        let shift = linalg::mul_vec(&inv, &self.translation);
        AffineMap {
            linear: inv,
            translation: shift.into_iter().map(|v| -v).collect(),
        }
    }

    /// Product in the monoid law: `self` after `other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let linear = linalg::mul(&self.linear, &other.linear);
        let translation = linalg::mul_vec(&self.linear, &other.translation)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect();
        AffineMap {
            linear,
            translation,
        }
    }
}

/// `(a_1 x_1 + p_1, ..., a_n x_n + p_n)` with `a_i != 0` and `p_i` a polynomial
/// in `x_{i+1}, ..., x_n` only (`p_n` constant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangularMap {
    scalings: Vec<Rational>,
    shifts: Vec<Poly>,
}

impl TriangularMap {
    pub fn new(scalings: Vec<Rational>, shifts: Vec<Poly>) -> Result<Self> {
        let n = scalings.len();
        if n == 0 || shifts.len() != n {
            return Err(Error::Dimension {
                expected: n.max(1),
                found: shifts.len(),
            });
        }
        for (k, (a, p)) in scalings.iter().zip(&shifts).enumerate() {
            let i = k + 1;
            if a.is_zero() {
                return Err(Error::NotTriangular(format!("scaling a_{i} is zero")));
            }
            if p.nvars() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: p.nvars(),
                });
            }
            let later: Vec<usize> = (i + 1..=n).collect();
            if !p.supported_on(&later) {
                return Err(Error::NotTriangular(format!(
                    "shift p_{i} = {p} involves x_1..x_{i} or t"
                )));
            }
        }
        Ok(TriangularMap { scalings, shifts })
    }

    /// The shear `(x1 + h(x2, ..., xn), x2, ..., xn)`.
    pub fn shear(n: usize, h: Poly) -> Result<Self> {
        let mut shifts = vec![Poly::zero(n); n];
        shifts[0] = h;
        TriangularMap::new(vec![rational::one(); n], shifts)
    }

    pub fn from_endo(e: &Endo) -> Result<Self> {
        let n = e.n();
        let mut scalings = Vec::with_capacity(n);
        let mut shifts = Vec::with_capacity(n);
        for (k, f) in e.components().iter().enumerate() {
            let mut exps = vec![0; n];
            exps[k] = 1;
            let a = f.coeff(&Monomial::new(&exps, 0));
            shifts.push(f - &Poly::var(n, k + 1).scale(&a));
            scalings.push(a);
        }
        TriangularMap::new(scalings, shifts)
    }

    pub fn n(&self) -> usize {
        self.scalings.len()
    }

    pub fn scalings(&self) -> &[Rational] {
        &self.scalings
    }

    pub fn shifts(&self) -> &[Poly] {
        &self.shifts
    }

    pub fn is_identity(&self) -> bool {
        self.scalings.iter().all(One::is_one) && self.shifts.iter().all(Poly::is_zero)
    }

    pub fn to_endo(&self) -> Endo {
        let n = self.n();
        let comps = self
            .scalings
            .iter()
            .zip(&self.shifts)
            .enumerate()
            .map(|(k, (a, p))| Poly::var(n, k + 1).scale(a) + p)
            .collect();
        Endo::new(comps).expect("well-formed triangular map")
    }

    /// Back-substitution: `x_i = (y_i - p_i(x_{i+1}, ..., x_n)) / a_i`, solved
    /// from `i = n` down to `1`.
    pub fn inverse(&self) -> TriangularMap {
        let n = self.n();
        let mut solved: Vec<Poly> = (1..=n).map(|i| Poly::var(n, i)).collect();
        for k in (0..n).rev() {
            let inv_a = rational::one() / &self.scalings[k];
            let p_at = self.shifts[k]
                .substitute(&solved)
                .expect("matching dimensions");
            solved[k] = (Poly::var(n, k + 1) - p_at).scale(&inv_a);
        }
        let endo = Endo::new(solved).expect("well-formed");
        TriangularMap::from_endo(&endo).expect("inverse of a triangular map is triangular")
    }
}

/// An automorphism adjoined by name, e.g. the Nagata map or an input `φ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NamedEndo {
    pub name: String,
    pub map: Endo,
    pub inverse: Option<Endo>,
}

impl NamedEndo {
    /// Registers a name with an optional inverse; a supplied inverse must
    /// compose with the map to the identity on both sides.
    pub fn new(name: impl Into<String>, map: Endo, inverse: Option<Endo>) -> Result<Self> {
        let name = name.into();
        if let Some(inv) = &inverse {
            let id = Endo::identity(map.n());
            if map.compose(inv)? != id || inv.compose(&map)? != id {
                return Err(Error::CrossCheck(format!(
                    "registered inverse of `{name}` does not invert it"
                )));
            }
        }
        Ok(NamedEndo {
            name,
            map,
            inverse,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Generator {
    Affine(AffineMap),
    Triangular(TriangularMap),
    Named(NamedEndo),
}

impl Generator {
    pub fn n(&self) -> usize {
        match self {
            Generator::Affine(a) => a.n(),
            Generator::Triangular(b) => b.n(),
            Generator::Named(e) => e.map.n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    /// Exponent `-1` when set.
    pub inverted: bool,
}

impl Letter {
    pub fn new(generator: Generator) -> Self {
        Letter {
            generator,
            inverted: false,
        }
    }

    pub fn inv(generator: Generator) -> Self {
        Letter {
            generator,
            inverted: true,
        }
    }

    pub fn to_endo(&self) -> Result<Endo> {
        match (&self.generator, self.inverted) {
            (Generator::Affine(a), false) => Ok(a.to_endo()),
            (Generator::Affine(a), true) => Ok(a.inverse().to_endo()),
            (Generator::Triangular(b), false) => Ok(b.to_endo()),
            (Generator::Triangular(b), true) => Ok(b.inverse().to_endo()),
            (Generator::Named(e), false) => Ok(e.map.clone()),
            (Generator::Named(e), true) => e
                .inverse
                .clone()
                .ok_or_else(|| Error::InverseUnavailable(e.name.clone())),
        }
    }

    fn is_affine(&self) -> bool {
        matches!(self.generator, Generator::Affine(_))
    }
}

/// A product `L_1 L_2 ... L_k` of letters in the monoid law.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    n: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(n: usize, letters: Vec<Letter>) -> Result<Self> {
        if let Some(l) = letters.iter().find(|l| l.generator.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: l.generator.n(),
            });
        }
        Ok(Word { n, letters })
    }

    pub fn empty(n: usize) -> Self {
        Word {
            n,
            letters: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, letter: Letter) -> Result<()> {
        if letter.generator.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: letter.generator.n(),
            });
        }
        self.letters.push(letter);
        Ok(())
    }

    /// Reversed letters with flipped exponents.
    pub fn inverse(&self) -> Word {
        Word {
            n: self.n,
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter {
                    generator: l.generator.clone(),
                    inverted: !l.inverted,
                })
                .collect(),
        }
    }

    /// Folds the letters from the right, so each step substitutes the running
    /// product into a single (small) letter.
    pub fn to_endo(&self) -> Result<Endo> {
        let mut acc = Endo::identity(self.n);
        for letter in self.letters.iter().rev() {
            acc = letter.to_endo()?.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Merges runs of affine letters and runs of triangular letters into single
    /// positive letters and drops identities. Named letters are kept as is.
    pub fn normalized(&self) -> Result<Word> {
        let mut out: Vec<Letter> = Vec::new();
        for letter in &self.letters {
            let resolved = match (&letter.generator, letter.inverted) {
                (Generator::Affine(a), true) => Letter::new(Generator::Affine(a.inverse())),
                (Generator::Triangular(b), true) => {
                    Letter::new(Generator::Triangular(b.inverse()))
                }
                _ => letter.clone(),
            };
            let merged = match (out.last().map(|l| &l.generator), &resolved.generator) {
                (Some(Generator::Affine(prev)), Generator::Affine(cur)) => {
                    Some(Generator::Affine(prev.compose(cur)))
                }
                (Some(Generator::Triangular(prev)), Generator::Triangular(cur)) => {
                    let e = prev.to_endo().compose(&cur.to_endo())?;
                    Some(Generator::Triangular(TriangularMap::from_endo(&e)?))
                }
                _ => None,
            };
            match merged {
                Some(g) => {
                    out.pop();
                    out.push(Letter::new(g));
                }
                None => out.push(resolved),
            }
            let drop_last = match out.last().map(|l| &l.generator) {
                Some(Generator::Affine(a)) => a.is_identity(),
                Some(Generator::Triangular(b)) => b.is_identity(),
                _ => false,
            };
            if drop_last {
                out.pop();
            }
        }
        Ok(Word {
            n: self.n,
            letters: out,
        })
    }

    /// Whether consecutive affine/triangular letters alternate in kind.
    pub fn alternates(&self) -> bool {
        self.letters.windows(2).all(|w| {
            !matches!(
                (&w[0].generator, &w[1].generator),
                (Generator::Affine(_), Generator::Affine(_))
                    | (Generator::Triangular(_), Generator::Triangular(_))
            )
        })
    }
}

/// The subgroup generated by a list of letters, optionally together with the
/// whole affine group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSubgroup {
    n: usize,
    includes_affine: bool,
    generators: Vec<Generator>,
}

impl GeneratedSubgroup {
    pub fn new(n: usize, includes_affine: bool, generators: Vec<Generator>) -> Result<Self> {
        if generators.is_empty() && !includes_affine {
            return Err(Error::NormalizationRequired(
                "a generated subgroup needs at least one generator".into(),
            ));
        }
        if let Some(g) = generators.iter().find(|g| g.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: g.n(),
            });
        }
        Ok(GeneratedSubgroup {
            n,
            includes_affine,
            generators,
        })
    }

    /// `⟨A, φ⟩`.
    pub fn affine_and(phi: NamedEndo) -> Self {
        let n = phi.map.n();
        GeneratedSubgroup {
            n,
            includes_affine: true,
            generators: vec![Generator::Named(phi)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Whether every letter of `w` is one of the generators (any affine letter
    /// is admitted when the affine group is included).
    pub fn admits(&self, w: &Word) -> bool {
        w.n == self.n
            && w.letters.iter().all(|l| {
                (self.includes_affine && l.is_affine())
                    || self.generators.contains(&l.generator)
            })
    }

    /// A word of `length` letters drawn uniformly from the generators (plus a
    /// fresh random affine letter when the affine group is included). Inverses
    /// are used only where available.
    pub fn sample(&self, seed: u64, length: usize) -> Word {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let choices = self.generators.len() + usize::from(self.includes_affine);
        let letters = (0..length)
            .map(|_| {
                let k = rng.gen_range(0..choices);
                let generator = if k == self.generators.len() {
                    Generator::Affine(random_affine_with(self.n, &mut rng))
                } else {
                    self.generators[k].clone()
                };
                let can_invert = match &generator {
                    Generator::Named(e) => e.inverse.is_some(),
                    _ => true,
                };
                Letter {
                    generator,
                    inverted: can_invert && rng.gen_bool(0.5),
                }
            })
            .collect();
        Word {
            n: self.n,
            letters,
        }
    }
}

fn random_affine_with(n: usize, rng: &mut ChaCha8Rng) -> AffineMap {
    loop {
        let linear: Matrix = (0..n)
            .map(|_| (0..n).map(|_| rational::int(rng.gen_range(-2..=2))).collect())
            .collect();
        if linalg::determinant(&linear).is_zero() {
            continue;
        }
        let translation = (0..n).map(|_| rational::int(rng.gen_range(-2..=2))).collect();
        return AffineMap {
            linear,
            translation,
        };
    }
}

const SCALINGS: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (3, 1)];

/// Random monomial of total degree `deg` in the 1-based variables `vars`.
fn random_monomial(n: usize, vars: &[usize], deg: u32, rng: &mut ChaCha8Rng) -> Monomial {
    let mut exps = vec![0u32; n];
    for _ in 0..deg {
        let v = *vars.choose(rng).expect("nonempty variable set");
        exps[v - 1] += 1;
    }
    Monomial::new(&exps, 0)
}

fn random_coefficient(rng: &mut ChaCha8Rng) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-10..=10);
    }
    rational::int(c)
}

fn random_triangular_with(n: usize, dmax: u32, rng: &mut ChaCha8Rng) -> TriangularMap {
    let scalings: Vec<Rational> = (0..n)
        .map(|_| {
            let (p, q) = *SCALINGS.choose(rng).unwrap();
            rational::ratio(p, q)
        })
        .collect();
    let mut shifts = vec![Poly::zero(n); n];
    for (k, shift) in shifts.iter_mut().enumerate() {
        let later: Vec<usize> = (k + 2..=n).collect();
        if later.is_empty() {
            *shift = Poly::constant(n, rational::int(rng.gen_range(-3..=3)));
            continue;
        }
        let terms = rng.gen_range(0..=4);
        let mut p = Poly::zero(n);
        for _ in 0..terms {
            let deg = rng.gen_range(0..=dmax);
            let m = random_monomial(n, &later, deg, rng);
            p = p + Poly::term(n, m, random_coefficient(rng));
        }
        *shift = p;
    }
    // One guaranteed term of degree >= 2 keeps the letter non-affine.
    if n >= 2 && dmax >= 2 {
        let k = rng.gen_range(0..n - 1);
        let later: Vec<usize> = (k + 2..=n).collect();
        loop {
            let deg = rng.gen_range(2..=dmax);
            let m = random_monomial(n, &later, deg, rng);
            let p = &shifts[k] + &Poly::term(n, m, random_coefficient(rng));
            // redraw on cancellation against an existing term
            if p.total_degree().finite().unwrap_or(0) >= 2 {
                shifts[k] = p;
                break;
            }
        }
    }
    TriangularMap::new(scalings, shifts).expect("sampler respects the triangular shape")
}

/// Seeded random affine map with integer entries in `[-2, 2]`; singular draws
/// are rejected and redrawn.
pub fn random_affine(n: usize, seed: u64) -> AffineMap {
    random_affine_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Seeded random triangular map.
///
/// Scalings are drawn from `{1, -1, 2, -2, 1/2, 3}`; each shift `p_i` (`i < n`)
/// has up to four terms with nonzero integer coefficients in `[-10, 10]` and
/// degree at most `dmax`; `p_n` is a constant in `[-3, 3]`. One shift always
/// receives a term of degree in `[2, dmax]`.
pub fn random_triangular(n: usize, seed: u64, dmax: u32) -> TriangularMap {
    random_triangular_with(n, dmax, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Seeded word of exactly `length` letters alternating between affine and
/// triangular kinds (starting kind and exponents drawn at random).
pub fn random_tame_word(n: usize, seed: u64, length: usize, dmax: u32) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut affine_turn = rng.gen_bool(0.5);
    let mut letters = Vec::with_capacity(length);
    for _ in 0..length {
        let generator = if affine_turn {
            Generator::Affine(random_affine_with(n, &mut rng))
        } else {
            Generator::Triangular(random_triangular_with(n, dmax, &mut rng))
        };
        letters.push(Letter {
            generator,
            inverted: rng.gen_bool(0.5),
        });
        affine_turn = !affine_turn;
    }
    Word { n, letters }
}

/// Degree bound for a word: the product of its letter degrees.
pub fn letter_degree_bound(w: &Word) -> Result<u64> {
    w.letters().iter().try_fold(1u64, |acc, l| {
        Ok(acc.saturating_mul(u64::from(l.to_endo()?.degree()?)))
    })
}

/// [`random_tame_word`] redrawn until [`letter_degree_bound`] is at most
/// `max_degree`. Candidate seeds are derived deterministically from `seed`.
/// Gives up (`None`) after 10 000 draws.
pub fn random_tame_word_bounded(
    n: usize,
    seed: u64,
    length: usize,
    dmax: u32,
    max_degree: u64,
) -> Option<Word> {
    let mut seeds = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_b0de_d000_0000);
    (0..10_000).find_map(|_| {
        let w = random_tame_word(n, seeds.gen(), length, dmax);
        let bound = letter_degree_bound(&w).ok()?;
        (bound <= max_degree).then_some(w)
    })
}

/// The Nagata automorphism `N = (x1 - 2 x2 Δ - x3 Δ², x2 + x3 Δ, x3)` with
/// `Δ = x2² + x1 x3`, and its inverse `(x1 + 2 x2 Δ - x3 Δ², x2 - x3 Δ, x3)`.
///
/// Panics if the pair does not compose to the identity.
pub fn nagata() -> (Endo, Endo) {
    let n = 3;
    let (x1, x2, x3) = (Poly::var(n, 1), Poly::var(n, 2), Poly::var(n, 3));
    let two = Poly::constant(n, rational::int(2));
    let delta = &x2 * &x2 + &x1 * &x3;
    let delta_sq = &delta * &delta;
    let twice = &two * &x2 * &delta;
    let cube = &x3 * &delta_sq;
    let forward = Endo::new(vec![
        &x1 - &twice - &cube,
        &x2 + &(&x3 * &delta),
        x3.clone(),
    ])
    .expect("three components");
    let backward = Endo::new(vec![
        &x1 + &twice - &cube,
        &x2 - &(&x3 * &delta),
        x3.clone(),
    ])
    .expect("three components");
    let id = Endo::identity(n);
    assert_eq!(
        forward.compose(&backward).expect("same n"),
        id,
        "Nagata pair does not compose to the identity"
    );
    assert_eq!(backward.compose(&forward).expect("same n"), id);
    (forward, backward)
}

pub fn nagata_letter() -> NamedEndo {
    let (map, inverse) = nagata();
    NamedEndo {
        name: "nagata".into(),
        map,
        inverse: Some(inverse),
    }
}

/// Named automorphisms understood by the word parser.
pub fn named_endo(name: &str) -> Option<NamedEndo> {
    match name {
        "nagata" | "N" => Some(nagata_letter()),
        _ => None,
    }
}

fn fmt_rationals(f: &mut fmt::Formatter<'_>, v: &[Rational]) -> fmt::Result {
    f.write_str("[")?;
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("]")
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("A([")?;
        for (i, row) in self.linear.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            fmt_rationals(f, row)?;
        }
        f.write_str("]; ")?;
        fmt_rationals(f, &self.translation)?;
        f.write_str(")")
    }
}

impl fmt::Display for TriangularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("B(")?;
        fmt_rationals(f, &self.scalings)?;
        f.write_str("; [")?;
        for (i, p) in self.shifts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("])")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            Generator::Affine(a) => write!(f, "{a}")?,
            Generator::Triangular(b) => write!(f, "{b}")?,
            Generator::Named(e) => f.write_str(&e.name)?,
        }
        if self.inverted {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "A({}; {})", identity_rows(self.n), zeros(self.n));
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn identity_rows(n: usize) -> String {
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let r: Vec<&str> = (0..n).map(|j| if i == j { "1" } else { "0" }).collect();
            format!("[{}]", r.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn zeros(n: usize) -> String {
    format!("[{}]", vec!["0"; n].join(", "))
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn parse_rational_list(text: &str, offset: usize) -> Result<Vec<Rational>> {
    let (body_off, body) = strip_delimiters(text, offset, b"[")?;
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top_level(body, b',')?
        .into_iter()
        .map(|(off, s)| {
            parse_rational(s).map_err(|_| perr(body_off + off, format!("invalid rational `{}`", s.trim())))
        })
        .collect()
}

fn parse_letter(text: &str, offset: usize) -> Result<Letter> {
    let lead = text.len() - text.trim_start().len();
    let mut body = text.trim();
    let pos = offset + lead;
    let mut inverted = false;
    if let Some(stripped) = body.strip_suffix("^-1") {
        body = stripped.trim_end();
        inverted = true;
    }
    let generator = if let Some(rest) = body.strip_prefix('A') {
        let (inner_off, inner) = strip_delimiters(rest, pos + 1, b"(")?;
        let parts = split_top_level(inner, b';')?;
        let [(m_off, m), (t_off, t)] = parts[..] else {
            return Err(perr(pos, "A(...) takes `matrix; translation`"));
        };
        let (rows_off, rows) = strip_delimiters(m, inner_off + m_off, b"[")?;
        let linear = split_top_level(rows, b',')?
            .into_iter()
            .map(|(off, r)| parse_rational_list(r, rows_off + off))
            .collect::<Result<Vec<_>>>()?;
        let translation = parse_rational_list(t, inner_off + t_off)?;
        Generator::Affine(AffineMap::new(linear, translation)?)
    } else if let Some(rest) = body.strip_prefix('B') {
        let (inner_off, inner) = strip_delimiters(rest, pos + 1, b"(")?;
        let parts = split_top_level(inner, b';')?;
        let [(s_off, s), (p_off, p)] = parts[..] else {
            return Err(perr(pos, "B(...) takes `scalings; shifts`"));
        };
        let scalings = parse_rational_list(s, inner_off + s_off)?;
        let n = scalings.len();
        let (sh_off, sh) = strip_delimiters(p, inner_off + p_off, b"[")?;
        let shifts = split_top_level(sh, b',')?
            .into_iter()
            .map(|(off, q)| {
                parse_poly(q, n).map_err(|e| match e {
                    Error::Parse { pos, msg } => perr(sh_off + off + pos, msg),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Generator::Triangular(TriangularMap::new(scalings, shifts)?)
    } else if body.starts_with('[') || body.starts_with('(') {
        let map = parse_endo_at(body, pos)?;
        Generator::Named(NamedEndo {
            name: map.to_string(),
            map,
            inverse: None,
        })
    } else {
        let named =
            named_endo(body).ok_or_else(|| perr(pos, format!("unknown letter `{body}`")))?;
        Generator::Named(named)
    };
    Ok(Letter {
        generator,
        inverted,
    })
}

/// Parses the word text format: letters separated by top-level `;`, each one of
/// `A([[row], ...]; [translation])`, `B([scalings]; [shifts])`, a named map
/// such as `nagata`, or a bracketed endomorphism, optionally followed by `^-1`.
pub fn parse_word(text: &str) -> Result<Word> {
    let pieces = split_top_level(text, b';')?;
    let letters = pieces
        .into_iter()
        .filter(|(_, s)| !s.trim().is_empty())
        .map(|(off, s)| parse_letter(s, off))
        .collect::<Result<Vec<_>>>()?;
    let n = letters
        .first()
        .map(|l| l.generator.n())
        .ok_or_else(|| perr(0, "empty word"))?;
    Word::new(n, letters)
}
