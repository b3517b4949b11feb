//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Poly`] lives in `Q[x1, ..., xn, t]`: the `n` coordinate variables plus one
//! reserved slot for the deformation parameter `t`. Every x-degree computation
//! ignores `t`. Terms are kept in a `BTreeMap` keyed by [`Monomial`] with no zero
//! coefficients, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Exponent vector `[e1, ..., en, e_t]`.
///
/// Ordered graded-lexicographically: total degree (t included) first, then
/// `x1 > x2 > ... > xn > t`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars + 1))
    }

    /// Builds `x^exps * t^t_exp`; `exps.len()` is the number of x-variables.
    pub fn new(exps: &[u32], t_exp: u32) -> Self {
        let mut v: SmallVec<[u32; 6]> = exps.iter().copied().collect();
        v.push(t_exp);
        Monomial(v)
    }

    pub fn nvars(&self) -> usize {
        self.0.len() - 1
    }

    /// Exponent of `x_i`, 1-based.
    pub fn exp(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn x_exps(&self) -> &[u32] {
        &self.0[..self.0.len() - 1]
    }

    pub fn t_exp(&self) -> u32 {
        self.0[self.0.len() - 1]
    }

    pub fn x_degree(&self) -> u32 {
        self.x_exps().iter().sum()
    }

    fn full_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Summed exponent over the given 1-based x-variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.exp(i)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn with_exp(&self, slot: usize, e: u32) -> Monomial {
        let mut m = self.clone();
        m.0[slot] = e;
        m
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let n = self.nvars();
        for (slot, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if slot == n {
                f.write_str("t")?;
            } else {
                write!(f, "x{}", slot + 1)?;
            }
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.full_degree()
            .cmp(&other.full_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        self.fmt_with(f)
    }
}

/// Total degree of a polynomial. The zero polynomial has degree `NegInfinity`,
/// so `deg(p*q) = deg(p) + deg(q)` holds without exceptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    /// The variable `x_i`, 1-based.
    ///
    /// Panics if `i` is not in `1..=nvars`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(
            (1..=nvars).contains(&i),
            "variable x{i} out of range for {nvars} variables"
        );
        let m = Monomial::one(nvars).with_exp(i - 1, 1);
        Self::term(nvars, m, rational::one())
    }

    /// The deformation parameter `t`.
    pub fn param(nvars: usize) -> Self {
        let m = Monomial::one(nvars).with_exp(nvars, 1);
        Self::term(nvars, m, rational::one())
    }

    pub fn term(nvars: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn from_map(nvars: usize, map: HashMap<Monomial, Rational>) -> Self {
        Poly {
            nvars,
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// `Some(c)` when the polynomial is the constant `c` (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn has_param(&self) -> bool {
        self.terms.keys().any(|m| m.t_exp() > 0)
    }

    /// Smallest power of `t` among the terms; `None` for the zero polynomial.
    pub fn param_valuation(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::t_exp).min()
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    fn check_var(&self, i: usize) -> Result<()> {
        if (1..=self.nvars).contains(&i) {
            Ok(())
        } else {
            Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            })
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.nvars));
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.len() == 1 {
            let (ms, cs) = small.terms.iter().next().unwrap();
            // Multiplying by a single term is injective on monomials.
            let terms = big
                .terms
                .iter()
                .map(|(m, c)| (m.mul(ms), c * cs))
                .collect();
            return Ok(Poly {
                nvars: self.nvars,
                terms,
            });
        }
        if let Some(p) = packed_mul(small, big) {
            return Ok(p);
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(capacity_hint(small.len(), big.len()));
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|e| *e += &c)
                    .or_insert(c);
            }
        }
        Ok(Poly::from_map(self.nvars, acc))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces each `x_i` by `images[i-1]`; `t` is left fixed.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: images.len(),
            });
        }
        let target = images.first().map_or(self.nvars, Poly::nvars);
        for g in images {
            if g.nvars != target {
                return Err(Error::Dimension {
                    expected: target,
                    found: g.nvars,
                });
            }
        }
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|g| vec![Poly::one(g.nvars), g.clone()])
            .collect();
        for m in self.terms.keys() {
            for (j, &e) in m.x_exps().iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap() * &images[j];
                    powers[j].push(next);
                }
            }
        }
        let terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        Ok(substitute_rec(&terms, 0, self.nvars, target, &powers))
    }

    /// Sets `t = t0`.
    pub fn substitute_param(&self, t0: &Rational) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.t_exp();
            out.add_term(m.with_exp(self.nvars, 0), c * rational::pow(t0, e));
        }
        out
    }

    /// Exact division by `t^k`. On failure returns the terms whose `t`-power is
    /// below `k`.
    pub fn div_param_power(&self, k: u32) -> std::result::Result<Poly, Poly> {
        let residual: Vec<_> = self
            .terms
            .iter()
            .filter(|(m, _)| m.t_exp() < k)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        if !residual.is_empty() {
            return Err(Poly::from_terms(self.nvars, residual));
        }
        let n = self.nvars;
        Ok(Poly {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.with_exp(n, m.t_exp() - k), c.clone()))
                .collect(),
        })
    }

    /// Maximal total x-degree over the terms.
    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| Degree::Finite(m.x_degree()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn degree_in_variable(&self, i: usize) -> Result<Degree> {
        self.check_var(i)?;
        Ok(self
            .terms
            .keys()
            .map(|m| Degree::Finite(m.exp(i)))
            .max()
            .unwrap_or(Degree::NegInfinity))
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        vars.iter().try_for_each(|&i| self.check_var(i))
    }

    /// The `(x_i)_{i in vars}`-adic valuation: minimum over terms of the summed
    /// exponents of `vars`.
    pub fn valuation_in(&self, vars: &[usize]) -> Result<u32> {
        self.check_vars(vars)?;
        self.terms
            .keys()
            .map(|m| m.degree_in(vars))
            .min()
            .ok_or(Error::UndefinedValuation)
    }

    /// Sum of the terms whose summed exponent over `vars` equals `w`.
    pub fn homogeneous_component(&self, vars: &[usize], w: u32) -> Result<Poly> {
        self.check_vars(vars)?;
        Ok(Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(vars) == w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    /// Terms of total x-degree at most `max`.
    pub fn truncate(&self, max: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.x_degree() <= max)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Poly> {
        self.check_var(i)?;
        let slot = i - 1;
        Ok(Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0[slot] > 0)
                .map(|(m, c)| {
                    let e = m.0[slot];
                    (m.with_exp(slot, e - 1), c * rational::int(i64::from(e)))
                })
                .collect(),
        })
    }

    /// Whether every term only involves the given 1-based x-variables (and no `t`).
    pub fn supported_on(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|m| {
            m.t_exp() == 0
                && m
                    .x_exps()
                    .iter()
                    .enumerate()
                    .all(|(j, &e)| e == 0 || vars.contains(&(j + 1)))
        })
    }

    pub fn evaluate(&self, point: &[Rational], t_value: Option<&Rational>) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m.x_exps()) {
                if e > 0 {
                    v *= rational::pow(x, e);
                }
            }
            if m.t_exp() > 0 {
                let t = t_value.ok_or(Error::MissingParameter)?;
                v *= rational::pow(t, m.t_exp());
            }
            acc += v;
        }
        Ok(acc)
    }
}

fn capacity_hint(a: usize, b: usize) -> usize {
    a.saturating_mul(b).min(1 << 16)
}

const PACK_BITS: u32 = 16;
const PACK_SLOTS: usize = 8;

fn pack(m: &Monomial) -> u128 {
    m.0.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &e)| acc | (u128::from(e) << (PACK_BITS as usize * i)))
}

fn unpack(key: u128, slots: usize) -> Monomial {
    let mask = (1u128 << PACK_BITS) - 1;
    Monomial(
        (0..slots)
            .map(|i| ((key >> (PACK_BITS as usize * i)) & mask) as u32)
            .collect(),
    )
}

/// Integer numerators over the least common denominator.
fn integer_form(p: &Poly) -> (BigInt, Vec<(u128, BigInt)>) {
    let den = p
        .terms
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let terms = p
        .terms
        .iter()
        .map(|(m, c)| (pack(m), c.numer() * (&den / c.denom())))
        .collect();
    (den, terms)
}

/// Product over packed monomial keys with integer accumulation: `i128` while
/// it does not overflow, `BigInt` otherwise. `None` when exponents do not fit
/// the packing.
fn packed_mul(a: &Poly, b: &Poly) -> Option<Poly> {
    let slots = a.nvars + 1;
    if slots > PACK_SLOTS {
        return None;
    }
    let max_exp = |p: &Poly| p.terms.keys().flat_map(|m| m.0.iter().copied()).max().unwrap_or(0);
    if u64::from(max_exp(a)) + u64::from(max_exp(b)) >= 1 << PACK_BITS {
        return None;
    }
    let (da, ta) = integer_form(a);
    let (db, tb) = integer_form(b);
    let den = Rational::from_integer(da * db);

    let small: Option<(Vec<(u128, i64)>, Vec<(u128, i64)>)> = (|| {
        let conv = |t: &[(u128, BigInt)]| -> Option<Vec<(u128, i64)>> {
            t.iter().map(|(k, c)| c.to_i64().map(|v| (*k, v))).collect()
        };
        Some((conv(&ta)?, conv(&tb)?))
    })();

    let finish = |keys: Vec<(u128, BigInt)>| -> Poly {
        Poly {
            nvars: a.nvars,
            terms: keys
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (unpack(k, slots), Rational::from_integer(c) / &den))
                .collect(),
        }
    };

    if let Some((sa, sb)) = small {
        let mut acc: FxHashMap<u128, i128> =
            FxHashMap::with_capacity_and_hasher(capacity_hint(sa.len(), sb.len()), Default::default());
        let mut overflow = false;
        'outer: for &(ka, ca) in &sa {
            for &(kb, cb) in &sb {
                let prod = i128::from(ca) * i128::from(cb);
                let slot = acc.entry(ka + kb).or_insert(0);
                match slot.checked_add(prod) {
                    Some(v) => *slot = v,
                    None => {
                        overflow = true;
                        break 'outer;
                    }
                }
            }
        }
        if !overflow {
            return Some(finish(
                acc.into_iter().map(|(k, c)| (k, BigInt::from(c))).collect(),
            ));
        }
    }

    if let Some(out) = crate::modular::convolve(&ta, &tb) {
        return Some(finish(out));
    }
    let mut acc: FxHashMap<u128, BigInt> =
        FxHashMap::with_capacity_and_hasher(capacity_hint(ta.len(), tb.len()), Default::default());
    for (ka, ca) in &ta {
        for (kb, cb) in &tb {
            let prod = ca * cb;
            match acc.entry(ka + kb) {
                std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += prod,
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(prod);
                }
            }
        }
    }
    Some(finish(acc.into_iter().collect()))
}

/// Recursive expansion over the x-variables, grouping terms by the exponent of
/// the current variable so each cached power is multiplied once per group.
fn substitute_rec(
    terms: &[(&Monomial, &Rational)],
    slot: usize,
    nvars: usize,
    target: usize,
    powers: &[Vec<Poly>],
) -> Poly {
    if slot == nvars {
        let mut out = Poly::zero(target);
        for (m, c) in terms {
            let tm = Monomial::one(target).with_exp(target, m.t_exp());
            out.add_term(tm, (*c).clone());
        }
        return out;
    }
    let mut groups: BTreeMap<u32, Vec<(&Monomial, &Rational)>> = BTreeMap::new();
    for &(m, c) in terms {
        groups.entry(m.0[slot]).or_default().push((m, c));
    }
    let mut out = Poly::zero(target);
    for (e, group) in groups {
        let inner = substitute_rec(&group, slot + 1, nvars, target, powers);
        let piece = if e == 0 {
            inner
        } else {
            &inner * &powers[slot][e as usize]
        };
        if out.is_zero() {
            out = piece;
        } else {
            for (m, c) in piece.terms {
                out.add_term(m, c);
            }
        }
    }
    out
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;

            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomials over different variable sets")
            }
        }

        impl $trait<Poly> for Poly {
            type Output = Poly;

            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&Poly> for Poly {
            type Output = Poly;

            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // Ascending degree; within a degree x1 > x2 > ... > t.
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            a.full_degree()
                .cmp(&b.full_degree())
                .then_with(|| b.0.cmp(&a.0))
        });
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                m.fmt_with(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[n={}]({})", self.nvars, self)
    }
}
