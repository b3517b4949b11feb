//! Degeneration of a non-affine automorphism to a triangular shear.
//!
//! Given `φ` of degree `d >= 2`:
//!
//! 1. [`normalize`] replaces `φ` by `σ·(α⁻¹φ)·σ`, where `α` is the affine part
//!    of `φ` and `σ` swaps `x1` with the first coordinate that is not fixed.
//!    The result `ψ = (f1, ..., fn)` has identity affine part and `f1 != x1`.
//! 2. [`degeneration_data`] computes `g0 = f1(0, x2, ..., xn)`, its valuation
//!    `w >= 2` in `x2, ..., xn`, and its lowest homogeneous part `h`.
//! 3. [`torus_conjugate`] builds the curve `ψ_t = α_t⁻¹ ψ α_t` for the torus
//!    action `α_t = (t^w x1, t x2, ..., t xn)`. Component 1 is
//!    `t^-w f1(t^w x1, t x̂)` and the others `t^-1 f_i(t^w x1, t x̂)`; the
//!    negative powers are divided out exactly, so the curve lies in
//!    `Q[x, t]^n`.
//! 4. At `t = 0` the curve reaches `(x1 + h, x2, ..., xn)`, while every
//!    `t0 != 0` gives `α_{t0}⁻¹ ψ α_{t0}`, an element of `⟨A, φ⟩` of degree
//!    `d`. This is the constructive witness that the shear lies in the closure
//!    of `⟨A, φ⟩ ∩ G_{<=d}`.

use std::fmt;

use num_traits::Zero;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::groups::{AffineMap, GeneratedSubgroup, Generator, Letter, NamedEndo, Word};
use crate::poly::Poly;
use crate::rational::{self, Rational};

/// `α_t = (t^w x1, t x2, ..., t xn)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusAction {
    n: usize,
    w: u32,
}

impl TorusAction {
    pub fn new(n: usize, w: u32) -> Result<Self> {
        if w < 2 {
            return Err(Error::NormalizationRequired(format!(
                "torus weight must be at least 2, got {w}"
            )));
        }
        Ok(TorusAction { n, w })
    }

    pub fn weight(&self) -> u32 {
        self.w
    }

    /// Images of `x1, ..., xn` as polynomials in `x` and `t`.
    pub fn images(&self) -> Vec<Poly> {
        let t = Poly::param(self.n);
        (1..=self.n)
            .map(|i| {
                let power = if i == 1 { t.pow(self.w) } else { t.clone() };
                power * Poly::var(self.n, i)
            })
            .collect()
    }

    /// The affine map `α_{t0}`; `t0` must be nonzero.
    pub fn at(&self, t0: &Rational) -> Result<AffineMap> {
        if t0.is_zero() {
            return Err(Error::InvalidSample);
        }
        let scalings: Vec<Rational> = (1..=self.n)
            .map(|i| {
                if i == 1 {
                    rational::pow(t0, self.w)
                } else {
                    t0.clone()
                }
            })
            .collect();
        AffineMap::diagonal(&scalings)
    }
}

/// The curve `t ↦ ψ_t` with all negative powers of `t` cleared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamEndo {
    n: usize,
    components: Vec<Poly>,
    source_degree: u32,
    weight: u32,
}

impl ParamEndo {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn source_degree(&self) -> u32 {
        self.source_degree
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Sets `t = t0`. Zero is allowed and gives the limit.
    pub fn specialize(&self, t0: &Rational) -> Endo {
        Endo::new(
            self.components
                .iter()
                .map(|p| p.substitute_param(t0))
                .collect(),
        )
        .expect("specialization is t-free")
    }
}

impl fmt::Display for ParamEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// `(g0, w, h)` for a normalized automorphism of degree `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationData {
    pub g0: Poly,
    pub w: u32,
    pub h: Poly,
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationRecord {
    pub source: Endo,
    /// `α⁻¹` when the affine part `α` of the source was not the identity.
    pub applied_affine_inverse: Option<AffineMap>,
    /// `(1, i)` when the transposition `x1 ↔ xi` was applied.
    pub applied_transposition: Option<(usize, usize)>,
    pub result: Endo,
}

impl NormalizationRecord {
    /// The affine factors `(L, R)` with `result = L · source · R`.
    pub fn affine_factors(&self) -> (AffineMap, AffineMap) {
        let n = self.source.n();
        let swap = self
            .applied_transposition
            .map(|(i, j)| AffineMap::transposition(n, i, j).expect("valid indices"))
            .unwrap_or_else(|| AffineMap::identity(n));
        let corr = self
            .applied_affine_inverse
            .clone()
            .unwrap_or_else(|| AffineMap::identity(n));
        (swap.compose(&corr), swap)
    }
}

fn x_hat(n: usize) -> Vec<usize> {
    (2..=n).collect()
}

/// Brings a non-affine `φ` to identity affine part and `f1 != x1`.
///
/// The transposition is `x1 ↔ xi` for the least `i` with `f_i != x_i` after the
/// affine correction; none is applied when `i = 1`.
pub fn normalize(phi: &Endo) -> Result<NormalizationRecord> {
    let n = phi.n();
    let d = phi.degree()?;
    if d < 2 {
        return Err(if phi.is_affine() {
            Error::NothingToNormalize
        } else {
            Error::NormalizationRequired(format!("degree {d} < 2 and not affine"))
        });
    }
    let alpha = AffineMap::from_endo(&phi.affine_part())?;
    let (corrected, applied_affine_inverse) = if alpha.is_identity() {
        (phi.clone(), None)
    } else {
        let inv = alpha.inverse();
        (inv.to_endo().compose(phi)?, Some(inv))
    };
    let id = Endo::identity(n);
    if corrected == id {
        return Err(Error::InconsistentInput);
    }
    let i = (1..=n)
        .find(|&i| corrected.component(i) != id.component(i))
        .expect("not the identity");
    let (result, applied_transposition) = if i == 1 {
        (corrected, None)
    } else {
        let sigma = AffineMap::transposition(n, 1, i)?.to_endo();
        (sigma.compose(&corrected)?.compose(&sigma)?, Some((1, i)))
    };
    Ok(NormalizationRecord {
        source: phi.clone(),
        applied_affine_inverse,
        applied_transposition,
        result,
    })
}

fn check_normalized(psi: &Endo) -> Result<u32> {
    let d = psi.degree()?;
    if d < 2 {
        return Err(Error::NormalizationRequired(format!("degree {d} < 2")));
    }
    if !psi.has_identity_affine_part() {
        return Err(Error::NormalizationRequired(
            "affine part is not the identity".into(),
        ));
    }
    if *psi.component(1) == Poly::var(psi.n(), 1) {
        return Err(Error::NormalizationRequired(
            "first component equals x1".into(),
        ));
    }
    Ok(d)
}

/// `g0 = f1(0, x̂)`, `w = ord_x̂(g0)`, `h` = degree-`w` part of `g0`.
pub fn degeneration_data(psi: &Endo) -> Result<DegenerationData> {
    let d = check_normalized(psi)?;
    let n = psi.n();
    let f1 = psi.component(1);
    let mut images: Vec<Poly> = (1..=n).map(|i| Poly::var(n, i)).collect();
    images[0] = Poly::zero(n);
    let g0 = f1.substitute(&images)?;
    if g0.is_zero() {
        return Err(Error::NotACoordinate { f1: f1.clone() });
    }
    let vars = x_hat(n);
    let w = g0.valuation_in(&vars)?;
    let h = g0.homogeneous_component(&vars, w)?;
    if !(2..=d).contains(&w) || h.is_zero() {
        return Err(Error::CrossCheck(format!(
            "valuation w = {w} outside [2, {d}] for g0 = {g0}"
        )));
    }
    Ok(DegenerationData { g0, w, h, d })
}

/// The curve `α_t⁻¹ ψ α_t` for the weight `w`, with negative powers of `t`
/// divided out exactly.
///
/// Any `w >= 2` is accepted; a weight that does not match the input yields
/// [`Error::OverringViolation`] (or a different limit).
pub fn torus_conjugate(psi: &Endo, w: u32) -> Result<ParamEndo> {
    let n = psi.n();
    let action = TorusAction::new(n, w)?;
    let images = action.images();
    let mut components = Vec::with_capacity(n);
    for (k, f) in psi.components().iter().enumerate() {
        let shift = if k == 0 { w } else { 1 };
        let raised = f.substitute(&images)?;
        let cleared = raised
            .div_param_power(shift)
            .map_err(|residual| Error::OverringViolation {
                component: k + 1,
                shift,
                residual,
            })?;
        components.push(cleared);
    }
    let curve = ParamEndo {
        n,
        components,
        source_degree: psi.degree()?,
        weight: w,
    };
    if curve.specialize(&rational::one()) != *psi {
        return Err(Error::CrossCheck(
            "curve at t = 1 differs from its source".into(),
        ));
    }
    Ok(curve)
}

fn shear_of(n: usize, h: &Poly) -> Endo {
    let mut comps: Vec<Poly> = (1..=n).map(|i| Poly::var(n, i)).collect();
    comps[0] = &comps[0] + h;
    Endo::new(comps).expect("well-formed shear")
}

/// `(x1 + h, x2, ..., xn)`, computed from `h` and independently as the `t = 0`
/// value of the torus curve; the two must agree.
pub fn degenerate(psi: &Endo) -> Result<Endo> {
    let data = degeneration_data(psi)?;
    let formula = shear_of(psi.n(), &data.h);
    let limit = torus_conjugate(psi, data.w)?.specialize(&rational::zero());
    if limit != formula {
        return Err(Error::CrossCheck(format!(
            "limit {limit} disagrees with shear {formula}"
        )));
    }
    Ok(formula)
}

/// An element of `B \ A` in the closure of `⟨A, φ⟩ ∩ G_{<=deg φ}`.
pub fn triangular_witness(phi: &Endo) -> Result<Endo> {
    let d = phi.degree()?;
    let record = normalize(phi)?;
    let shear = degenerate(&record.result)?;
    let w = shear.degree()?;
    if !shear.is_triangular() || shear.is_affine() || !(2..=d).contains(&w) {
        return Err(Error::CrossCheck(format!(
            "witness {shear} is not a non-affine triangular map of degree in [2, {d}]"
        )));
    }
    Ok(shear)
}

/// Outcome of checking `ψ_t ≡ limit (mod t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitReport {
    pub w: u32,
    pub d: u32,
    /// `limit_1 - x1`.
    pub h: Poly,
    /// Per component, the least power of `t` in `ψ_t - limit`; `None` when the
    /// difference is zero.
    pub valuations: Vec<Option<u32>>,
    pub pass: bool,
}

pub fn verify_limit(curve: &ParamEndo, limit: &Endo) -> Result<LimitReport> {
    if curve.n != limit.n() {
        return Err(Error::Dimension {
            expected: curve.n,
            found: limit.n(),
        });
    }
    let valuations: Vec<Option<u32>> = curve
        .components
        .iter()
        .zip(limit.components())
        .map(|(c, l)| (c - l).param_valuation())
        .collect();
    let pass = valuations.iter().all(|v| v.map_or(true, |k| k >= 1));
    Ok(LimitReport {
        w: curve.weight,
        d: curve.source_degree,
        h: limit.component(1) - &Poly::var(limit.n(), 1),
        valuations,
        pass,
    })
}

/// Everything the degeneration pipeline produces for one input.
#[derive(Debug, Clone)]
pub struct Witness {
    pub record: NormalizationRecord,
    pub data: DegenerationData,
    pub curve: ParamEndo,
    pub limit: Endo,
    pub report: LimitReport,
}

pub fn witness(phi: &Endo) -> Result<Witness> {
    let record = normalize(phi)?;
    let data = degeneration_data(&record.result)?;
    let curve = torus_conjugate(&record.result, data.w)?;
    let limit = triangular_witness(phi)?;
    let report = verify_limit(&curve, &limit)?;
    Ok(Witness {
        record,
        data,
        curve,
        limit,
        report,
    })
}

/// A point `ψ_{t0}` on the curve together with a word over `A ∪ {φ}` that
/// evaluates to it.
#[derive(Debug, Clone)]
pub struct ClosurePoint {
    pub t0: Rational,
    pub map: Endo,
    pub word: Word,
}

/// Specializations of the normalized curve at nonzero `samples`, each
/// certified as `α_{t0}⁻¹ ψ α_{t0}` and as a word in `⟨A, φ⟩`.
pub fn closure_witness(phi: &Endo, samples: &[Rational]) -> Result<Vec<ClosurePoint>> {
    if samples.iter().any(Zero::is_zero) {
        return Err(Error::InvalidSample);
    }
    let record = normalize(phi)?;
    let psi = &record.result;
    let data = degeneration_data(psi)?;
    let curve = torus_conjugate(psi, data.w)?;
    let action = TorusAction::new(psi.n(), data.w)?;
    let named = NamedEndo::new(phi.to_string(), phi.clone(), None)?;
    let subgroup = GeneratedSubgroup::affine_and(named.clone());
    let (left, right) = record.affine_factors();

    samples
        .iter()
        .map(|t0| {
            let map = curve.specialize(t0);
            let a = action.at(t0)?;
            let conj = a.inverse().to_endo().compose(psi)?.compose(&a.to_endo())?;
            if conj != map {
                return Err(Error::CrossCheck(format!(
                    "specialization at t = {t0} is not the torus conjugate"
                )));
            }
            let word = Word::new(
                psi.n(),
                vec![
                    Letter::new(Generator::Affine(a.inverse().compose(&left))),
                    Letter::new(Generator::Named(named.clone())),
                    Letter::new(Generator::Affine(right.compose(&a))),
                ],
            )?;
            if !subgroup.admits(&word) || word.to_endo()? != map {
                return Err(Error::CrossCheck(format!(
                    "word for t = {t0} does not evaluate to the specialization"
                )));
            }
            if map.degree()? != data.d {
                return Err(Error::CrossCheck(format!(
                    "specialization at t = {t0} has degree {} instead of {}",
                    map.degree()?,
                    data.d
                )));
            }
            Ok(ClosurePoint {
                t0: t0.clone(),
                map,
                word,
            })
        })
        .collect()
}
