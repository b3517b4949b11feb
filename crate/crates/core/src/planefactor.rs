//! Plane automorphisms as words in affine and triangular maps.
//!
//! Degree reduction: for `σ = (f, g)` with `deg f = d1`, `deg g = d2`, one of
//! the leading forms must be a constant multiple of a power of the other. The
//! elementary map `τ` that cancels the larger leading form is composed on the
//! left, `σ' = τ σ`, and `τ⁻¹` is appended to the word, so that at every stage
//! `source = word · current`. When `current` is affine it becomes the last
//! letter.

use std::fmt;

use num_traits::Zero;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::groups::{AffineMap, Generator, Letter, TriangularMap, Word};
use crate::poly::{Degree, Poly};
use crate::rational::{self, Rational};

/// Top-degree homogeneous part of `f`.
pub fn leading_form(f: &Poly) -> Result<Poly> {
    let Degree::Finite(d) = f.total_degree() else {
        return Err(Error::DegenerateInput);
    };
    let vars: Vec<usize> = (1..=f.nvars()).collect();
    f.homogeneous_component(&vars, d)
}

/// One line of the reduction log.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub before: (u32, u32),
    pub after: (u32, u32),
    /// Letters appended to the word, already inverted.
    pub letters: Vec<Letter>,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) -> ({}, {}): ",
            self.before.0, self.before.1, self.after.0, self.after.1
        )?;
        let w = Word::new(2, self.letters.clone()).map_err(|_| fmt::Error)?;
        write!(f, "{w}")
    }
}

#[derive(Debug, Clone)]
pub struct PlaneFactorization {
    pub word: Word,
    pub source: Endo,
    pub steps: Vec<ReductionStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RejectionReason {
    /// The Jacobian determinant is not a nonzero constant.
    NonConstantJacobian { jacobian: Poly },
    /// Neither degree divides the other.
    Divisibility { d1: u32, d2: u32 },
    /// `larger` is not a constant multiple of `smaller^k`.
    NotProportional { larger: Poly, smaller: Poly, k: u32 },
    /// Cancelling the top form did not lower `deg f + deg g`.
    NoDecrease { before: (u32, u32), after: (u32, u32) },
    /// The reduction ended in an affine map with singular linear part.
    SingularAffine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub reason: RejectionReason,
    /// The reduced map at the point of failure.
    pub at: Endo,
    pub steps: Vec<ReductionStep>,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            RejectionReason::NonConstantJacobian { jacobian } => {
                write!(f, "jacobian determinant {jacobian} is not a nonzero constant")?
            }
            RejectionReason::Divisibility { d1, d2 } => {
                write!(f, "degrees ({d1}, {d2}) do not divide one another")?
            }
            RejectionReason::NotProportional { larger, smaller, k } => write!(
                f,
                "leading form {larger} is not proportional to ({smaller})^{k}"
            )?,
            RejectionReason::NoDecrease { before, after } => write!(
                f,
                "degrees ({}, {}) -> ({}, {}) did not decrease",
                before.0, before.1, after.0, after.1
            )?,
            RejectionReason::SingularAffine => f.write_str("affine remainder is singular")?,
        }
        write!(f, " at {} after {} step(s)", self.at, self.steps.len())
    }
}

#[derive(Debug, Clone)]
pub enum PlaneVerdict {
    Automorphism(PlaneFactorization),
    Rejected(Rejection),
}

impl PlaneVerdict {
    pub fn is_automorphism(&self) -> bool {
        matches!(self, PlaneVerdict::Automorphism(_))
    }
}

fn degrees(e: &Endo) -> (u32, u32) {
    let d = |p: &Poly| p.total_degree().finite().unwrap_or(0);
    (d(e.component(1)), d(e.component(2)))
}

/// `c` with `larger = c · smaller^k`, if any.
fn proportionality(larger: &Poly, smaller: &Poly, k: u32) -> Option<Rational> {
    let power = smaller.pow(k);
    let (m, c) = power.terms().next_back()?;
    let ratio = larger.coeff(m) / c;
    (!ratio.is_zero() && *larger == power.scale(&ratio)).then_some(ratio)
}

fn elementary(c: &Rational, k: u32) -> TriangularMap {
    let x2 = Poly::var(2, 2);
    TriangularMap::shear(2, x2.pow(k).scale(c)).expect("elementary shear")
}

/// Factors a plane automorphism, or reports why `σ` is not one.
pub fn factor_plane(sigma: &Endo) -> Result<PlaneFactorization> {
    if sigma.n() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: sigma.n(),
        });
    }
    let reject = |reason, at: &Endo, steps: &[ReductionStep]| {
        Error::NotAnAutomorphism(Box::new(Rejection {
            reason,
            at: at.clone(),
            steps: steps.to_vec(),
        }))
    };

    let jac = sigma.jacobian_det();
    if jac.as_constant().map_or(true, |c| c.is_zero()) {
        return Err(reject(
            RejectionReason::NonConstantJacobian { jacobian: jac },
            sigma,
            &[],
        ));
    }

    let swap = AffineMap::transposition(2, 1, 2)?;
    let mut letters: Vec<Letter> = Vec::new();
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut current = sigma.clone();
    loop {
        let (d1, d2) = degrees(&current);
        if d1.max(d2) <= 1 {
            let Ok(a) = AffineMap::from_endo(&current) else {
                return Err(reject(RejectionReason::SingularAffine, &current, &steps));
            };
            let letter = Letter::new(Generator::Affine(a));
            letters.push(letter.clone());
            steps.push(ReductionStep {
                before: (d1, d2),
                after: (d1, d2),
                letters: vec![letter],
            });
            break;
        }
        let lf = leading_form(current.component(1))?;
        let lg = leading_form(current.component(2))?;
        // τ and the letters for τ⁻¹
        let (tau, emitted) = if d1 == d2 {
            let Some(c) = proportionality(&lg, &lf, 1) else {
                let reason = RejectionReason::NotProportional {
                    larger: lg,
                    smaller: lf,
                    k: 1,
                };
                return Err(reject(reason, &current, &steps));
            };
            // (x1, x2 - c x1)
            let tau = AffineMap::new(
                vec![
                    vec![rational::one(), rational::zero()],
                    vec![-c, rational::one()],
                ],
                vec![rational::zero(), rational::zero()],
            )?;
            let inv = Letter::new(Generator::Affine(tau.inverse()));
            (tau.to_endo(), vec![inv])
        } else {
            let (big, small) = if d1 > d2 { (d1, d2) } else { (d2, d1) };
            if big % small != 0 {
                let reason = RejectionReason::Divisibility { d1, d2 };
                return Err(reject(reason, &current, &steps));
            }
            let k = big / small;
            let (larger, smaller) = if d1 > d2 { (&lf, &lg) } else { (&lg, &lf) };
            let Some(c) = proportionality(larger, smaller, k) else {
                let reason = RejectionReason::NotProportional {
                    larger: larger.clone(),
                    smaller: smaller.clone(),
                    k,
                };
                return Err(reject(reason, &current, &steps));
            };
            let beta = elementary(&(-c), k);
            if d1 > d2 {
                // (x1 - c x2^k, x2)
                let inv = Letter::new(Generator::Triangular(beta.inverse()));
                (beta.to_endo(), vec![inv])
            } else {
                // (x1, x2 - c x1^k) = s β s
                let s = swap.to_endo();
                let tau = s.compose(&beta.to_endo())?.compose(&s)?;
                let inv = vec![
                    Letter::new(Generator::Affine(swap.clone())),
                    Letter::new(Generator::Triangular(beta.inverse())),
                    Letter::new(Generator::Affine(swap.clone())),
                ];
                (tau, inv)
            }
        };
        let next = tau.compose(&current)?;
        let after = degrees(&next);
        if after.0 + after.1 >= d1 + d2 {
            let reason = RejectionReason::NoDecrease {
                before: (d1, d2),
                after,
            };
            return Err(reject(reason, &current, &steps));
        }
        letters.extend(emitted.iter().cloned());
        steps.push(ReductionStep {
            before: (d1, d2),
            after,
            letters: emitted,
        });
        current = next;
    }

    let word = Word::new(2, letters)?.normalized()?;
    if word.to_endo()? != *sigma || !word.alternates() {
        return Err(Error::CrossCheck(format!(
            "factorization {word} does not recompose to {sigma}"
        )));
    }
    Ok(PlaneFactorization {
        word,
        source: sigma.clone(),
        steps,
    })
}

/// Runs [`factor_plane`] and turns a rejection into a verdict.
pub fn is_plane_automorphism(sigma: &Endo) -> Result<PlaneVerdict> {
    match factor_plane(sigma) {
        Ok(f) => Ok(PlaneVerdict::Automorphism(f)),
        Err(Error::NotAnAutomorphism(r)) => Ok(PlaneVerdict::Rejected(*r)),
        Err(e) => Err(e),
    }
}
