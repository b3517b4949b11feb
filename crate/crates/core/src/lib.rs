//! Exact computation in the polynomial automorphism group `GA_n(Q)`.
//!
//! The crate provides sparse rational polynomials ([`poly`]), the monoid of
//! polynomial endomorphisms under substitution ([`endo`]), tame generators and
//! words ([`groups`]), the torus-action degeneration of a non-affine
//! automorphism to a triangular shear ([`degeneration`]), and the plane
//! degree-reduction factorization ([`planefactor`]).

pub mod degeneration;
pub mod endo;
pub mod error;
pub mod groups;
pub mod linalg;
mod modular;
pub mod parse;
pub mod planefactor;
pub mod poly;
pub mod rational;
pub mod selfcheck;

pub use endo::{CoeffVector, Endo, Point};
pub use error::{Error, Result};
pub use groups::{AffineMap, GeneratedSubgroup, Generator, Letter, NamedEndo, TriangularMap, Word};
pub use parse::{parse_endo, parse_poly};
pub use poly::{Degree, Monomial, Poly};
pub use rational::Rational;
