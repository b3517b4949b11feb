use thiserror::Error;

use crate::planefactor::Rejection;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("valuation of the zero polynomial is undefined (+infinity)")]
    UndefinedValuation,

    #[error("polynomial mentions t but no value for t was supplied")]
    MissingParameter,

    #[error("component {component} mentions the parameter t")]
    UnexpectedParameter { component: usize },

    #[error("every component is zero; degree is undefined")]
    DegenerateInput,

    #[error("degree {degree} exceeds filtration bound {bound}")]
    Filtration { degree: u32, bound: u32 },

    #[error("coefficient vector has length {found}, expected {expected}")]
    CoeffLength { expected: usize, found: usize },

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("not an affine map: {0}")]
    NotAffine(String),

    #[error("not a triangular map: {0}")]
    NotTriangular(String),

    #[error("letter `{0}` has exponent -1 but no registered inverse")]
    InverseUnavailable(String),

    #[error("input is affine; nothing to normalize")]
    NothingToNormalize,

    #[error("affine correction of a non-affine input produced the identity")]
    InconsistentInput,

    #[error("normalization required: {0}")]
    NormalizationRequired(String),

    /// `f1(0, x2, ..., xn) = 0`, so `x1` divides `f1`; a coordinate with identity
    /// affine part other than `x1` is irreducible, so the input is not an automorphism.
    #[error("not a coordinate: x1 divides first component {f1}")]
    NotACoordinate { f1: Poly },

    #[error("negative power t^-{shift} does not clear in component {component}; residual {residual}")]
    OverringViolation {
        component: usize,
        shift: u32,
        residual: Poly,
    },

    #[error("closure sample t0 = 0 is not allowed")]
    InvalidSample,

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(Box<Rejection>),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
