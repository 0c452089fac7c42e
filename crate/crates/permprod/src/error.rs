use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Constructors validate their inputs eagerly, so downstream code can assume
/// well-formed values (degrees match, gammas are even, programs are acyclic).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("malformed image list: {0}")]
    MalformedImage(String),

    #[error("malformed cycles: {0}")]
    MalformedCycles(String),

    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("elements are not conjugate (cycle types differ)")]
    NotConjugate,

    #[error("no even conjugator exists (conjugacy class splits)")]
    NotConjugateInA,

    #[error("step gamma must be even")]
    OddGamma,

    #[error("{0} must be an even permutation")]
    OddElement(&'static str),

    #[error("input is the identity")]
    IdentityInput,

    #[error("identity element where a nontrivial one is required")]
    IdentityElement,

    #[error("degree {degree} too small, need at least {min}")]
    DegreeTooSmall { degree: usize, min: usize },

    #[error("not a product of disjoint transpositions: {0}")]
    NotTranspositionProduct(String),

    #[error("target count {target} exceeds limit {limit} for degree {degree}")]
    TargetTooLarge {
        target: usize,
        limit: usize,
        degree: usize,
    },

    #[error("bad target shape: {0}")]
    BadTargetShape(String),

    #[error("bad source shape: {0}")]
    BadSourceShape(String),

    #[error("no fresh points left in the degree")]
    NoFreshPoints,

    #[error("degree {degree} is not congruent to 2 mod 4")]
    DegreeNotTwoModFour { degree: usize },

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("vector must be nonempty")]
    EmptyVector,

    #[error("malformed program: {0}")]
    MalformedProgram(String),

    #[error("leakage output of {bits} bits exceeds the {max}-bit histogram limit")]
    OutputTooWide { bits: u32, max: u32 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
