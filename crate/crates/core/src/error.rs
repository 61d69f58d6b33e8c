use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("division by zero")]
    DivisionByZero,

    #[error("vectors do not span the ambient space")]
    NotSpanning,

    #[error("vectors do not lie in an open halfspace")]
    NoHalfspace,

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("point lies outside the cone generated by the system")]
    ExteriorPoint,

    #[error("evaluation produced a non-rational value; this is a bug")]
    NonRealValue,

    #[error(
        "twist is not generic: basis {basis:?}, pole {pole}, factor {factor} \
         lands on a root of unity equal to 1"
    )]
    GenericityViolated {
        basis: Vec<usize>,
        pole: String,
        factor: usize,
    },

    #[error("relation is degenerate: zero form with unit coefficient product")]
    DegenerateRelation,

    #[error("denominator directions do not span the ambient space")]
    EssentialityViolated,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("normals do not span the dual space")]
    NonSpanningNormals,

    #[error("unknown chamber id {0:?}")]
    UnknownChamber(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
