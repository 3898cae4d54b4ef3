use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("arity mismatch: {left} vs {right} parameter symbols")]
    ArityMismatch { left: usize, right: usize },
    #[error("series power requires unit constant term, found {0}")]
    NonUnitConstantTerm(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("quasi-Cartan matrix diagonal entry {index} is {value}, expected 2")]
    BadDiagonal { index: usize, value: String },
    #[error("truncation order must be at least 1")]
    ZeroOrder,
    #[error("numeric mode needs {expected} parameter values, got {got}")]
    MissingValues { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("factor space list is empty")]
    NoFactorSpaces,
    #[error("first factor space must be one-dimensional, got dimension {0}")]
    FirstSpaceNotLine(u32),
    #[error("factor space {0} has zero dimension")]
    ZeroDimension(usize),
    #[error("sign {value} for {what} must be +1 or -1")]
    BadSign { what: String, value: i64 },
    #[error("brane {brane} refers to unknown form {form:?}")]
    UnknownForm { brane: usize, form: String },
    #[error("brane {brane} worldvolume index {index} is outside 1..={n}")]
    BadIndex { brane: usize, index: usize, n: usize },
    #[error("brane {0} has an empty worldvolume")]
    EmptyWorldvolume(usize),
    #[error("brane {0} has zero charge")]
    ZeroCharge(usize),
    #[error("duplicate form name {0:?}")]
    DuplicateForm(String),
    #[error("scalar metric h must be symmetric")]
    AsymmetricScalarMetric,
    #[error("scalar metric h is singular")]
    SingularScalarMetric,
    #[error("coupling vector for form {form:?} has length {got}, expected {expected}")]
    CouplingLength { form: String, expected: usize, got: usize },
    #[error("coupling given for unknown form {0:?}")]
    CouplingForUnknownForm(String),
    #[error("B_{{{0}{0}}} = 0 violates the nondegeneracy condition B_ss != 0")]
    ZeroDiagonal(usize),
    #[error("model has no branes")]
    NoBranes,
    #[error("target matrix is {got}x{got}, model has {expected} branes")]
    TargetSize { expected: usize, got: usize },
    #[error("pair ({0}, {1}): intersection dimension {2} is not a non-negative integer")]
    NoIntegerSolution(usize, usize, String),
    #[error("pair ({0}, {1}): B_ss' = {2} but B_s's = {3}; the target asymmetry does not match the fixed diagonal")]
    Inconsistent(usize, usize, String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("H_{brane}(z = {z}) = {value} is not positive")]
    NonPositiveModulus { brane: usize, z: String, value: String },
    #[error("profile has {profile} branes but the solution has {solution}")]
    BraneCount { profile: usize, solution: usize },
    #[error("need {expected} parameter values, got {got}")]
    MissingValues { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at z = {z}: tolerance not achievable")]
    StepFailure { z: f64 },
    #[error("H_{brane} = {value} <= 0 at z = {z}")]
    PositivityLoss { brane: usize, z: f64, value: f64 },
    #[error("invalid integration interval: need 0 < z0 < z1, got z0 = {z0}, z1 = {z1}")]
    BadInterval { z0: f64, z1: f64 },
    #[error("seeding needs series order >= {needed}, solution has order {got}")]
    SeedOrder { needed: usize, got: usize },
    #[error("need {expected} parameter values, got {got}")]
    MissingValues { expected: usize, got: usize },
}
