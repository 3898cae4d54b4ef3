//! Brane models and the constants they induce.

pub mod constants;
pub mod model;
pub mod validate;

pub use constants::{
    b_matrix_with_intersections, brane_sign, compute_b_matrix, compute_brane_constants,
    compute_quasi_cartan, rules_to_dims, solve_intersection_dims, BraneConstants,
    IntersectionDims, IntersectionRule,
};
pub use model::{Brane, BraneKind, BraneModel, Charge, FactorSpace, Form, ModelLoadError, ScalarSector, Sign, Topology};
pub use validate::{validate_model, Check, CheckKind, ValidationReport};
