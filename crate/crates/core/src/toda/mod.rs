//! Master-equation solver: recurrence, exact residuals, degree conjecture.

pub mod cartan;
pub mod conjecture;
pub mod residual;
pub mod solve;

pub use cartan::{weyl_degrees, Algebra, QuasiCartanMatrix};
pub use conjecture::{verify_conjecture, ConjectureReport, Verdict, DEFAULT_MARGIN};
pub use residual::{residual_check, ResidualPath, ResidualReport};
pub use solve::{build_rhs_series, solve_coefficients, Mode, ModuliSolution};
