//! Symbolic check of the polynomial-degree conjecture.

use serde::{Serialize, Serializer};

use crate::error::{AlgebraError, SolverError};
use crate::poly::ParamPoly;
use crate::rational::Rational;
use crate::toda::cartan::{weyl_degrees, QuasiCartanMatrix};
use crate::toda::solve::{solve_coefficients, Mode, ModuliSolution};

pub const DEFAULT_MARGIN: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    PolynomialConfirmed,
    /// First nonzero coefficient above the predicted degree sits at this power.
    ViolationAtOrder(usize),
    DegreesUndefined,
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::PolynomialConfirmed => "polynomial-confirmed".to_string(),
            Verdict::ViolationAtOrder(k) => format!("violation-at-order-{k}"),
            Verdict::DegreesUndefined => "degrees-undefined".to_string(),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraneVerdict {
    pub brane: usize,
    /// `n_s` as an exact rational.
    pub predicted_degree: Rational,
    /// Inclusive range of powers required to vanish, when degrees are defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checked_range: Option<(usize, usize)>,
    /// `P_s^(n_s)`, which the conjecture also expects to be nonzero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading_coefficient: Option<ParamPoly>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<ParamPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub matrix: QuasiCartanMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<&'static str>,
    pub margin: usize,
    /// Order the recurrence was run to; `None` when degrees are undefined.
    pub solved_order: Option<usize>,
    pub branes: Vec<BraneVerdict>,
}

impl ConjectureReport {
    pub fn confirmed(&self) -> bool {
        self.branes
            .iter()
            .all(|b| b.verdict == Verdict::PolynomialConfirmed)
    }

    pub fn degrees(&self) -> Vec<Rational> {
        self.branes.iter().map(|b| b.predicted_degree.clone()).collect()
    }
}

/// Runs the recurrence symbolically to `max(n_s) + margin` and checks that
/// every coefficient above `n_s` vanishes as a polynomial in `P_1..P_m`.
///
/// Returns the solution alongside the report so callers can reuse it.
pub fn verify_conjecture_with_solution(
    a: &QuasiCartanMatrix,
    margin: usize,
) -> Result<(ConjectureReport, Option<ModuliSolution>), SolverError> {
    let degrees = weyl_degrees(a)?;
    let int_degrees: Option<Vec<usize>> = degrees
        .iter()
        .map(|n| {
            n.to_i64()
                .filter(|&v| v > 0)
                .map(|v| v as usize)
        })
        .collect();

    let Some(int_degrees) = int_degrees else {
        let branes = degrees
            .into_iter()
            .enumerate()
            .map(|(s, n)| BraneVerdict {
                brane: s + 1,
                predicted_degree: n,
                checked_range: None,
                leading_coefficient: None,
                verdict: Verdict::DegreesUndefined,
                first_violation: None,
            })
            .collect();
        let report = ConjectureReport {
            matrix: a.clone(),
            algebra: a.classify(),
            margin,
            solved_order: None,
            branes,
        };
        return Ok((report, None));
    };

    let order = int_degrees.iter().copied().max().unwrap_or(1) + margin;
    let sol = solve_coefficients(a, order, Mode::Symbolic)?;
    let branes = int_degrees
        .iter()
        .zip(degrees)
        .enumerate()
        .map(|(s, (&n, exact_n))| {
            let violation = (n + 1..=order)
                .map(|k| (k, sol.coefficient(s, k)))
                .find(|(_, c)| !c.is_zero());
            let (verdict, first_violation) = match violation {
                None => (Verdict::PolynomialConfirmed, None),
                Some((k, c)) => (Verdict::ViolationAtOrder(k), Some(c)),
            };
            BraneVerdict {
                brane: s + 1,
                predicted_degree: exact_n,
                checked_range: (n < order).then_some((n + 1, order)),
                leading_coefficient: Some(sol.coefficient(s, n)),
                verdict,
                first_violation,
            }
        })
        .collect();
    let report = ConjectureReport {
        matrix: a.clone(),
        algebra: a.classify(),
        margin,
        solved_order: Some(order),
        branes,
    };
    Ok((report, Some(sol)))
}

pub fn verify_conjecture(a: &QuasiCartanMatrix, margin: usize) -> Result<ConjectureReport, SolverError> {
    verify_conjecture_with_solution(a, margin).map(|(r, _)| r)
}

/// True when the error is the singular-matrix case, which callers usually
/// report as undefined degrees.
pub fn is_singular(err: &SolverError) -> bool {
    matches!(err, SolverError::Algebra(AlgebraError::SingularMatrix))
}
