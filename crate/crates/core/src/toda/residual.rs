//! Exact residual of the cleared master equation
//! `z H_s'' H_s + H_s' H_s - z (H_s')^2 - P_s H_s^2 prod_t H_t^(-A_st)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::AlgebraError;
use crate::poly::ParamPoly;
use crate::series::TruncatedSeries;
use crate::toda::cartan::QuasiCartanMatrix;
use crate::toda::solve::{build_rhs_series, cleared_rhs_polynomial, ModuliSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualPath {
    /// Finite polynomial identity, no truncation.
    ExactPolynomial,
    /// Truncated series comparison through `checked_order`.
    Series,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub path: ResidualPath,
    /// Highest power of `z` whose residual coefficient is determined by the
    /// data; for the exact path this is the full degree of the identity.
    pub checked_order: Option<usize>,
    pub branes: Vec<TruncatedSeries>,
}

impl ResidualReport {
    pub fn is_zero(&self) -> bool {
        self.branes.iter().all(TruncatedSeries::is_zero)
    }

    /// Lowest `(brane, power)` with a nonzero residual coefficient.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.branes
            .iter()
            .enumerate()
            .filter_map(|(s, r)| r.first_nonzero().map(|k| (s, k)))
            .min_by_key(|&(_, k)| k)
    }
}

/// `z H'' H + H' H - z H'^2`, exact or truncated.
fn cleared_lhs(h: &TruncatedSeries, exact: bool) -> Result<TruncatedSeries, AlgebraError> {
    let d1 = h.d_dz();
    let d2 = d1.d_dz();
    if exact {
        let a = d2.shift_up().mul_exact(h)?;
        let b = d1.mul_exact(h)?;
        let c = d1.mul_exact(&d1)?.shift_up();
        a.add_exact(&b)?.sub_exact(&c)
    } else {
        let a = d2.shift_up().mul(h)?;
        let b = d1.mul(h)?;
        let c = d1.mul(&d1)?.shift_up();
        a.add(&b)?.sub(&c)
    }
}

/// Residual of the exact finite identity. `None` when some off-diagonal
/// entry is not a non-positive integer.
pub fn exact_polynomial_residual(
    a: &QuasiCartanMatrix,
    sol: &ModuliSolution,
) -> Result<Option<ResidualReport>, AlgebraError> {
    if !a.has_polynomial_coupling() {
        return Ok(None);
    }
    let h = sol.all_series();
    let params = sol.first_coefficients();
    let branes = (0..h.len())
        .into_par_iter()
        .map(|s| -> Result<TruncatedSeries, AlgebraError> {
            let lhs = cleared_lhs(&h[s], true)?;
            let rhs = cleared_rhs_polynomial(a, h, s)?
                .expect("polynomial coupling checked")
                .scale(&params[s])?;
            lhs.sub_exact(&rhs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let degree = branes.iter().filter_map(TruncatedSeries::order).max();
    Ok(Some(ResidualReport {
        path: ResidualPath::ExactPolynomial,
        checked_order: degree,
        branes,
    }))
}

/// Residual through `z^check_order` using truncated series and the
/// binomial-series powers. The relation at `z^k` involves `P_s^(k+1)`, so at
/// most `sol.order() - 1` orders can be checked.
pub fn series_residual(
    a: &QuasiCartanMatrix,
    sol: &ModuliSolution,
    check_order: usize,
) -> Result<ResidualReport, AlgebraError> {
    let h = sol.all_series();
    let params = sol.first_coefficients();
    let branes = (0..h.len())
        .into_par_iter()
        .map(|s| -> Result<TruncatedSeries, AlgebraError> {
            let lhs = cleared_lhs(&h[s], false)?;
            let hs2 = h[s].mul(&h[s])?;
            let rhs = build_rhs_series(a, h, s)?.mul(&hs2)?.scale(&params[s])?;
            Ok(lhs.sub(&rhs)?.truncate(check_order))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let checked = branes.iter().filter_map(TruncatedSeries::order).min();
    Ok(ResidualReport {
        path: ResidualPath::Series,
        checked_order: checked,
        branes,
    })
}

/// Chooses the exact polynomial path when the coupling is polynomial and the
/// solution is a finite polynomial (every brane's top stored coefficient
/// vanishes, so the stored coefficients are taken as the whole function);
/// otherwise checks the truncated series through `check_order`.
pub fn residual_check(
    a: &QuasiCartanMatrix,
    sol: &ModuliSolution,
    check_order: usize,
) -> Result<ResidualReport, AlgebraError> {
    let finite = sol
        .all_series()
        .iter()
        .all(|h| h.coeffs().last().is_some_and(ParamPoly::is_zero));
    if finite && sol.order() >= 1 {
        if let Some(report) = exact_polynomial_residual(a, sol)? {
            return Ok(report);
        }
    }
    series_residual(a, sol, check_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::toda::cartan::Algebra;
    use crate::toda::solve::{solve_coefficients, Mode};

    #[test]
    fn vacuum_has_zero_residual() {
        let a = Algebra::G2.cartan_matrix();
        let vacuum = solve_coefficients(&a, 4, Mode::Numeric(vec![rat(0, 1), rat(0, 1)])).unwrap();
        let report = residual_check(&a, &vacuum, 4).unwrap();
        assert_eq!(report.path, ResidualPath::ExactPolynomial);
        assert!(report.is_zero());
    }

    #[test]
    fn c2_polynomials_satisfy_exact_identity() {
        let a = Algebra::C2.cartan_matrix();
        let sol = solve_coefficients(&a, 6, Mode::Symbolic).unwrap();
        let report = residual_check(&a, &sol, 6).unwrap();
        assert_eq!(report.path, ResidualPath::ExactPolynomial);
        assert!(report.is_zero());
    }

    #[test]
    fn truncated_non_polynomial_solution_uses_series_path() {
        let a = Algebra::G2.cartan_matrix();
        // Order 8 stops inside H2's degree-10 range, so not finite.
        let sol = solve_coefficients(&a, 8, Mode::Symbolic).unwrap();
        let report = residual_check(&a, &sol, 8).unwrap();
        assert_eq!(report.path, ResidualPath::Series);
        assert_eq!(report.checked_order, Some(7));
        assert!(report.is_zero());
    }

    #[test]
    fn perturbed_g2_coefficient_shows_up_at_order_five() {
        let a = Algebra::G2.cartan_matrix();
        let sol = solve_coefficients(&a, 12, Mode::Symbolic).unwrap();
        let bumped = &sol.coefficient(0, 6) + &ParamPoly::one(2);
        let bad = sol.with_coefficient(0, 6, bumped);
        let report = residual_check(&a, &bad, 12).unwrap();
        assert!(!report.is_zero());
        let (_, k) = report.first_nonzero().unwrap();
        assert_eq!(k, 5);
    }
}
