//! Solution constants: `B_{ss'}`, the quasi-Cartan matrix, `eps_s`, `K_s`,
//! `h_s`, `B_s`, and the inverse problem of intersection rules.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::brane::model::{BraneKind, BraneModel, Sign};
#[cfg(test)]
use crate::brane::model::Charge;
use crate::error::ModelError;
use crate::matrix::RationalMatrix;
use crate::rational::Rational;
use crate::toda::QuasiCartanMatrix;

/// Intersection dimensions keyed by 0-based brane pair `(s, t)` with `s < t`.
pub type IntersectionDims = BTreeMap<(usize, usize), u32>;

/// Intersection dimensions read off the model's worldvolume index sets.
pub fn model_intersections(model: &BraneModel) -> IntersectionDims {
    let m = model.branes().len();
    let mut out = IntersectionDims::new();
    for s in 0..m {
        for t in s + 1..m {
            out.insert((s, t), model.intersection_dim(s, t));
        }
    }
    out
}

/// `d(I_s) d(I_t) / (2 - D) + chi_s chi_t lambda_{a_s} . lambda_{a_t}`, the
/// part of `B_{st}` that does not depend on the intersection.
fn b_background(model: &BraneModel, s: usize, t: usize) -> Rational {
    let branes = model.branes();
    let d = Rational::from(model.total_dimension() as i64);
    let ds = Rational::from(model.worldvolume_dim(s) as i64);
    let dt = Rational::from(model.worldvolume_dim(t) as i64);
    let chi = (branes[s].kind.chi() * branes[t].kind.chi()).value();
    let lam = model.coupling_product(&branes[s].form, &branes[t].form);
    ds * dt / (Rational::from(2) - d) + Rational::from(chi) * lam
}

/// `B_{st} = d(I_s ∩ I_t) + d(I_s) d(I_t) / (2 - D) + chi_s chi_t lambda_{a_s} . lambda_{a_t}`
/// from the model's own worldvolumes.
pub fn compute_b_matrix(model: &BraneModel) -> RationalMatrix {
    b_matrix_with_intersections(model, &model_intersections(model))
}

/// Same as [`compute_b_matrix`] but with the off-diagonal intersection
/// dimensions supplied explicitly (missing pairs fall back to the model).
pub fn b_matrix_with_intersections(model: &BraneModel, dims: &IntersectionDims) -> RationalMatrix {
    let m = model.branes().len();
    let mut b = RationalMatrix::zeros(m, m);
    for s in 0..m {
        for t in s..m {
            let inter = if s == t {
                model.worldvolume_dim(s)
            } else {
                dims.get(&(s, t))
                    .copied()
                    .unwrap_or_else(|| model.intersection_dim(s, t))
            };
            let v = Rational::from(inter as i64) + b_background(model, s, t);
            b.set(s, t, v.clone());
            b.set(t, s, v);
        }
    }
    b
}

/// `A_{st} = 2 B_{st} / B_{tt}`.
pub fn compute_quasi_cartan(b: &RationalMatrix) -> Result<QuasiCartanMatrix, ModelError> {
    let m = b.rows();
    if let Some(t) = (0..m).find(|&t| b.get(t, t).is_zero()) {
        return Err(ModelError::ZeroDiagonal(t + 1));
    }
    let mut a = RationalMatrix::zeros(m, m);
    let two = Rational::from(2);
    for s in 0..m {
        for t in 0..m {
            let v = if s == t {
                two.clone()
            } else {
                &two * b.get(s, t) / b.get(t, t)
            };
            a.set(s, t, v);
        }
    }
    Ok(QuasiCartanMatrix::new(a).expect("diagonal set to 2"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraneConstants {
    /// `eps_s` per brane.
    pub eps: Vec<Sign>,
    /// `K_s = B_ss`.
    #[serde(rename = "K")]
    pub k: Vec<Rational>,
    /// `h_s = 1 / K_s`.
    pub h: Vec<Rational>,
    /// `B_s = eps_s K_s Q_s^2`, the master-equation couplings.
    #[serde(rename = "B_s")]
    pub b_s: Vec<Rational>,
    /// `P_s = B_s / 4`, the first moduli coefficients.
    #[serde(rename = "P")]
    pub p: Vec<Rational>,
    #[serde(rename = "B")]
    pub b_matrix: RationalMatrix,
    #[serde(rename = "A")]
    pub quasi_cartan: QuasiCartanMatrix,
}

/// `eps_s = eps(I_s) theta_{a_s}` for electric branes and
/// `-eps_g eps(I_s) theta_{a_s}` for magnetic ones.
pub fn brane_sign(model: &BraneModel, s: usize) -> Sign {
    let b = &model.branes()[s];
    let base = model.eps_of(&b.worldvolume) * model.form(&b.form).theta;
    match b.kind {
        BraneKind::Electric => base,
        BraneKind::Magnetic => model.eps_g().flip() * base,
    }
}

pub fn compute_brane_constants(model: &BraneModel) -> Result<BraneConstants, ModelError> {
    if model.branes().is_empty() {
        return Err(ModelError::NoBranes);
    }
    let b_matrix = compute_b_matrix(model);
    let quasi_cartan = compute_quasi_cartan(&b_matrix)?;
    let m = model.branes().len();
    let eps: Vec<Sign> = (0..m).map(|s| brane_sign(model, s)).collect();
    let k: Vec<Rational> = (0..m).map(|s| b_matrix.get(s, s).clone()).collect();
    let h = k.iter().map(Rational::recip).collect();
    let b_s: Vec<Rational> = (0..m)
        .map(|s| {
            let q2 = model.branes()[s].charge.squared();
            Rational::from(eps[s].value()) * &k[s] * q2
        })
        .collect();
    let p = b_s.iter().map(|b| b / Rational::from(4)).collect();
    Ok(BraneConstants {
        eps,
        k,
        h,
        b_s,
        p,
        b_matrix,
        quasi_cartan,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionRule {
    /// 1-based brane pair.
    pub pair: (usize, usize),
    pub dim: u32,
    /// Whether restriction R2 applies to this pair (electric/magnetic of one
    /// form); when it does and `dim == 0`, the configuration violates it.
    pub r2_applies: bool,
}

/// Intersection dimensions forced by a target quasi-Cartan matrix, given
/// everything else in the model.
///
/// The diagonal `B_ss` is fixed by the model, so `B_st = A_st B_tt / 2` must
/// agree with `A_ts B_ss / 2`; the intersection dimension is then
/// `B_st` minus the background terms and must be a non-negative integer.
pub fn solve_intersection_dims(
    model: &BraneModel,
    target: &QuasiCartanMatrix,
) -> Result<Vec<IntersectionRule>, ModelError> {
    let m = model.branes().len();
    if target.rank() != m {
        return Err(ModelError::TargetSize {
            expected: m,
            got: target.rank(),
        });
    }
    let diag: Vec<Rational> = (0..m)
        .map(|s| Rational::from(model.worldvolume_dim(s) as i64) + b_background(model, s, s))
        .collect();
    if let Some(s) = diag.iter().position(Rational::is_zero) {
        return Err(ModelError::ZeroDiagonal(s + 1));
    }
    let half = Rational::new(1, 2);
    let mut out = Vec::new();
    for s in 0..m {
        for t in s + 1..m {
            let b_st = target.get(s, t) * &diag[t] * &half;
            let b_ts = target.get(t, s) * &diag[s] * &half;
            if b_st != b_ts {
                return Err(ModelError::Inconsistent(s + 1, t + 1, b_st.to_string(), b_ts.to_string()));
            }
            let d = &b_st - &b_background(model, s, t);
            let dim = d
                .to_i64()
                .filter(|&v| v >= 0)
                .ok_or_else(|| ModelError::NoIntegerSolution(s + 1, t + 1, d.to_string()))?;
            let (bs, bt) = (&model.branes()[s], &model.branes()[t]);
            out.push(IntersectionRule {
                pair: (s + 1, t + 1),
                dim: dim as u32,
                r2_applies: bs.form == bt.form && bs.kind != bt.kind,
            });
        }
    }
    Ok(out)
}

/// Converts solved rules back into the map used by
/// [`b_matrix_with_intersections`].
pub fn rules_to_dims(rules: &[IntersectionRule]) -> IntersectionDims {
    rules
        .iter()
        .map(|r| ((r.pair.0 - 1, r.pair.1 - 1), r.dim))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brane::test_models::{m2_pair, single_m2};
    use crate::rational::rat;
    use crate::toda::Algebra;

    #[test]
    fn m2_pair_b_matrix() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let b = compute_b_matrix(&m);
        assert_eq!(b, RationalMatrix::from_ints(&[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn single_m2_constants() {
        let m = single_m2();
        let c = compute_brane_constants(&m).unwrap();
        assert_eq!(c.k, vec![rat(2, 1)]);
        assert_eq!(c.h, vec![rat(1, 2)]);
        assert_eq!(c.eps, vec![Sign::Plus]);
    }

    #[test]
    fn self_pairing_formula() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let d = rat(3, 1);
        let expected = &d + &(&d * &d / rat(-9, 1));
        assert_eq!(compute_b_matrix(&m).get(0, 0), &expected);
    }

    #[test]
    fn quasi_cartan_from_b() {
        let a2 = compute_quasi_cartan(&RationalMatrix::from_ints(&[&[2, -1], &[-1, 2]])).unwrap();
        assert_eq!(a2, Algebra::A2.cartan_matrix());
        let c2 = compute_quasi_cartan(&RationalMatrix::from_ints(&[&[1, -1], &[-1, 2]])).unwrap();
        assert_eq!(c2, Algebra::C2.cartan_matrix());
        let diag = compute_quasi_cartan(&RationalMatrix::from_ints(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(diag, Algebra::A1xA1.cartan_matrix());
        assert_eq!(
            compute_quasi_cartan(&RationalMatrix::from_ints(&[&[2, 1], &[1, 0]])),
            Err(ModelError::ZeroDiagonal(2))
        );
    }

    #[test]
    fn charge_to_coupling() {
        // K = 2, Q^2 = 2, eps = +1.
        let m = single_m2();
        let mut branes = m.branes().to_vec();
        branes[0].charge = Charge::Squared(rat(2, 1));
        let c = compute_brane_constants(&m.with_branes(branes).unwrap()).unwrap();
        assert_eq!(c.b_s, vec![rat(4, 1)]);
        assert_eq!(c.p, vec![rat(1, 1)]);
    }

    #[test]
    fn magnetic_sign_rule() {
        // theta = +1, eps(I) = +1, eps_g = -1 -> eps_s = -(-1)(+1)(+1) = +1.
        let m = single_m2();
        let mut branes = m.branes().to_vec();
        branes[0].kind = BraneKind::Magnetic;
        let mag = m.with_branes(branes).unwrap();
        assert_eq!(mag.eps_g(), Sign::Minus);
        assert_eq!(brane_sign(&mag, 0), Sign::Plus);
        assert_eq!(brane_sign(&mag.with_eps_g(Sign::Plus), 0), Sign::Minus);
        // Electric branes ignore eps_g.
        assert_eq!(brane_sign(&m.with_eps_g(Sign::Plus), 0), Sign::Plus);
    }

    #[test]
    fn intersections_for_orthogonal_target() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let rules = solve_intersection_dims(&m, &Algebra::A1xA1.cartan_matrix()).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].dim, 1);
        assert!(!rules[0].r2_applies);
    }

    #[test]
    fn intersections_for_a2_target() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let rules = solve_intersection_dims(&m, &Algebra::A2.cartan_matrix()).unwrap();
        assert_eq!(rules[0].dim, 0);
    }

    #[test]
    fn asymmetric_target_with_equal_diagonal_is_inconsistent() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        assert!(matches!(
            solve_intersection_dims(&m, &Algebra::C2.cartan_matrix()),
            Err(ModelError::Inconsistent(1, 2, _, _))
        ));
    }

    #[test]
    fn half_integer_intersection_rejected() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        // B_12 = A_12 * 2 / 2 = -1/2 -> d = -1/2 + 1 = 1/2.
        let target = QuasiCartanMatrix::new(
            RationalMatrix::from_rows(vec![vec![rat(2, 1), rat(-1, 2)], vec![rat(-1, 2), rat(2, 1)]])
                .unwrap(),
        )
        .unwrap();
        assert_eq!(
            solve_intersection_dims(&m, &target),
            Err(ModelError::NoIntegerSolution(1, 2, "1/2".into()))
        );
        // d = 3/2 from B_12 = 1/2.
        let target = QuasiCartanMatrix::new(
            RationalMatrix::from_rows(vec![vec![rat(2, 1), rat(1, 2)], vec![rat(1, 2), rat(2, 1)]])
                .unwrap(),
        )
        .unwrap();
        assert_eq!(
            solve_intersection_dims(&m, &target),
            Err(ModelError::NoIntegerSolution(1, 2, "3/2".into()))
        );
    }

    #[test]
    fn round_trip_through_supplied_dims() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        for alg in [Algebra::A1xA1, Algebra::A2] {
            let target = alg.cartan_matrix();
            let rules = solve_intersection_dims(&m, &target).unwrap();
            let b = b_matrix_with_intersections(&m, &rules_to_dims(&rules));
            assert_eq!(compute_quasi_cartan(&b).unwrap(), target);
        }
    }
}
