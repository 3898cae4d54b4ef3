//! Explicit solution data: metric exponent tables, scalar fields and form
//! descriptors, all parameterized by the moduli functions `H_s(z)`, `z = rho^2`.
//!
//! The metric is
//!
//! ```text
//! g = prod_s H_s^(2 h_s d(I_s)/(D-2)) { w drho^2
//!       + prod_s H_s^(-2 h_s) rho^2 g^1
//!       + sum_{i>1} prod_s H_s^(-2 h_s delta_{i I_s}) g^i }
//! ```
//!
//! Exponents here are the totals, with the overall factor folded into each
//! block.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::brane::{compute_brane_constants, BraneConstants, BraneKind, BraneModel, Sign, Topology};
use crate::error::{AlgebraError, ModelError, ProfileError};
use crate::rational::Rational;
use crate::series::TruncatedSeries;

/// Exponent of `H_s` (1-based `brane`) in a product of moduli functions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HExponent {
    pub brane: usize,
    pub exponent: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceFactor {
    /// 1-based factor-space index.
    pub space: usize,
    pub dim: u32,
    /// The block is `rho^2 g^1` rather than `g^i`.
    pub rho_squared: bool,
    pub exponents: Vec<HExponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarField {
    /// 0-based scalar index `alpha`.
    pub alpha: usize,
    /// `exp(phi^alpha) = prod_s H_s^exponent`.
    pub exponents: Vec<HExponent>,
}

/// Wedge factor of a form: `drho ^ tau(spaces)` or just `tau(spaces)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wedge {
    pub drho: bool,
    pub spaces: Vec<usize>,
}

/// `-Q_s prod_t H_t^(-A_st) rho drho ^ tau(I_s)` (electric) or
/// `Q_s tau(complement of I_s)` (magnetic).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormDescriptor {
    pub brane: usize,
    pub form: String,
    pub kind: BraneKind,
    /// Exact charge, or `sqrt(Q2)` when only the square was given.
    pub charge: String,
    /// `-1` electric, `+1` magnetic.
    pub sign: Sign,
    /// `rho` multiplies the coefficient (electric only).
    pub rho_factor: bool,
    pub h_exponents: Vec<HExponent>,
    pub wedge: Wedge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionProfile {
    pub w: Sign,
    pub total_dimension: u32,
    pub m1_topology: Topology,
    /// Exponents of the `w drho^2` block (the overall factor alone).
    pub radial: Vec<HExponent>,
    pub spaces: Vec<SpaceFactor>,
    pub scalars: Vec<ScalarField>,
    pub forms: Vec<FormDescriptor>,
}

pub fn build_profile(model: &BraneModel) -> Result<SolutionProfile, ModelError> {
    if model.branes().is_empty() {
        return Ok(assemble(model, &[], None));
    }
    let c = compute_brane_constants(model)?;
    Ok(build_profile_with_constants(model, &c))
}

pub fn build_profile_with_constants(model: &BraneModel, constants: &BraneConstants) -> SolutionProfile {
    assemble(model, &constants.h, Some(constants))
}

fn assemble(model: &BraneModel, h: &[Rational], constants: Option<&BraneConstants>) -> SolutionProfile {
    let branes = model.branes();
    let d = Rational::from(model.total_dimension() as i64);
    let two = Rational::from(2);

    let overall: Vec<Rational> = (0..branes.len())
        .map(|s| &two * &h[s] * Rational::from(model.worldvolume_dim(s) as i64) / (&d - &two))
        .collect();
    let table = |f: &dyn Fn(usize) -> Rational| -> Vec<HExponent> {
        (0..branes.len())
            .map(|s| HExponent {
                brane: s + 1,
                exponent: f(s),
            })
            .collect()
    };

    let radial = table(&|s| overall[s].clone());
    let spaces = model
        .factor_spaces()
        .iter()
        .enumerate()
        .map(|(idx, fs)| {
            let i = idx + 1;
            SpaceFactor {
                space: i,
                dim: fs.dim,
                rho_squared: i == 1,
                exponents: table(&|s| {
                    if i == 1 || branes[s].worldvolume.contains(&i) {
                        &overall[s] - &two * &h[s]
                    } else {
                        overall[s].clone()
                    }
                }),
            }
        })
        .collect();

    let raised: Vec<Vec<Rational>> = branes.iter().map(|b| model.raised_coupling(&b.form)).collect();
    let scalars = (0..model.scalar_count())
        .map(|alpha| ScalarField {
            alpha,
            exponents: table(&|s| {
                Rational::from(branes[s].kind.chi().value()) * &h[s] * &raised[s][alpha]
            }),
        })
        .collect();

    let all: BTreeSet<usize> = (1..=model.n()).collect();
    let forms = branes
        .iter()
        .enumerate()
        .map(|(s, b)| {
            let electric = b.kind == BraneKind::Electric;
            let h_exponents = match (electric, constants) {
                (true, Some(c)) => table(&|t| -c.quasi_cartan.get(s, t)),
                _ => Vec::new(),
            };
            let spaces = if electric {
                b.worldvolume.iter().copied().collect()
            } else {
                all.difference(&b.worldvolume).copied().collect()
            };
            FormDescriptor {
                brane: s + 1,
                form: b.form.clone(),
                kind: b.kind,
                charge: b.charge.label(),
                sign: if electric { Sign::Minus } else { Sign::Plus },
                rho_factor: electric,
                h_exponents,
                wedge: Wedge { drho: electric, spaces },
            }
        })
        .collect();

    SolutionProfile {
        w: model.w(),
        total_dimension: model.total_dimension(),
        m1_topology: model.factor_spaces()[0].topology,
        radial,
        spaces,
        scalars,
        forms,
    }
}

impl SolutionProfile {
    pub fn brane_count(&self) -> usize {
        self.radial.len()
    }

    /// Total exponent of each `H_s` in `|det g|`: every block exponent
    /// weighted by its dimension.
    pub fn determinant_exponents(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.radial.iter().map(|e| e.exponent.clone()).collect();
        for sp in &self.spaces {
            let d = Rational::from(sp.dim as i64);
            for e in &sp.exponents {
                out[e.brane - 1] += &(&d * &e.exponent);
            }
        }
        out
    }
}

/// `prod_s H_s^e` as a truncated series, for any exponent table.
pub fn product_series(exponents: &[HExponent], h: &[TruncatedSeries]) -> Result<TruncatedSeries, AlgebraError> {
    let arity = h.first().map(TruncatedSeries::arity).unwrap_or(0);
    let order = h.iter().filter_map(TruncatedSeries::order).min().unwrap_or(0);
    let mut acc = TruncatedSeries::one(arity, order);
    for e in exponents {
        if !e.exponent.is_zero() {
            acc = acc.mul(&h[e.brane - 1].pow(&e.exponent)?)?;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceValue {
    pub space: usize,
    /// `prod_s H_s^e` for the block.
    pub h_factor: f64,
    /// `h_factor`, times `rho^2` on `M_1`.
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarValue {
    pub alpha: usize,
    pub exp_phi: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub rho: f64,
    pub z: f64,
    pub h: Vec<f64>,
    /// Coefficient of `drho^2`, including `w`.
    pub radial: f64,
    pub spaces: Vec<SpaceValue>,
    pub scalars: Vec<ScalarValue>,
}

/// Evaluates the profile at `rho`, given the numeric moduli series (see
/// [`crate::toda::ModuliSolution::numeric_series`]). `H_s(rho^2)` is computed
/// exactly and checked for positivity before the powers go to floating point.
pub fn evaluate_profile(
    profile: &SolutionProfile,
    h: &[TruncatedSeries],
    rho: &Rational,
) -> Result<ProfilePoint, ProfileError> {
    if h.len() != profile.brane_count() {
        return Err(ProfileError::BraneCount {
            profile: profile.brane_count(),
            solution: h.len(),
        });
    }
    if let Some(bad) = h.iter().find(|s| s.arity() != 0) {
        return Err(ProfileError::MissingValues {
            expected: bad.arity(),
            got: 0,
        });
    }
    let z = rho * rho;
    let mut ln_h = Vec::with_capacity(h.len());
    let mut h_val = Vec::with_capacity(h.len());
    for (s, series) in h.iter().enumerate() {
        let v = series.eval_at(&z);
        if !v.is_positive() {
            return Err(ProfileError::NonPositiveModulus {
                brane: s + 1,
                z: z.to_string(),
                value: v.to_string(),
            });
        }
        let f = v.to_f64();
        h_val.push(f);
        ln_h.push(f.ln());
    }
    let log_product = |es: &[HExponent]| -> f64 {
        es.iter()
            .map(|e| e.exponent.to_f64() * ln_h[e.brane - 1])
            .sum()
    };

    let rho_f = rho.to_f64();
    let z_f = z.to_f64();
    let spaces = profile
        .spaces
        .iter()
        .map(|sp| {
            let h_factor = log_product(&sp.exponents).exp();
            SpaceValue {
                space: sp.space,
                h_factor,
                coefficient: if sp.rho_squared { h_factor * z_f } else { h_factor },
            }
        })
        .collect();
    let scalars = profile
        .scalars
        .iter()
        .map(|sc| {
            let phi = log_product(&sc.exponents);
            ScalarValue {
                alpha: sc.alpha,
                exp_phi: phi.exp(),
                phi,
            }
        })
        .collect();
    Ok(ProfilePoint {
        rho: rho_f,
        z: z_f,
        h: h_val,
        radial: profile.w.value() as f64 * log_product(&profile.radial).exp(),
        spaces,
        scalars,
    })
}

/// Evaluates on `steps + 1` equally spaced points of `[rho_min, rho_max]`,
/// stopping before the first point where some `H_s` is not positive.
/// Returns the points reached and, if the grid was cut short, the error.
pub fn evaluate_grid(
    profile: &SolutionProfile,
    h: &[TruncatedSeries],
    rho_min: &Rational,
    rho_max: &Rational,
    steps: usize,
) -> (Vec<ProfilePoint>, Option<ProfileError>) {
    let steps = steps.max(1);
    let width = rho_max - rho_min;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let rho = rho_min + &width * Rational::new(k as i64, steps as i64);
        match evaluate_profile(profile, h, &rho) {
            Ok(p) => out.push(p),
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Breakdown {
    /// 1-based brane whose modulus reaches zero first.
    pub brane: usize,
    pub rho: f64,
    pub z: f64,
}

/// First `rho` in `(0, rho_max]` where some `H_s(rho^2) <= 0`, located by a
/// uniform scan followed by bisection to `tol` in `rho`.
pub fn find_breakdown(h: &[TruncatedSeries], rho_max: f64, scan_points: usize, tol: f64) -> Option<Breakdown> {
    let first_bad = |rho: f64| -> Option<usize> {
        let z = rho * rho;
        h.iter().position(|s| s.eval_f64(z) <= 0.0)
    };
    let n = scan_points.max(1);
    let mut lo = 0.0;
    let mut hit = None;
    for k in 1..=n {
        let rho = rho_max * k as f64 / n as f64;
        if first_bad(rho).is_some() {
            hit = Some(rho);
            break;
        }
        lo = rho;
    }
    let mut hi = hit?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if first_bad(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let brane = first_bad(hi).expect("hi stays on the bad side") + 1;
    Some(Breakdown {
        brane,
        rho: hi,
        z: hi * hi,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Fluxbrane,
    SBrane,
    GenericFluxType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub family: Family,
    pub cylindrical: bool,
    pub description: String,
}

pub fn cylindrical_specialization(profile: &SolutionProfile) -> Classification {
    match (profile.w, profile.m1_topology) {
        (Sign::Minus, _) => Classification {
            family: Family::SBrane,
            cylindrical: false,
            description: "w = -1: rho is time-like, special S-brane solution".into(),
        },
        (Sign::Plus, Topology::Circle) => Classification {
            family: Family::Fluxbrane,
            cylindrical: true,
            description: "w = +1 with M_1 a circle (g^1 = dphi^2): composite fluxbrane".into(),
        },
        (Sign::Plus, Topology::Line) => Classification {
            family: Family::GenericFluxType,
            cylindrical: false,
            description: "w = +1 with M_1 not marked as a circle: generic flux-type solution".into(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brane::test_models::{m2_pair, single_m2};
    use crate::brane::{Brane, Charge, FactorSpace, Form, ScalarSector};
    use crate::rational::rat;
    use crate::toda::{build_rhs_series, solve_coefficients, Algebra, Mode};

    fn exps(sp: &SpaceFactor) -> Vec<Rational> {
        sp.exponents.iter().map(|e| e.exponent.clone()).collect()
    }

    #[test]
    fn single_m2_exponents() {
        let p = build_profile(&single_m2()).unwrap();
        // Worldvolume {1, 2}; spaces 3..5 are transverse.
        assert_eq!(exps(&p.spaces[0]), vec![rat(-2, 3)]);
        assert_eq!(exps(&p.spaces[1]), vec![rat(-2, 3)]);
        for sp in &p.spaces[2..] {
            assert_eq!(exps(sp), vec![rat(1, 3)]);
        }
        assert_eq!(p.radial[0].exponent, rat(1, 3));
        assert!(p.spaces[0].rho_squared && !p.spaces[1].rho_squared);
        let f = &p.forms[0];
        assert_eq!(f.sign, Sign::Minus);
        assert_eq!(f.h_exponents[0].exponent, rat(-2, 1));
        assert_eq!(f.wedge, Wedge { drho: true, spaces: vec![1, 2] });
    }

    #[test]
    fn vacuum_profile() {
        let m = single_m2().with_branes(Vec::new()).unwrap();
        let p = build_profile(&m).unwrap();
        assert!(p.radial.is_empty());
        assert!(p.spaces.iter().all(|s| s.exponents.is_empty()));
        let pt = evaluate_profile(&p, &[], &rat(3, 2)).unwrap();
        assert_eq!(pt.radial, 1.0);
        assert!(pt.spaces.iter().all(|s| s.h_factor == 1.0));
        assert_eq!(pt.spaces[0].coefficient, 2.25);
    }

    #[test]
    fn magnetic_descriptor_uses_complement() {
        let spaces = vec![
            FactorSpace { dim: 1, eps: Sign::Plus, topology: Topology::Line },
            FactorSpace { dim: 1, eps: Sign::Plus, topology: Topology::Line },
            FactorSpace { dim: 1, eps: Sign::Plus, topology: Topology::Line },
            FactorSpace { dim: 2, eps: Sign::Plus, topology: Topology::Line },
        ];
        let m = BraneModel::new(
            spaces,
            vec![Form { name: "F".into(), rank: 4, theta: Sign::Plus }],
            ScalarSector::default(),
            Sign::Minus,
            Sign::Plus,
            vec![Brane {
                form: "F".into(),
                kind: BraneKind::Magnetic,
                worldvolume: [2, 3].into_iter().collect(),
                charge: Charge::Value(rat(1, 1)),
            }],
        )
        .unwrap();
        let p = build_profile(&m).unwrap();
        let f = &p.forms[0];
        assert_eq!(f.wedge, Wedge { drho: false, spaces: vec![1, 4] });
        assert_eq!(f.sign, Sign::Plus);
        assert!(f.h_exponents.is_empty());
    }

    #[test]
    fn scalar_exponents_follow_chi_and_raised_coupling() {
        let m = single_m2();
        let json = serde_json::json!({
            "factor_spaces": [{"dim": 1, "eps": 1}, {"dim": 2, "eps": 1}, {"dim": 6, "eps": 1}],
            "forms": [{"name": "F", "rank": 4, "theta": 1}],
            "scalars": {"h": [["2"]], "lambda": {"F": ["1"]}},
            "eps_g": -1,
            "w": 1,
            "branes": [{"form": "F", "kind": "electric", "I": [1, 2], "Q": "1"}]
        });
        let dil = BraneModel::from_json(&json.to_string()).unwrap();
        let p = build_profile(&dil).unwrap();
        let c = compute_brane_constants(&dil).unwrap();
        // lambda^alpha = 1/2; exponent h * (+1) * 1/2.
        assert_eq!(p.scalars[0].exponents[0].exponent, &c.h[0] * rat(1, 2));
        assert!(build_profile(&m).unwrap().scalars.is_empty());
    }

    #[test]
    fn unit_coefficients_at_origin() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let p = build_profile(&m).unwrap();
        let sol = solve_coefficients(&Algebra::A1xA1.cartan_matrix(), 3, Mode::Numeric(vec![rat(1, 2), rat(1, 2)])).unwrap();
        let h = sol.numeric_series(None).unwrap();
        let pt = evaluate_profile(&p, &h, &Rational::zero()).unwrap();
        assert!(pt.spaces.iter().all(|s| s.h_factor == 1.0));
        assert_eq!(pt.spaces[0].coefficient, 0.0);
        assert_eq!(pt.radial, 1.0);
    }

    #[test]
    fn a2_factors_are_powers_of_nine_fourths() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let p = build_profile(&m).unwrap();
        let sol = solve_coefficients(&Algebra::A2.cartan_matrix(), 4, Mode::Numeric(vec![rat(1, 1), rat(1, 1)])).unwrap();
        let h = sol.numeric_series(None).unwrap();
        let pt = evaluate_profile(&p, &h, &rat(1, 1)).unwrap();
        assert_eq!(pt.h, vec![2.25, 2.25]);
        for (sp, v) in p.spaces.iter().zip(&pt.spaces) {
            let total: f64 = sp.exponents.iter().map(|e| e.exponent.to_f64()).sum();
            assert!((v.h_factor - 2.25f64.powf(total)).abs() < 1e-14);
        }
    }

    #[test]
    fn breakdown_of_one_minus_z() {
        let h = vec![TruncatedSeries::from_rationals([rat(1, 1), rat(-1, 1)])];
        let b = find_breakdown(&h, 2.0, 200, 1e-12).unwrap();
        assert!((b.z - 1.0).abs() < 1e-6);
        assert!((b.rho - 1.0).abs() < 1e-6);
        assert_eq!(b.brane, 1);
        assert!(find_breakdown(&h, 0.9, 200, 1e-12).is_none());
    }

    #[test]
    fn non_positive_modulus_reported() {
        let m = single_m2().with_w(Sign::Minus);
        let p = build_profile(&m).unwrap();
        let h = vec![TruncatedSeries::from_rationals([rat(1, 1), rat(-1, 1)])];
        let err = evaluate_profile(&p, &h, &rat(1, 1)).unwrap_err();
        assert!(matches!(err, ProfileError::NonPositiveModulus { brane: 1, .. }));
        let pt = evaluate_profile(&p, &h, &rat(1, 2)).unwrap();
        assert!(pt.radial < 0.0);
    }

    #[test]
    fn electric_factor_matches_rhs_series() {
        let m = m2_pair(&[1, 2], &[1, 3]);
        let c = compute_brane_constants(&m).unwrap();
        let p = build_profile_with_constants(&m, &c);
        let sol = solve_coefficients(&c.quasi_cartan, 6, Mode::Symbolic).unwrap();
        for s in 0..2 {
            let ours = product_series(&p.forms[s].h_exponents, sol.all_series()).unwrap();
            let rhs = build_rhs_series(&c.quasi_cartan, sol.all_series(), s).unwrap();
            assert_eq!(ours, rhs);
        }
    }

    #[test]
    fn classification() {
        let m = single_m2();
        let line = build_profile(&m).unwrap();
        assert_eq!(cylindrical_specialization(&line).family, Family::GenericFluxType);
        let mut spaces = m.factor_spaces().to_vec();
        spaces[0].topology = Topology::Circle;
        let circ = BraneModel::new(
            spaces,
            m.forms().to_vec(),
            ScalarSector::default(),
            m.eps_g(),
            Sign::Plus,
            m.branes().to_vec(),
        )
        .unwrap();
        let p = build_profile(&circ).unwrap();
        assert_eq!(cylindrical_specialization(&p).family, Family::Fluxbrane);
        let s = build_profile(&circ.with_w(Sign::Minus)).unwrap();
        assert_eq!(cylindrical_specialization(&s).family, Family::SBrane);
    }
}
