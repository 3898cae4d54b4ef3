//! Power-series solution of the master equations
//!
//! ```text
//! d/dz ( z H_s' / H_s ) = (1/4) B_s prod_t H_t^(-A_st),    H_s(0) = 1.
//! ```
//!
//! Multiplying through by `H_s^2` (and using `A_ss = 2`) gives the cleared form
//!
//! ```text
//! z H_s'' H_s + H_s' H_s - z (H_s')^2 = P_s prod_{t != s} H_t^(-A_st),   P_s = B_s / 4.
//! ```
//!
//! With `H_s = sum_k c_k z^k`, the left side at `z^k` is
//! `sum_{i+j=k+1} i (i - j) c_i c_j = (k+1)^2 c_{k+1} + sum_{i<j, i+j=k+1, i>=1} (i-j)^2 c_i c_j`,
//! while the right side at `z^k` only involves coefficients up to `z^k`. Each
//! order therefore fixes the next coefficient explicitly, dividing only by
//! `(k+1)^2`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AlgebraError, SolverError};
use crate::poly::{ParamPoly, TermJson};
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::toda::cartan::QuasiCartanMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Coefficients are polynomials in the free symbols `P_1..P_m`.
    Symbolic,
    /// `P_s` bound to the given rationals.
    Numeric(Vec<Rational>),
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Numeric(_) => "numeric",
        }
    }
}

/// Coefficients `P_s^(k)`, `k = 0..=order`, of every moduli function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliSolution {
    matrix: QuasiCartanMatrix,
    order: usize,
    mode: Mode,
    branes: Vec<TruncatedSeries>,
}

impl ModuliSolution {
    /// Assembles a solution from explicit coefficient series, e.g. a
    /// hand-written polynomial to be checked.
    pub fn from_parts(
        matrix: QuasiCartanMatrix,
        mode: Mode,
        branes: Vec<TruncatedSeries>,
    ) -> Result<Self, SolverError> {
        let m = matrix.rank();
        if branes.len() != m {
            return Err(AlgebraError::DimensionMismatch {
                expected: m,
                got: branes.len(),
            }
            .into());
        }
        let arity = match &mode {
            Mode::Symbolic => m,
            Mode::Numeric(v) => {
                if v.len() != m {
                    return Err(SolverError::MissingValues {
                        expected: m,
                        got: v.len(),
                    });
                }
                0
            }
        };
        let order = branes.iter().filter_map(TruncatedSeries::order).min().unwrap_or(0);
        let mut trimmed = Vec::with_capacity(m);
        for b in branes {
            if b.arity() != arity {
                return Err(AlgebraError::ArityMismatch {
                    left: arity,
                    right: b.arity(),
                }
                .into());
            }
            trimmed.push(b.truncate(order));
        }
        Ok(ModuliSolution {
            matrix,
            order,
            mode,
            branes: trimmed,
        })
    }

    pub fn matrix(&self) -> &QuasiCartanMatrix {
        &self.matrix
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn brane_count(&self) -> usize {
        self.branes.len()
    }

    pub fn series(&self, s: usize) -> &TruncatedSeries {
        &self.branes[s]
    }

    pub fn all_series(&self) -> &[TruncatedSeries] {
        &self.branes
    }

    /// `P_s^(k)`.
    pub fn coefficient(&self, s: usize, k: usize) -> ParamPoly {
        self.branes[s].coeff(k)
    }

    /// `P_s = P_s^(1)`, the first-order coefficient.
    pub fn first_coefficients(&self) -> Vec<ParamPoly> {
        self.branes.iter().map(|b| b.coeff(1)).collect()
    }

    /// Replaces one coefficient; used to build deliberately wrong inputs.
    pub fn with_coefficient(&self, s: usize, k: usize, value: ParamPoly) -> Self {
        let mut out = self.clone();
        let mut coeffs = out.branes[s].clone().into_coeffs();
        coeffs[k] = value;
        out.branes[s] = TruncatedSeries::new(self.branes[s].arity(), coeffs)
            .expect("replacement coefficient has matching arity");
        out
    }

    /// Substitutes `P_s = values[s]`, turning a symbolic solution into a
    /// numeric one.
    pub fn bind(&self, values: &[Rational]) -> Result<ModuliSolution, SolverError> {
        if values.len() != self.branes.len() {
            return Err(SolverError::MissingValues {
                expected: self.branes.len(),
                got: values.len(),
            });
        }
        match &self.mode {
            Mode::Numeric(v) if v == values => Ok(self.clone()),
            Mode::Numeric(_) => Err(SolverError::MissingValues {
                expected: 0,
                got: values.len(),
            }),
            Mode::Symbolic => {
                let branes = self
                    .branes
                    .iter()
                    .map(|b| b.bind(values))
                    .collect::<Result<_, _>>()?;
                Ok(ModuliSolution {
                    matrix: self.matrix.clone(),
                    order: self.order,
                    mode: Mode::Numeric(values.to_vec()),
                    branes,
                })
            }
        }
    }

    /// Arity-0 series for every brane, binding symbols if needed.
    pub fn numeric_series(&self, values: Option<&[Rational]>) -> Result<Vec<TruncatedSeries>, SolverError> {
        match (&self.mode, values) {
            (Mode::Numeric(_), _) => Ok(self.branes.clone()),
            (Mode::Symbolic, Some(v)) => Ok(self.bind(v)?.branes),
            (Mode::Symbolic, None) => Err(SolverError::MissingValues {
                expected: self.branes.len(),
                got: 0,
            }),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BraneJson<C> {
    coeffs: Vec<C>,
}

#[derive(Serialize)]
struct SolutionOut<'a, C> {
    matrix: &'a QuasiCartanMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    algebra: Option<&'static str>,
    order: usize,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<&'a [Rational]>,
    branes: Vec<BraneJson<C>>,
}

impl Serialize for ModuliSolution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let algebra = self.matrix.classify();
        match &self.mode {
            Mode::Symbolic => SolutionOut {
                matrix: &self.matrix,
                algebra,
                order: self.order,
                mode: "symbolic",
                values: None,
                branes: self
                    .branes
                    .iter()
                    .map(|b| BraneJson {
                        coeffs: b.coeffs().iter().map(ParamPoly::to_json_terms).collect(),
                    })
                    .collect(),
            }
            .serialize(serializer),
            Mode::Numeric(values) => SolutionOut {
                matrix: &self.matrix,
                algebra,
                order: self.order,
                mode: "numeric",
                values: Some(values),
                branes: self
                    .branes
                    .iter()
                    .map(|b| BraneJson {
                        coeffs: b.coeffs().iter().map(ParamPoly::constant_term).collect(),
                    })
                    .collect(),
            }
            .serialize(serializer),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionIn {
    matrix: QuasiCartanMatrix,
    #[serde(default)]
    #[allow(dead_code)]
    algebra: Option<String>,
    order: usize,
    mode: String,
    #[serde(default)]
    values: Option<Vec<Rational>>,
    branes: Vec<BraneJson<serde_json::Value>>,
}

impl<'de> Deserialize<'de> for ModuliSolution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SolutionIn::deserialize(deserializer)?;
        let m = raw.matrix.rank();
        let (mode, arity) = match (raw.mode.as_str(), raw.values) {
            ("symbolic", None) => (Mode::Symbolic, m),
            ("numeric", Some(v)) => (Mode::Numeric(v), 0),
            (other, _) => {
                return Err(D::Error::custom(format!(
                    "mode {other:?} needs \"symbolic\" without values or \"numeric\" with values"
                )))
            }
        };
        let mut branes = Vec::with_capacity(raw.branes.len());
        for b in raw.branes {
            let coeffs = b
                .coeffs
                .into_iter()
                .map(|v| -> Result<ParamPoly, String> {
                    if arity == 0 {
                        let r: Rational = serde_json::from_value(v).map_err(|e| e.to_string())?;
                        Ok(ParamPoly::constant(0, r))
                    } else {
                        let terms: Vec<TermJson> =
                            serde_json::from_value(v).map_err(|e| e.to_string())?;
                        ParamPoly::from_json_terms(arity, &terms).map_err(|e| e.to_string())
                    }
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            branes.push(TruncatedSeries::new(arity, coeffs).map_err(D::Error::custom)?);
        }
        let sol = ModuliSolution::from_parts(raw.matrix, mode, branes).map_err(D::Error::custom)?;
        if sol.order != raw.order {
            return Err(D::Error::custom(format!(
                "declared order {} but coefficients reach order {}",
                raw.order, sol.order
            )));
        }
        Ok(sol)
    }
}

/// `prod_t H_t^(-A_st)` as a truncated series, every factor through the
/// generalized binomial recurrence (including `H_s^-2`).
pub fn build_rhs_series(
    a: &QuasiCartanMatrix,
    h: &[TruncatedSeries],
    s: usize,
) -> Result<TruncatedSeries, AlgebraError> {
    check_inputs(a, h)?;
    let arity = h[0].arity();
    let order = h.iter().filter_map(TruncatedSeries::order).min().unwrap_or(0);
    let mut acc = TruncatedSeries::one(arity, order);
    for (t, ht) in h.iter().enumerate() {
        let exponent = -a.get(s, t);
        if exponent.is_zero() {
            continue;
        }
        acc = acc.mul(&ht.pow(&exponent)?)?;
    }
    Ok(acc)
}

/// The cleared right-hand factor `H_s^2 prod_t H_t^(-A_st)` through the
/// series path: `build_rhs_series` times `H_s^2`, truncated.
pub fn cleared_rhs_series(
    a: &QuasiCartanMatrix,
    h: &[TruncatedSeries],
    s: usize,
) -> Result<TruncatedSeries, AlgebraError> {
    let hs = &h[s];
    build_rhs_series(a, h, s)?.mul(&hs.mul(hs)?)
}

/// The cleared right-hand factor `prod_{t != s} H_t^(-A_st)` as an exact
/// finite product of polynomials. `None` unless every off-diagonal entry is a
/// non-positive integer.
pub fn cleared_rhs_polynomial(
    a: &QuasiCartanMatrix,
    h: &[TruncatedSeries],
    s: usize,
) -> Result<Option<TruncatedSeries>, AlgebraError> {
    check_inputs(a, h)?;
    if !a.has_polynomial_coupling() {
        return Ok(None);
    }
    let mut acc = TruncatedSeries::one(h[0].arity(), 0);
    for (t, ht) in h.iter().enumerate() {
        if t == s {
            continue;
        }
        let exponent = (-a.get(s, t)).to_i64().expect("integer coupling") as u32;
        if exponent > 0 {
            acc = acc.mul_exact(&ht.pow_exact(exponent)?)?;
        }
    }
    Ok(Some(acc))
}

fn check_inputs(a: &QuasiCartanMatrix, h: &[TruncatedSeries]) -> Result<(), AlgebraError> {
    if h.len() != a.rank() || h.is_empty() {
        return Err(AlgebraError::DimensionMismatch {
            expected: a.rank(),
            got: h.len(),
        });
    }
    let arity = h[0].arity();
    if let Some(bad) = h.iter().find(|x| x.arity() != arity) {
        return Err(AlgebraError::ArityMismatch {
            left: arity,
            right: bad.arity(),
        });
    }
    Ok(())
}

/// Coefficients of `f^alpha` produced one order at a time as the
/// coefficients of `f` become known.
struct PowerStream {
    source: usize,
    alpha: Rational,
    coeffs: Vec<ParamPoly>,
}

impl PowerStream {
    fn new(source: usize, alpha: Rational, arity: usize) -> Self {
        PowerStream {
            source,
            alpha,
            coeffs: vec![ParamPoly::one(arity)],
        }
    }

    /// Appends the next coefficient; `f` must be known through that order.
    fn advance(&mut self, f: &[ParamPoly]) {
        let n = self.coeffs.len();
        let arity = self.coeffs[0].arity();
        let mut acc = ParamPoly::zero(arity);
        for (j, fj) in f.iter().enumerate().take(n + 1).skip(1) {
            if fj.is_zero() || self.coeffs[n - j].is_zero() {
                continue;
            }
            let weight = &self.alpha * Rational::from(j as i64) - Rational::from((n - j) as i64);
            if !weight.is_zero() {
                acc = &acc + &(fj * &self.coeffs[n - j]).scale(&weight);
            }
        }
        self.coeffs.push(acc.scale(&Rational::new(1, n as i64)));
    }
}

/// Running product of the power streams feeding one brane.
struct RhsStream {
    factors: Vec<PowerStream>,
    /// `partials[j]` holds the coefficients of the product of factors `0..=j`.
    partials: Vec<Vec<ParamPoly>>,
}

impl RhsStream {
    fn new(a: &QuasiCartanMatrix, s: usize, arity: usize) -> Self {
        let factors: Vec<PowerStream> = (0..a.rank())
            .filter(|&t| t != s && !a.get(s, t).is_zero())
            .map(|t| PowerStream::new(t, -a.get(s, t), arity))
            .collect();
        let partials = vec![vec![ParamPoly::one(arity)]; factors.len()];
        RhsStream { factors, partials }
    }

    /// Coefficient of `z^k` of the product; all `H` known through `z^k`.
    fn coefficient(&mut self, k: usize, h: &[Vec<ParamPoly>], arity: usize) -> ParamPoly {
        if self.factors.is_empty() {
            return if k == 0 { ParamPoly::one(arity) } else { ParamPoly::zero(arity) };
        }
        if k == 0 {
            return ParamPoly::one(arity);
        }
        for f in &mut self.factors {
            f.advance(&h[f.source]);
        }
        for j in 0..self.factors.len() {
            let next = if j == 0 {
                self.factors[0].coeffs[k].clone()
            } else {
                let prev = &self.partials[j - 1];
                let g = &self.factors[j].coeffs;
                (0..=k).fold(ParamPoly::zero(arity), |acc, i| {
                    if prev[i].is_zero() || g[k - i].is_zero() {
                        acc
                    } else {
                        &acc + &(&prev[i] * &g[k - i])
                    }
                })
            };
            self.partials[j].push(next);
        }
        self.partials.last().expect("non-empty")[k].clone()
    }
}

/// Runs the recurrence through `z^order`.
///
/// In symbolic mode `P_s` is the `s`-th free symbol; in numeric mode it is
/// the supplied rational. Either way `P_s^(0) = 1` and `P_s^(1) = P_s`.
pub fn solve_coefficients(
    a: &QuasiCartanMatrix,
    order: usize,
    mode: Mode,
) -> Result<ModuliSolution, SolverError> {
    if order == 0 {
        return Err(SolverError::ZeroOrder);
    }
    let m = a.rank();
    let (arity, params): (usize, Vec<ParamPoly>) = match &mode {
        Mode::Symbolic => (m, (0..m).map(|s| ParamPoly::var(m, s)).collect()),
        Mode::Numeric(values) => {
            if values.len() != m {
                return Err(SolverError::MissingValues {
                    expected: m,
                    got: values.len(),
                });
            }
            (0, values.iter().map(|v| ParamPoly::constant(0, v.clone())).collect())
        }
    };

    let mut h: Vec<Vec<ParamPoly>> = vec![vec![ParamPoly::one(arity)]; m];
    let mut rhs: Vec<RhsStream> = (0..m).map(|s| RhsStream::new(a, s, arity)).collect();

    for k in 0..order {
        let next: Vec<ParamPoly> = (0..m)
            .map(|s| {
                let r_k = rhs[s].coefficient(k, &h, arity);
                let c = &h[s];
                let mut lower = ParamPoly::zero(arity);
                // Pairs i < j with i + j = k + 1 and i >= 1.
                for i in 1..=k {
                    let j = k + 1 - i;
                    if i >= j {
                        break;
                    }
                    if c[i].is_zero() || c[j].is_zero() {
                        continue;
                    }
                    let w = Rational::from(((j - i) * (j - i)) as i64);
                    lower = &lower + &(&c[i] * &c[j]).scale(&w);
                }
                let lead = Rational::from(((k + 1) * (k + 1)) as i64);
                (&(&params[s] * &r_k) - &lower).scale(&lead.recip())
            })
            .collect();
        for (hs, c) in h.iter_mut().zip(next) {
            hs.push(c);
        }
    }

    let branes = h
        .into_iter()
        .map(|coeffs| TruncatedSeries::new(arity, coeffs))
        .collect::<Result<_, _>>()?;
    Ok(ModuliSolution {
        matrix: a.clone(),
        order,
        mode,
        branes,
    })
}
