//! Declarative brane model: factor spaces, forms, scalar couplings, branes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// A sign `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    #[default]
    Line,
    Circle,
}

/// Ricci-flat factor space `M_i`, reduced to its dimension and orientation
/// sign `eps(i) = sign det g^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpace {
    pub dim: u32,
    pub eps: Sign,
    /// Only meaningful for `M_1`; marks the cylindrically symmetric case.
    #[serde(default, skip_serializing_if = "is_line")]
    pub topology: Topology,
}

fn is_line(t: &Topology) -> bool {
    *t == Topology::Line
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Form {
    pub name: String,
    pub rank: u32,
    pub theta: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSector {
    /// Symmetric nondegenerate `l x l` target-space metric `h_{ab}`.
    #[serde(default)]
    pub h: Vec<Vec<Rational>>,
    /// Dilaton coupling covector `lambda_{a alpha}` per form; missing forms
    /// couple to nothing.
    #[serde(default)]
    pub lambda: BTreeMap<String, Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BraneKind {
    Electric,
    Magnetic,
}

impl BraneKind {
    /// `chi_s`: +1 electric, -1 magnetic.
    pub fn chi(self) -> Sign {
        match self {
            BraneKind::Electric => Sign::Plus,
            BraneKind::Magnetic => Sign::Minus,
        }
    }
}

/// Brane charge. Only `Q_s^2` enters the couplings, so a charge whose value
/// is irrational can be given by its rational square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Charge {
    Value(Rational),
    Squared(Rational),
}

impl Charge {
    pub fn squared(&self) -> Rational {
        match self {
            Charge::Value(q) => q * q,
            Charge::Squared(q2) => q2.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Charge::Value(q) => q.is_zero(),
            Charge::Squared(q2) => q2.is_zero(),
        }
    }

    /// Exact value when rational, otherwise `sqrt(Q2)`.
    pub fn label(&self) -> String {
        match self {
            Charge::Value(q) => q.to_string(),
            Charge::Squared(q2) => format!("sqrt({q2})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BraneJson", into = "BraneJson")]
pub struct Brane {
    pub form: String,
    pub kind: BraneKind,
    /// 1-based factor-space indices of the worldvolume `I_s`.
    pub worldvolume: BTreeSet<usize>,
    pub charge: Charge,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BraneJson {
    form: String,
    kind: BraneKind,
    #[serde(rename = "I")]
    worldvolume: BTreeSet<usize>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    q: Option<Rational>,
    #[serde(rename = "Q2", default, skip_serializing_if = "Option::is_none")]
    q2: Option<Rational>,
}

impl TryFrom<BraneJson> for Brane {
    type Error = String;
    fn try_from(b: BraneJson) -> Result<Self, Self::Error> {
        let charge = match (b.q, b.q2) {
            (Some(q), None) => Charge::Value(q),
            (None, Some(q2)) if !q2.is_negative() => Charge::Squared(q2),
            (None, Some(q2)) => return Err(format!("Q2 = {q2} is negative")),
            _ => return Err("brane needs exactly one of \"Q\" or \"Q2\"".to_string()),
        };
        Ok(Brane {
            form: b.form,
            kind: b.kind,
            worldvolume: b.worldvolume,
            charge,
        })
    }
}

impl From<Brane> for BraneJson {
    fn from(b: Brane) -> Self {
        let (q, q2) = match b.charge {
            Charge::Value(q) => (Some(q), None),
            Charge::Squared(q2) => (None, Some(q2)),
        };
        BraneJson {
            form: b.form,
            kind: b.kind,
            worldvolume: b.worldvolume,
            q,
            q2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    factor_spaces: Vec<FactorSpace>,
    forms: Vec<Form>,
    #[serde(default)]
    scalars: ScalarSector,
    eps_g: Sign,
    w: Sign,
    branes: Vec<Brane>,
}

/// A validated model. Structural problems (bad indices, unknown forms,
/// singular scalar metric) are rejected at construction; physical
/// admissibility is left to [`crate::brane::validate_model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraneModel {
    pub name: Option<String>,
    factor_spaces: Vec<FactorSpace>,
    forms: Vec<Form>,
    scalars: ScalarSector,
    scalar_metric: RationalMatrix,
    scalar_metric_inv: RationalMatrix,
    eps_g: Sign,
    w: Sign,
    branes: Vec<Brane>,
}

impl BraneModel {
    pub fn new(
        factor_spaces: Vec<FactorSpace>,
        forms: Vec<Form>,
        scalars: ScalarSector,
        eps_g: Sign,
        w: Sign,
        branes: Vec<Brane>,
    ) -> Result<Self, ModelError> {
        let first = factor_spaces.first().ok_or(ModelError::NoFactorSpaces)?;
        if first.dim != 1 {
            return Err(ModelError::FirstSpaceNotLine(first.dim));
        }
        if let Some(i) = factor_spaces.iter().position(|f| f.dim == 0) {
            return Err(ModelError::ZeroDimension(i + 1));
        }
        let mut names = BTreeSet::new();
        for f in &forms {
            if !names.insert(f.name.as_str()) {
                return Err(ModelError::DuplicateForm(f.name.clone()));
            }
        }

        let l = scalars.h.len();
        let scalar_metric = if l == 0 {
            RationalMatrix::zeros(0, 0)
        } else {
            RationalMatrix::from_rows(scalars.h.clone()).map_err(|_| ModelError::AsymmetricScalarMetric)?
        };
        if !scalar_metric.is_square() || !scalar_metric.is_symmetric() {
            return Err(ModelError::AsymmetricScalarMetric);
        }
        let scalar_metric_inv = if l == 0 {
            scalar_metric.clone()
        } else {
            scalar_metric
                .inverse()
                .map_err(|_| ModelError::SingularScalarMetric)?
        };
        for (form, lam) in &scalars.lambda {
            if !names.contains(form.as_str()) {
                return Err(ModelError::CouplingForUnknownForm(form.clone()));
            }
            if lam.len() != l {
                return Err(ModelError::CouplingLength {
                    form: form.clone(),
                    expected: l,
                    got: lam.len(),
                });
            }
        }

        let n = factor_spaces.len();
        for (s, b) in branes.iter().enumerate() {
            if !names.contains(b.form.as_str()) {
                return Err(ModelError::UnknownForm {
                    brane: s + 1,
                    form: b.form.clone(),
                });
            }
            if b.worldvolume.is_empty() {
                return Err(ModelError::EmptyWorldvolume(s + 1));
            }
            if let Some(&bad) = b.worldvolume.iter().find(|&&i| i == 0 || i > n) {
                return Err(ModelError::BadIndex {
                    brane: s + 1,
                    index: bad,
                    n,
                });
            }
            if b.charge.is_zero() {
                return Err(ModelError::ZeroCharge(s + 1));
            }
        }

        Ok(BraneModel {
            name: None,
            factor_spaces,
            forms,
            scalars,
            scalar_metric,
            scalar_metric_inv,
            eps_g,
            w,
            branes,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelLoadError> {
        let raw: ModelJson = serde_json::from_str(text).map_err(|e| ModelLoadError::Parse(e.to_string()))?;
        let mut model = BraneModel::new(
            raw.factor_spaces,
            raw.forms,
            raw.scalars,
            raw.eps_g,
            raw.w,
            raw.branes,
        )?;
        model.name = raw.name;
        Ok(model)
    }

    pub fn from_path(path: &Path) -> Result<Self, ModelLoadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelLoadError::Io(format!("{}: {e}", path.display())))?;
        BraneModel::from_json(&text)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson {
            name: self.name.clone(),
            factor_spaces: self.factor_spaces.clone(),
            forms: self.forms.clone(),
            scalars: self.scalars.clone(),
            eps_g: self.eps_g,
            w: self.w,
            branes: self.branes.clone(),
        })
        .expect("model serializes")
    }

    pub fn factor_spaces(&self) -> &[FactorSpace] {
        &self.factor_spaces
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn branes(&self) -> &[Brane] {
        &self.branes
    }

    pub fn eps_g(&self) -> Sign {
        self.eps_g
    }

    pub fn w(&self) -> Sign {
        self.w
    }

    /// Number of factor spaces `n`.
    pub fn n(&self) -> usize {
        self.factor_spaces.len()
    }

    /// `D = 1 + sum_i d_i`.
    pub fn total_dimension(&self) -> u32 {
        1 + self.factor_spaces.iter().map(|f| f.dim).sum::<u32>()
    }

    pub fn scalar_count(&self) -> usize {
        self.scalar_metric.rows()
    }

    pub fn form(&self, name: &str) -> &Form {
        self.forms
            .iter()
            .find(|f| f.name == name)
            .expect("forms checked at construction")
    }

    /// `d(I) = sum_{i in I} d_i`.
    pub fn dim_of(&self, set: &BTreeSet<usize>) -> u32 {
        set.iter().map(|&i| self.factor_spaces[i - 1].dim).sum()
    }

    /// `eps(I) = prod_{i in I} eps(i)`.
    pub fn eps_of(&self, set: &BTreeSet<usize>) -> Sign {
        set.iter()
            .map(|&i| self.factor_spaces[i - 1].eps)
            .fold(Sign::Plus, |a, b| a * b)
    }

    pub fn worldvolume_dim(&self, s: usize) -> u32 {
        self.dim_of(&self.branes[s].worldvolume)
    }

    pub fn intersection_dim(&self, s: usize, t: usize) -> u32 {
        let common: BTreeSet<usize> = self.branes[s]
            .worldvolume
            .intersection(&self.branes[t].worldvolume)
            .copied()
            .collect();
        self.dim_of(&common)
    }

    /// Coupling covector `lambda_{a alpha}` (zero if none given).
    pub fn coupling(&self, form: &str) -> Vec<Rational> {
        self.scalars
            .lambda
            .get(form)
            .cloned()
            .unwrap_or_else(|| vec![Rational::zero(); self.scalar_count()])
    }

    /// Raised coupling `lambda_a^alpha = h^{alpha beta} lambda_{a beta}`.
    pub fn raised_coupling(&self, form: &str) -> Vec<Rational> {
        if self.scalar_count() == 0 {
            return Vec::new();
        }
        self.scalar_metric_inv.mul_vec(&self.coupling(form))
    }

    /// `lambda_a . lambda_b` with the inverse scalar metric.
    pub fn coupling_product(&self, a: &str, b: &str) -> Rational {
        if self.scalar_count() == 0 {
            return Rational::zero();
        }
        self.scalar_metric_inv
            .bilinear(&self.coupling(a), &self.coupling(b))
    }

    /// Same model with a different brane list.
    pub fn with_branes(&self, branes: Vec<Brane>) -> Result<Self, ModelError> {
        let mut m = BraneModel::new(
            self.factor_spaces.clone(),
            self.forms.clone(),
            self.scalars.clone(),
            self.eps_g,
            self.w,
            branes,
        )?;
        m.name = self.name.clone();
        Ok(m)
    }

    pub fn with_eps_g(&self, eps_g: Sign) -> Self {
        let mut m = self.clone();
        m.eps_g = eps_g;
        m
    }

    pub fn with_w(&self, w: Sign) -> Self {
        let mut m = self.clone();
        m.w = w;
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelLoadError {
    #[error("cannot read model: {0}")]
    Io(String),
    #[error("cannot parse model: {0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}
