//! Admissibility report for a brane configuration. Findings never abort.

use serde::Serialize;

use crate::brane::constants::{brane_sign, compute_b_matrix};
use crate::brane::model::{BraneKind, BraneModel, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `d(I_s) = N_a - 1` (electric) or `D - N_a - 1` (magnetic).
    WorldvolumeDimension,
    /// `d(I ∩ J) <= d(I) - 2` for same-form, same-kind pairs.
    R1,
    /// `d(I ∩ J) != 0` for electric/magnetic pairs of one form.
    R2,
    /// `B_ss != 0`.
    DiagonalNonzero,
    /// `det B != 0`.
    Nondegenerate,
    /// `eps_s > 0`, needed for the polynomial treatment.
    EpsPositive,
    /// `K_s > 0`, needed for the polynomial treatment.
    KPositive,
    /// `M_1` lies in every worldvolume, as the metric ansatz assumes.
    RadialCircleInWorldvolume,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub kind: CheckKind,
    /// 1-based branes the check refers to (empty for global checks).
    pub branes: Vec<usize>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, kind: CheckKind) -> bool {
        self.checks.iter().filter(|c| c.kind == kind).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, kind: CheckKind, branes: Vec<usize>, passed: bool, detail: String) {
        self.checks.push(Check {
            kind,
            branes,
            passed,
            detail,
        });
    }
}

pub fn validate_model(model: &BraneModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let branes = model.branes();
    let d_total = model.total_dimension() as i64;

    for (s, b) in branes.iter().enumerate() {
        let rank = model.form(&b.form).rank as i64;
        let expected = match b.kind {
            BraneKind::Electric => rank - 1,
            BraneKind::Magnetic => d_total - rank - 1,
        };
        let actual = model.worldvolume_dim(s) as i64;
        report.push(
            CheckKind::WorldvolumeDimension,
            vec![s + 1],
            actual == expected,
            format!("d(I) = {actual}, {:?} brane of rank-{rank} form needs {expected}", b.kind),
        );
    }

    for s in 0..branes.len() {
        for t in s + 1..branes.len() {
            let (bs, bt) = (&branes[s], &branes[t]);
            if bs.form != bt.form {
                continue;
            }
            let inter = model.intersection_dim(s, t) as i64;
            if bs.kind == bt.kind {
                let ds = model.worldvolume_dim(s) as i64;
                report.push(
                    CheckKind::R1,
                    vec![s + 1, t + 1],
                    inter <= ds - 2,
                    format!("d(I ∩ J) = {inter}, bound d(I) - 2 = {}", ds - 2),
                );
            } else {
                report.push(
                    CheckKind::R2,
                    vec![s + 1, t + 1],
                    inter != 0,
                    format!("d(I ∩ J) = {inter}"),
                );
            }
        }
    }

    let b = compute_b_matrix(model);
    for (s, brane) in branes.iter().enumerate() {
        let k = b.get(s, s);
        report.push(
            CheckKind::DiagonalNonzero,
            vec![s + 1],
            !k.is_zero(),
            format!("B_ss = {k}"),
        );
        report.push(
            CheckKind::KPositive,
            vec![s + 1],
            k.is_positive(),
            format!("K_s = {k}"),
        );
        let eps = brane_sign(model, s);
        report.push(
            CheckKind::EpsPositive,
            vec![s + 1],
            eps == Sign::Plus,
            format!("eps_s = {eps}"),
        );
        let has_m1 = brane.worldvolume.contains(&1);
        report.push(
            CheckKind::RadialCircleInWorldvolume,
            vec![s + 1],
            has_m1,
            if has_m1 {
                "1 ∈ I_s".to_string()
            } else {
                "1 ∉ I_s; the M_1 metric factor still carries H_s^(-2h_s)".to_string()
            },
        );
    }
    if !branes.is_empty() {
        let det = b.determinant().expect("B is square");
        report.push(
            CheckKind::Nondegenerate,
            Vec::new(),
            !det.is_zero(),
            format!("det B = {det}"),
        );
    }
    report
}
