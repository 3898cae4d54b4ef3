//! Floating-point check of the moduli polynomials by direct integration of
//!
//! ```text
//! d/dz (z H_s' / H_s) = P_s prod_t H_t^(-A_st),   H_s(0) = 1,
//! ```
//!
//! written as the first-order system for `(H_s, H_s')` with
//! `H_s'' = (F_s H_s - H_s') / z + H_s'^2 / H_s`. The point `z = 0` is a
//! regular singular point, so the run starts at `z0 > 0` from the truncated
//! series.

use serde::Serialize;

use crate::error::{OdeError, SolverError};
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::toda::{ModuliSolution, QuasiCartanMatrix};

/// Series order used to seed `(H_s(z0), H_s'(z0))`.
pub const SEED_ORDER: usize = 4;
pub const DEFAULT_Z0: f64 = 1e-6;
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeSample {
    pub z: f64,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeRun {
    pub matrix: Vec<Vec<f64>>,
    pub b_s: Vec<f64>,
    pub z0: f64,
    pub z1: f64,
    pub tolerances: Tolerances,
    pub initial: OdeSample,
    /// `max_s |H_s(z0) - 1 - P_s z0|`.
    pub seed_deviation: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// State at `z0`, at every requested grid point inside `(z0, z1]`, and
    /// at `z1`.
    pub samples: Vec<OdeSample>,
}

impl OdeRun {
    pub fn final_sample(&self) -> &OdeSample {
        self.samples.last().expect("at least the initial sample")
    }

    /// `z,H_1..H_m,dH_1..dH_m`, one line per sample.
    pub fn to_csv(&self) -> String {
        let m = self.b_s.len();
        let mut out = String::from("z");
        for s in 1..=m {
            out.push_str(&format!(",H_{s}"));
        }
        for s in 1..=m {
            out.push_str(&format!(",dH_{s}"));
        }
        out.push('\n');
        for smp in &self.samples {
            out.push_str(&format!("{:e}", smp.z));
            for v in smp.h.iter().chain(&smp.dh) {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
        out
    }
}

struct System<'a> {
    a: &'a [Vec<f64>],
    p: Vec<f64>,
}

impl System<'_> {
    fn m(&self) -> usize {
        self.p.len()
    }

    fn forcing(&self, h: &[f64], s: usize) -> f64 {
        let log: f64 = (0..self.m())
            .filter(|&t| self.a[s][t] != 0.0)
            .map(|t| -self.a[s][t] * h[t].ln())
            .sum();
        self.p[s] * log.exp()
    }

    /// `y = (H_1..H_m, H_1'..H_m')`.
    fn rhs(&self, z: f64, y: &[f64], out: &mut [f64]) {
        let m = self.m();
        let (h, dh) = y.split_at(m);
        for s in 0..m {
            out[s] = dh[s];
            let f = self.forcing(h, s);
            out[m + s] = (f * h[s] - dh[s]) / z + dh[s] * dh[s] / h[s];
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One DP45 step; returns the 5th-order solution and the error estimate.
fn dp45_step(sys: &System, z: f64, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    for stage in 0..7 {
        for i in 0..n {
            let mut acc = y[i];
            for (j, kj) in k.iter().enumerate().take(stage) {
                acc += h * A[stage][j] * kj[i];
            }
            tmp[i] = acc;
        }
        sys.rhs(z + C[stage] * h, &tmp, &mut k[stage]);
    }
    let mut y5 = vec![0.0; n];
    let mut err = vec![0.0; n];
    for i in 0..n {
        let (mut s5, mut s4) = (0.0, 0.0);
        for stage in 0..7 {
            s5 += B5[stage] * k[stage][i];
            s4 += B4[stage] * k[stage][i];
        }
        y5[i] = y[i] + h * s5;
        err[i] = h * (s5 - s4);
    }
    (y5, err)
}

fn sample(z: f64, y: &[f64], m: usize) -> OdeSample {
    OdeSample {
        z,
        h: y[..m].to_vec(),
        dh: y[m..].to_vec(),
    }
}

/// Integrates from `z0` to `z1`, seeding from `seed` (numeric series of
/// order at least [`SEED_ORDER`]) and recording the state at each point of
/// `grid` that falls in `(z0, z1]`.
pub fn integrate_master_ode(
    a: &QuasiCartanMatrix,
    b_s: &[f64],
    seed: &[TruncatedSeries],
    z0: f64,
    z1: f64,
    tol: Tolerances,
    grid: &[f64],
) -> Result<OdeRun, OdeError> {
    if !(z0 > 0.0 && z0 < z1) {
        return Err(OdeError::BadInterval { z0, z1 });
    }
    let m = a.rank();
    if b_s.len() != m || seed.len() != m {
        return Err(OdeError::MissingValues {
            expected: m,
            got: b_s.len().min(seed.len()),
        });
    }
    if let Some(short) = seed.iter().map(|s| s.order().unwrap_or(0)).find(|&o| o < SEED_ORDER) {
        return Err(OdeError::SeedOrder {
            needed: SEED_ORDER,
            got: short,
        });
    }
    let matrix = a.as_matrix().to_f64_rows();
    let sys = System {
        a: &matrix,
        p: b_s.iter().map(|b| b / 4.0).collect(),
    };

    let mut y = vec![0.0; 2 * m];
    for (s, series) in seed.iter().enumerate() {
        let t = series.truncate(SEED_ORDER);
        y[s] = t.eval_f64(z0);
        y[m + s] = t.eval_derivative_f64(z0);
    }
    let seed_deviation = (0..m)
        .map(|s| (y[s] - 1.0 - sys.p[s] * z0).abs())
        .fold(0.0, f64::max);
    let initial = sample(z0, &y, m);

    let mut stops: Vec<f64> = grid.iter().copied().filter(|&g| g > z0 && g < z1).collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(z1);

    let mut samples = vec![initial.clone()];
    let (mut accepted, mut rejected) = (0, 0);
    let mut z = z0;
    // The linear part has an eigenvalue near -1/z, so steps scale with z.
    let mut h = 0.1 * z0;
    for &stop in &stops {
        while z < stop {
            let last = stop - z <= h;
            let step = if last { stop - z } else { h };
            if step <= 1e-15 * z.max(1.0) {
                return Err(OdeError::StepFailure { z });
            }
            let (y_new, err) = dp45_step(&sys, z, &y, step);
            let norm = y
                .iter()
                .zip(&y_new)
                .zip(&err)
                .map(|((a, b), e)| e.abs() / (tol.atol + tol.rtol * a.abs().max(b.abs())))
                .fold(0.0, f64::max);
            if !norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                rejected += 1;
                h = step * 0.2;
                continue;
            }
            if norm <= 1.0 {
                z = if last { stop } else { z + step };
                y = y_new;
                accepted += 1;
                if let Some(s) = (0..m).find(|&s| y[s] <= 0.0) {
                    return Err(OdeError::PositivityLoss {
                        brane: s + 1,
                        z,
                        value: y[s],
                    });
                }
            } else {
                rejected += 1;
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            // A clipped final step says nothing about the natural step size.
            if !(last && norm <= 1.0) {
                h = step * factor;
            }
        }
        samples.push(sample(z, &y, m));
    }

    Ok(OdeRun {
        matrix,
        b_s: b_s.to_vec(),
        z0,
        z1,
        tolerances: tol,
        initial,
        seed_deviation,
        accepted_steps: accepted,
        rejected_steps: rejected,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossConfig {
    pub z0: f64,
    pub tolerances: Tolerances,
    /// Pass iff the maximum relative deviation is below this.
    pub threshold: f64,
}

impl Default for CrossConfig {
    fn default() -> Self {
        CrossConfig {
            z0: DEFAULT_Z0,
            tolerances: Tolerances::default(),
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridDeviation {
    pub z: f64,
    pub ode: Vec<f64>,
    pub series: Vec<f64>,
    pub rel_dev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossReport {
    pub case: String,
    pub z0: f64,
    pub z1: f64,
    pub max_rel_dev: f64,
    pub pass: bool,
    pub points: Vec<GridDeviation>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CrossError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Compares an ODE run against evaluation of the stored coefficients on
/// `grid` (ascending, positive). `B_s = 4 P_s` is read off the first-order
/// coefficients.
pub fn cross_validate(
    case: &str,
    sol: &ModuliSolution,
    values: Option<&[Rational]>,
    grid: &[f64],
    config: &CrossConfig,
) -> Result<CrossReport, CrossError> {
    let series = sol.numeric_series(values)?;
    let z1 = grid.iter().copied().fold(f64::NAN, f64::max);
    let b_s: Vec<f64> = series.iter().map(|s| 4.0 * s.coeff(1).constant_term().to_f64()).collect();
    let run = integrate_master_ode(sol.matrix(), &b_s, &series, config.z0, z1, config.tolerances, grid)?;

    let mut points = Vec::new();
    let mut max_rel_dev: f64 = 0.0;
    for smp in &run.samples[1..] {
        if !grid.contains(&smp.z) {
            continue;
        }
        let exact: Vec<f64> = series.iter().map(|s| s.eval_f64(smp.z)).collect();
        let rel_dev = smp
            .h
            .iter()
            .zip(&exact)
            .map(|(o, e)| ((o - e) / e).abs())
            .fold(0.0, f64::max);
        max_rel_dev = max_rel_dev.max(rel_dev);
        points.push(GridDeviation {
            z: smp.z,
            ode: smp.h.clone(),
            series: exact,
            rel_dev,
        });
    }
    Ok(CrossReport {
        case: case.to_string(),
        z0: config.z0,
        z1,
        max_rel_dev,
        pass: max_rel_dev < config.threshold,
        points,
    })
}

/// Relative residual of the master equation for the given numeric series at
/// `z`, in floating point: `max_s |LHS - RHS| / max(|RHS|, 1)`.
pub fn float_residual(a: &QuasiCartanMatrix, h: &[TruncatedSeries], z: f64) -> f64 {
    let m = a.rank();
    let matrix = a.as_matrix().to_f64_rows();
    let sys = System {
        a: &matrix,
        p: h.iter().map(|s| s.coeff(1).constant_term().to_f64()).collect(),
    };
    let val: Vec<f64> = h.iter().map(|s| s.eval_f64(z)).collect();
    (0..m)
        .map(|s| {
            let hs = val[s];
            let d1 = h[s].eval_derivative_f64(z);
            let d2 = h[s].d_dz().eval_derivative_f64(z);
            let lhs = (d1 + z * d2) / hs - z * d1 * d1 / (hs * hs);
            let rhs = sys.forcing(&val, s);
            (lhs - rhs).abs() / rhs.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `z = 0.1, 0.2, ..., 1.0`.
pub fn unit_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}
