//! `toda-brane` command line: model file -> constants -> quasi-Cartan matrix
//! -> moduli polynomials -> verification -> profile evaluation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::brane::{compute_brane_constants, validate_model, BraneConstants, BraneModel};
use crate::matrix::RationalMatrix;
use crate::numeric::{cross_validate, unit_grid, CrossConfig, Tolerances, DEFAULT_THRESHOLD, DEFAULT_Z0};
use crate::profile::{
    build_profile, build_profile_with_constants, cylindrical_specialization, evaluate_grid, find_breakdown,
    ProfilePoint,
};
use crate::rational::Rational;
use crate::toda::conjecture::{is_singular, verify_conjecture_with_solution};
use crate::toda::{residual_check, solve_coefficients, weyl_degrees, Algebra, Mode, ModuliSolution, QuasiCartanMatrix, DEFAULT_MARGIN};

/// Order used when `--order` is absent and the degrees are not positive
/// integers.
pub const FALLBACK_ORDER: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "toda-brane", version, about = "Exact moduli polynomials for Toda-type brane master equations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Truncation order of the recurrence.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Extra orders checked above the predicted degree.
    #[arg(long, global = true, default_value_t = DEFAULT_MARGIN)]
    pub margin: usize,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub atol: f64,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "TODA_BRANE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the recurrence for the moduli coefficients.
    Solve(SolveArgs),
    /// Constants, quasi-Cartan matrix, validation report and profile of a model.
    Build(BuildArgs),
    /// Degree conjecture, exact residual and ODE cross-validation.
    Verify(VerifyArgs),
    /// Evaluate the solution profile on a grid of rho.
    Profile(ProfileArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct MatrixSource {
    /// One of A1, A1+A1, A2, B2, C2, G2.
    #[arg(long)]
    pub algebra: Option<Algebra>,
    /// Inline JSON matrix, e.g. '[[2,-1],[-1,2]]'; entries may be "num/den".
    #[arg(long)]
    pub matrix: Option<String>,
    /// Brane model file; its quasi-Cartan matrix is used.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: MatrixSource,
    /// Keep P_s as free symbols (default unless values are given).
    #[arg(long, conflicts_with = "values")]
    pub symbolic: bool,
    /// Comma-separated P_s values, e.g. "1,1/2".
    #[arg(long)]
    pub values: Option<String>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    pub model: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: MatrixSource,
    /// P_s used for the ODE comparison (default all 1).
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long, default_value_t = DEFAULT_Z0)]
    pub z0: f64,
    /// Pass threshold for the maximum relative ODE deviation.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    pub model: PathBuf,
    /// P_s values (default: those of the model's charges).
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long, default_value = "0")]
    pub rho_min: String,
    #[arg(long, default_value = "1")]
    pub rho_max: String,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(String),
    /// Verification ran but did not pass; the report was still written.
    Verification,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Verification => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    if let Some(n) = cli.global.threads {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Solve(a) => run_solve(&cli.global, a),
        Command::Build(a) => run_build(&cli.global, a, stderr),
        Command::Verify(a) => run_verify(&cli.global, a),
        Command::Profile(a) => run_profile(&cli.global, a, stderr),
    };
    let (text, status) = match result {
        Ok(text) => (Some(text), Ok(())),
        Err((text, e)) => (text, Err(e)),
    };
    if let Some(text) = text {
        if let Err(e) = emit(&cli.global, &text, stdout) {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    }
    match status {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Input(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                CliError::Compute(m) => {
                    let _ = writeln!(stderr, "computation failed: {m}");
                }
                CliError::Verification => {
                    let _ = writeln!(stderr, "verification failed");
                }
            }
            e.exit_code()
        }
    }
}

/// A command yields its output text, or an error with optional output (the
/// verification report is still written when it fails).
type Outcome = Result<String, (Option<String>, CliError)>;

fn fail(e: CliError) -> (Option<String>, CliError) {
    (None, e)
}

fn emit(global: &GlobalArgs, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &global.output {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Comma-separated exact rationals.
pub fn parse_values(text: &str) -> CliResult<Vec<Rational>> {
    text.split(',')
        .map(|v| v.trim().parse::<Rational>().map_err(input))
        .collect()
}

/// A rational `num/den` or a plain decimal such as `0.25`, read exactly.
pub fn parse_exact(text: &str) -> CliResult<Rational> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        let bad = || CliError::Input(format!("not a number: {text:?}"));
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            Rational::zero()
        } else {
            int.parse::<Rational>().map_err(|_| bad())?
        };
        let digits: Rational = frac.parse().map_err(|_| bad())?;
        let scale = Rational::from(10).powi(frac.len() as i32);
        let f = digits / scale;
        return Ok(if negative { int_part - f } else { int_part + f });
    }
    t.parse().map_err(input)
}

fn load_model(path: &Path) -> CliResult<BraneModel> {
    BraneModel::from_path(path).map_err(input)
}

fn model_constants(model: &BraneModel) -> CliResult<BraneConstants> {
    compute_brane_constants(model).map_err(input)
}

/// The matrix plus the P values the source implies (a model fixes them).
fn resolve_matrix(source: &MatrixSource) -> CliResult<(QuasiCartanMatrix, Option<Vec<Rational>>)> {
    if let Some(alg) = source.algebra {
        return Ok((alg.cartan_matrix(), None));
    }
    if let Some(text) = &source.matrix {
        let rows: Vec<Vec<Rational>> = serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad --matrix: {e}")))?;
        let m = RationalMatrix::from_rows(rows).map_err(input)?;
        return Ok((QuasiCartanMatrix::new(m).map_err(input)?, None));
    }
    let path = source.model.as_ref().expect("clap requires one source");
    let c = model_constants(&load_model(path)?)?;
    Ok((c.quasi_cartan, Some(c.p)))
}

/// One past the largest predicted degree when all are positive integers.
pub fn default_order(a: &QuasiCartanMatrix) -> usize {
    let Ok(degrees) = weyl_degrees(a) else {
        return FALLBACK_ORDER;
    };
    let ints: Option<Vec<i64>> = degrees.iter().map(|d| d.to_i64().filter(|&v| v > 0)).collect();
    match ints {
        Some(v) => v.into_iter().max().unwrap_or(0) as usize + 1,
        None => FALLBACK_ORDER,
    }
}

fn order_for(global: &GlobalArgs, a: &QuasiCartanMatrix) -> CliResult<usize> {
    match global.order {
        Some(0) => Err(CliError::Input("--order must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(default_order(a)),
    }
}

fn check_count(values: &[Rational], m: usize) -> CliResult<()> {
    if values.len() == m {
        Ok(())
    } else {
        Err(CliError::Input(format!("expected {m} values, got {}", values.len())))
    }
}

pub fn run_solve(global: &GlobalArgs, args: &SolveArgs) -> Outcome {
    let (a, model_p) = resolve_matrix(&args.source).map_err(fail)?;
    let order = order_for(global, &a).map_err(fail)?;
    let mode = match (&args.values, args.symbolic, model_p) {
        (Some(v), _, _) => {
            let v = parse_values(v).map_err(fail)?;
            check_count(&v, a.rank()).map_err(fail)?;
            Mode::Numeric(v)
        }
        (None, false, Some(p)) => Mode::Numeric(p),
        _ => Mode::Symbolic,
    };
    let sol = solve_coefficients(&a, order, mode).map_err(|e| fail(compute(e)))?;
    Ok(match global.format {
        Format::Json => to_json(&sol),
        Format::Csv => solution_csv(&sol),
    })
}

fn solution_csv(sol: &ModuliSolution) -> String {
    let mut out = String::from("brane,order,coefficient\n");
    for s in 0..sol.brane_count() {
        for k in 0..=sol.order() {
            let _ = writeln!(out, "{},{},\"{}\"", s + 1, k, sol.coefficient(s, k));
        }
    }
    out
}

pub fn run_build(global: &GlobalArgs, args: &BuildArgs, stderr: &mut dyn Write) -> Outcome {
    if global.format == Format::Csv {
        return Err(fail(CliError::Input("build output is JSON only".into())));
    }
    let model = load_model(&args.model).map_err(fail)?;
    let validation = validate_model(&model);
    let (constants, profile) = if model.branes().is_empty() {
        (None, Some(build_profile(&model).map_err(|e| fail(input(e)))?))
    } else {
        match compute_brane_constants(&model) {
            Ok(c) => {
                let p = build_profile_with_constants(&model, &c);
                (Some(c), Some(p))
            }
            // B_ss = 0: the report already carries the failed check.
            Err(_) => (None, None),
        }
    };
    let warnings: Vec<String> = validation
        .failures()
        .map(|c| {
            let who = if c.branes.is_empty() {
                String::new()
            } else {
                format!(" (branes {:?})", c.branes)
            };
            format!("{}{who}: {}", serde_json::to_value(c.kind).unwrap().as_str().unwrap_or(""), c.detail)
        })
        .collect();
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let classification = profile.as_ref().map(cylindrical_specialization);
    Ok(to_json(&json!({
        "name": model.name,
        "total_dimension": model.total_dimension(),
        "constants": constants,
        "validation": validation,
        "warnings": warnings,
        "profile": profile,
        "classification": classification,
    })))
}

pub fn run_verify(global: &GlobalArgs, args: &VerifyArgs) -> Outcome {
    let (a, model_p) = resolve_matrix(&args.source).map_err(fail)?;
    let values = match (&args.values, model_p) {
        (Some(v), _) => parse_values(v).map_err(fail)?,
        (None, Some(p)) => p,
        (None, None) => vec![Rational::one(); a.rank()],
    };
    check_count(&values, a.rank()).map_err(fail)?;

    let (conjecture, sol, confirmed) = match verify_conjecture_with_solution(&a, global.margin) {
        Ok((report, sol)) => {
            let ok = report.confirmed();
            (serde_json::to_value(&report).expect("serializable"), sol, ok)
        }
        Err(e) if is_singular(&e) => (
            json!({
                "matrix": a,
                "verdict": "degrees-undefined",
                "reason": "quasi-Cartan matrix is singular; twice the dual Weyl vector does not exist",
            }),
            None,
            false,
        ),
        Err(e) => return Err(fail(compute(e))),
    };
    let sol = match sol {
        Some(s) => s,
        None => {
            let order = order_for(global, &a).map_err(fail)?;
            solve_coefficients(&a, order, Mode::Symbolic).map_err(|e| fail(compute(e)))?
        }
    };

    let residual = residual_check(&a, &sol, sol.order().saturating_sub(1)).map_err(|e| fail(compute(e)))?;
    let residual_ok = residual.is_zero();

    let config = CrossConfig {
        z0: args.z0,
        tolerances: Tolerances {
            rtol: global.rtol,
            atol: global.atol,
        },
        threshold: args.threshold,
    };
    let cross = cross_validate(&a.to_string(), &sol, Some(&values), &unit_grid(), &config);
    let (cross_json, cross_ok) = match &cross {
        Ok(r) => (serde_json::to_value(r).expect("serializable"), r.pass),
        Err(e) => (json!({ "error": e.to_string(), "pass": false }), false),
    };

    let pass = confirmed && residual_ok && cross_ok;
    let text = match global.format {
        Format::Json => to_json(&json!({
            "conjecture": conjecture,
            "residual": {
                "path": residual.path,
                "checked_order": residual.checked_order,
                "zero": residual_ok,
                "first_nonzero": residual.first_nonzero().map(|(s, k)| json!({"brane": s + 1, "power": k})),
            },
            "cross_validation": cross_json,
            "values": values,
            "pass": pass,
        })),
        Format::Csv => {
            let mut out = String::from("z,brane,ode,series,rel_dev\n");
            if let Ok(r) = &cross {
                for p in &r.points {
                    for s in 0..p.ode.len() {
                        let dev = ((p.ode[s] - p.series[s]) / p.series[s]).abs();
                        let _ = writeln!(out, "{},{},{:e},{:e},{:e}", p.z, s + 1, p.ode[s], p.series[s], dev);
                    }
                }
            }
            out
        }
    };
    if pass {
        Ok(text)
    } else {
        Err((Some(text), CliError::Verification))
    }
}

pub fn run_profile(global: &GlobalArgs, args: &ProfileArgs, stderr: &mut dyn Write) -> Outcome {
    let model = load_model(&args.model).map_err(fail)?;
    let rho_min = parse_exact(&args.rho_min).map_err(fail)?;
    let rho_max = parse_exact(&args.rho_max).map_err(fail)?;
    if rho_min.is_negative() || rho_max < rho_min {
        return Err(fail(CliError::Input("need 0 <= rho-min <= rho-max".into())));
    }

    let (profile, series, values) = if model.branes().is_empty() {
        (build_profile(&model).map_err(|e| fail(input(e)))?, Vec::new(), Vec::new())
    } else {
        let c = model_constants(&model).map_err(fail)?;
        let values = match &args.values {
            Some(v) => parse_values(v).map_err(fail)?,
            None => c.p.clone(),
        };
        check_count(&values, c.p.len()).map_err(fail)?;
        let order = order_for(global, &c.quasi_cartan).map_err(fail)?;
        let sol = solve_coefficients(&c.quasi_cartan, order, Mode::Numeric(values.clone())).map_err(|e| fail(compute(e)))?;
        let series = sol.numeric_series(None).map_err(|e| fail(compute(e)))?;
        (build_profile_with_constants(&model, &c), series, values)
    };

    let (points, cut) = evaluate_grid(&profile, &series, &rho_min, &rho_max, args.steps);
    let breakdown = find_breakdown(&series, rho_max.to_f64(), 1000, 1e-12);
    if let Some(e) = &cut {
        let _ = writeln!(stderr, "warning: grid stopped early: {e}");
    }
    Ok(match global.format {
        Format::Json => to_json(&json!({
            "profile": profile,
            "classification": cylindrical_specialization(&profile),
            "values": values,
            "points": points,
            "breakdown": breakdown,
            "stopped": cut.map(|e| e.to_string()),
        })),
        Format::Csv => profile_csv(&points),
    })
}

fn profile_csv(points: &[ProfilePoint]) -> String {
    let mut out = String::from("rho,z");
    if let Some(p) = points.first() {
        for s in 1..=p.h.len() {
            let _ = write!(out, ",H_{s}");
        }
        out.push_str(",radial");
        for sp in &p.spaces {
            let _ = write!(out, ",g_{}", sp.space);
        }
        for sc in &p.scalars {
            let _ = write!(out, ",exp_phi_{}", sc.alpha + 1);
        }
    }
    out.push('\n');
    for p in points {
        let _ = write!(out, "{:e},{:e}", p.rho, p.z);
        for v in &p.h {
            let _ = write!(out, ",{v:e}");
        }
        let _ = write!(out, ",{:e}", p.radial);
        for sp in &p.spaces {
            let _ = write!(out, ",{:e}", sp.coefficient);
        }
        for sc in &p.scalars {
            let _ = write!(out, ",{:e}", sc.exp_phi);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use serde_json::Value;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["toda-brane"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exact_decimal_parsing() {
        assert_eq!(parse_exact("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_exact("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_exact(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_exact("3/4").unwrap(), rat(3, 4));
        assert!(parse_exact("1.").is_err());
        assert!(parse_exact("1.2.3").is_err());
        assert!(parse_exact("x").is_err());
    }

    #[test]
    fn default_orders() {
        assert_eq!(default_order(&Algebra::G2.cartan_matrix()), 11);
        assert_eq!(default_order(&Algebra::A1xA1.cartan_matrix()), 2);
        let affine = QuasiCartanMatrix::from_ints(&[&[2, -2], &[-2, 2]]).unwrap();
        assert_eq!(default_order(&affine), FALLBACK_ORDER);
    }

    #[test]
    fn solve_diag_is_linear() {
        let (code, out, _) = call(&["solve", "--matrix", "[[2,0],[0,2]]", "--order", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["mode"], "symbolic");
        for b in v["branes"].as_array().unwrap() {
            let c = b["coeffs"].as_array().unwrap();
            assert!(c[2].as_array().unwrap().is_empty() && c[3].as_array().unwrap().is_empty());
        }
    }

    #[test]
    fn solve_numeric_and_csv() {
        let (code, out, _) = call(&["solve", "--algebra", "A2", "--values", "1,1", "--order", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("brane,order,coefficient\n"));
        assert!(out.contains("1,2,\"1/4\""));
    }

    #[test]
    fn input_errors_exit_one() {
        assert_eq!(call(&["solve", "--algebra", "C2", "--order", "0"]).0, 1);
        assert_eq!(call(&["solve", "--algebra", "E8"]).0, 1);
        assert_eq!(call(&["solve", "--matrix", "[[2,1],[1]]"]).0, 1);
        assert_eq!(call(&["solve", "--matrix", "[[3,0],[0,2]]"]).0, 1);
        assert_eq!(call(&["solve", "--algebra", "A2", "--values", "1"]).0, 1);
        assert_eq!(call(&["solve", "--algebra", "A2", "--values", "0.5,1"]).0, 1);
        assert_eq!(call(&["build", "/nonexistent/model.json"]).0, 1);
        assert_eq!(call(&["solve"]).0, 1);
    }

    #[test]
    fn verify_singular_is_degrees_undefined() {
        let (code, out, _) = call(&["verify", "--matrix", "[[2,-2],[-2,2]]"]);
        assert_eq!(code, 3);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["conjecture"]["verdict"], "degrees-undefined");
        assert_eq!(v["pass"], false);
    }

    #[test]
    fn verify_g2_matrix() {
        let (code, out, _) = call(&["verify", "--matrix", "[[2,-1],[-3,2]]"]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let degrees: Vec<&str> = v["conjecture"]["branes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| b["predicted_degree"].as_str().unwrap())
            .collect();
        assert_eq!(degrees, ["6", "10"]);
        assert_eq!(v["residual"]["zero"], true);
        assert_eq!(v["residual"]["path"], "exact-polynomial");
    }

    #[test]
    fn output_is_deterministic() {
        let a = call(&["solve", "--algebra", "G2", "--order", "12"]).1;
        let b = call(&["solve", "--algebra", "G2", "--order", "12"]).1;
        assert_eq!(a, b);
    }

    #[test]
    fn output_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c2.json");
        let (code, out, _) = call(&["solve", "--algebra", "C2", "--output", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(serde_json::from_str::<Value>(&text).is_ok());
    }
}
