//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toda_brane::brane::{
    b_matrix_with_intersections, compute_quasi_cartan, rules_to_dims, solve_intersection_dims, validate_model,
    BraneModel, CheckKind,
};
use toda_brane::numeric::{cross_validate, CrossConfig};
use toda_brane::profile::{build_profile, evaluate_profile, find_breakdown};
use toda_brane::rational::rat;
use toda_brane::toda::residual::series_residual;
use toda_brane::toda::solve::{cleared_rhs_polynomial, cleared_rhs_series};
use toda_brane::toda::{
    residual_check, solve_coefficients, weyl_degrees, Algebra, Mode, ModuliSolution, QuasiCartanMatrix, ResidualPath,
};
use toda_brane::{ParamPoly, Rational, RationalMatrix, TruncatedSeries};

use common::Golden;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:?}, limit {limit:?}"))
}

fn cli_solve(args: &[&str]) -> Result<ModuliSolution, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["toda-brane", "solve"];
    full.extend_from_slice(args);
    let code = toda_brane::cli::run(full, &mut out, &mut err);
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

/// Known coefficients match exactly and everything above them through
/// `order` vanishes.
fn check_golden(sol: &ModuliSolution, golden: &Golden) -> Result<(), String> {
    for s in 0..2 {
        let expected = golden.brane(s);
        for k in 0..=sol.order() {
            let want = expected.get(k).cloned().unwrap_or_else(|| ParamPoly::zero(2));
            let got = sol.coefficient(s, k);
            ensure(got == want, || format!("H_{} z^{k}: got {got}, want {want}", s + 1))?;
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sol = cli_solve(&["--algebra", "C2", "--order", "8", "--symbolic"])?;
    within(Duration::from_secs(1), start, "C2 solve")?;
    ensure(sol.order() == 8, || format!("order {}", sol.order()))?;
    check_golden(&sol, &common::C2)?;
    Ok(format!("C2 coefficients exact through z^8 in {:?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let sol = cli_solve(&["--algebra", "G2", "--order", "14", "--symbolic"])?;
    within(Duration::from_secs(10), start, "G2 solve")?;
    check_golden(&sol, &common::G2)?;
    Ok(format!("G2 coefficients exact through z^14 in {:?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let cases = [
        (Algebra::A2, (2, 2)),
        (Algebra::C2, (3, 4)),
        (Algebra::G2, (6, 10)),
        (Algebra::A1xA1, (1, 1)),
    ];
    for (alg, (n1, n2)) in cases {
        let d = weyl_degrees(&alg.cartan_matrix()).map_err(|e| e.to_string())?;
        ensure(d == vec![rat(n1, 1), rat(n2, 1)], || format!("{alg}: got {d:?}"))?;
    }
    Ok("(2,2) (3,4) (6,10) (1,1)".into())
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for (alg, order) in [(Algebra::A1xA1, 3), (Algebra::A2, 4), (Algebra::C2, 6), (Algebra::G2, 12)] {
        let a = alg.cartan_matrix();
        let sol = solve_coefficients(&a, order, Mode::Symbolic).map_err(|e| e.to_string())?;
        let r = residual_check(&a, &sol, order - 1).map_err(|e| e.to_string())?;
        ensure(r.path == ResidualPath::ExactPolynomial, || format!("{alg}: path {:?}", r.path))?;
        ensure(r.is_zero(), || format!("{alg}: nonzero residual at {:?}", r.first_nonzero()))?;
        notes.push(format!("{alg}:deg {}", r.checked_order.unwrap_or(0)));
    }
    Ok(format!("exact identity holds ({})", notes.join(", ")))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alg in [Algebra::A1xA1, Algebra::A2, Algebra::B2, Algebra::C2, Algebra::G2] {
        let a = alg.cartan_matrix();
        let sol = solve_coefficients(&a, 12, Mode::Numeric(vec![Rational::one(); 2])).map_err(|e| e.to_string())?;
        let r = cross_validate(alg.label(), &sol, None, &[1.0], &CrossConfig::default()).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("{alg}: max relative deviation {:e}", r.max_rel_dev))?;
        worst = worst.max(r.max_rel_dev);
    }
    let a2 = solve_coefficients(&Algebra::A2.cartan_matrix(), 4, Mode::Numeric(vec![Rational::one(); 2]))
        .map_err(|e| e.to_string())?;
    ensure(a2.series(0).eval_at(&Rational::one()) == rat(9, 4), || "A2 H(1) != 9/4".into())?;
    // The listed C2 terms 1 + 1 + 1/4 + 1/36 sum to 41/18.
    let c2 = solve_coefficients(&Algebra::C2.cartan_matrix(), 5, Mode::Numeric(vec![Rational::one(); 2]))
        .map_err(|e| e.to_string())?;
    ensure(c2.series(0).eval_at(&Rational::one()) == rat(41, 18), || "C2 H1(1) != 41/18".into())?;
    within(Duration::from_secs(5), start, "ODE runs")?;
    Ok(format!("worst relative deviation {worst:.2e} in {:?}", start.elapsed()))
}

fn m2_model() -> Result<BraneModel, String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models/m2_m2_fluxbrane.json");
    BraneModel::from_path(&path).map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let model = m2_model()?;
    let target = Algebra::A1xA1.cartan_matrix();
    let rules = solve_intersection_dims(&model, &target).map_err(|e| e.to_string())?;
    ensure(rules.len() == 1 && rules[0].dim == 1, || format!("rules {rules:?}"))?;
    let b = b_matrix_with_intersections(&model, &rules_to_dims(&rules));
    let a = compute_quasi_cartan(&b).map_err(|e| e.to_string())?;
    ensure(a == target, || format!("rebuilt A = {a}"))?;
    let report = validate_model(&model);
    for kind in [
        CheckKind::R1,
        CheckKind::DiagonalNonzero,
        CheckKind::Nondegenerate,
        CheckKind::EpsPositive,
        CheckKind::KPositive,
    ] {
        ensure(report.passed(kind), || format!("{kind:?} failed"))?;
    }
    Ok("d(I∩J) = 1, A = diag(2,2), R1, B_ss, det B, eps and K checks pass".into())
}

fn random_values(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..2)
        .map(|_| {
            let n = rng.gen_range(-9i64..=9);
            let d = rng.gen_range(1i64..=7);
            rat(n, d)
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a);

    // (a) numeric mode equals symbolic mode under substitution.
    for alg in [Algebra::A1xA1, Algebra::A2, Algebra::B2, Algebra::C2, Algebra::G2] {
        let a = alg.cartan_matrix();
        let symbolic = solve_coefficients(&a, 12, Mode::Symbolic).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let v = random_values(&mut rng);
            let numeric = solve_coefficients(&a, 12, Mode::Numeric(v.clone())).map_err(|e| e.to_string())?;
            let bound = symbolic.bind(&v).map_err(|e| e.to_string())?;
            ensure(bound == numeric, || format!("(a) {alg} at {v:?}"))?;
        }
    }

    // (b) series residual of random rational quasi-Cartan matrices.
    for _ in 0..10 {
        let mut off = || rat(-rng.gen_range(0i64..=9), rng.gen_range(1i64..=4));
        let m = RationalMatrix::from_rows(vec![vec![rat(2, 1), off()], vec![off(), rat(2, 1)]]).unwrap();
        let a = QuasiCartanMatrix::new(m).map_err(|e| e.to_string())?;
        let sol = solve_coefficients(&a, 6, Mode::Symbolic).map_err(|e| e.to_string())?;
        let r = series_residual(&a, &sol, 5).map_err(|e| e.to_string())?;
        ensure(r.is_zero() && r.checked_order == Some(5), || format!("(b) {a}: {:?}", r.first_nonzero()))?;
    }

    // (c) polynomial product and binomial-series powers agree.
    for alg in Algebra::ALL {
        let a = alg.cartan_matrix();
        let sol = solve_coefficients(&a, 12, Mode::Symbolic).map_err(|e| e.to_string())?;
        let h: &[TruncatedSeries] = sol.all_series();
        for s in 0..a.rank() {
            let series = cleared_rhs_series(&a, h, s).map_err(|e| e.to_string())?;
            let exact = cleared_rhs_polynomial(&a, h, s)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("(c) {alg}: coupling not polynomial"))?;
            let order = series.order().unwrap_or(0);
            // The exact product is finite, so it is zero past its degree.
            let k = (0..=order).find(|&k| exact.coeff(k) != series.coeff(k));
            ensure(k.is_none(), || format!("(c) {alg} brane {} differs at z^{k:?}", s + 1))?;
        }
    }
    Ok("(a) 50 substitutions, (b) 10 random matrices, (c) all Lie cases".into())
}

fn criterion_8() -> Outcome {
    let json = r#"{
        "factor_spaces": [{"dim": 1, "eps": 1}, {"dim": 2, "eps": 1}, {"dim": 7, "eps": 1}],
        "forms": [{"name": "F4", "rank": 4, "theta": 1}],
        "eps_g": -1, "w": 1,
        "branes": [{"form": "F4", "kind": "electric", "I": [1, 2], "Q": "1"}]
    }"#;
    let model = BraneModel::from_json(json).map_err(|e| e.to_string())?;
    let profile = build_profile(&model).map_err(|e| e.to_string())?;
    let exp = |i: usize| profile.spaces[i].exponents[0].exponent.clone();
    ensure(exp(1) == rat(-2, 3) && exp(2) == rat(1, 3), || format!("exponents {} {}", exp(1), exp(2)))?;

    let a1 = QuasiCartanMatrix::from_ints(&[&[2]]).map_err(|e| e.to_string())?;
    let sol = solve_coefficients(&a1, 3, Mode::Numeric(vec![rat(1, 2)])).map_err(|e| e.to_string())?;
    let h = sol.numeric_series(None).map_err(|e| e.to_string())?;
    let origin = evaluate_profile(&profile, &h, &Rational::zero()).map_err(|e| e.to_string())?;
    ensure(
        origin.spaces.iter().all(|s| s.h_factor == 1.0) && origin.radial == 1.0,
        || format!("origin {origin:?}"),
    )?;

    // w = -1 with P = -1: H = 1 - z.
    let sol = solve_coefficients(&a1, 3, Mode::Numeric(vec![rat(-1, 1)])).map_err(|e| e.to_string())?;
    let h = sol.numeric_series(None).map_err(|e| e.to_string())?;
    ensure(
        h[0] == TruncatedSeries::from_rationals([rat(1, 1), rat(-1, 1), rat(0, 1), rat(0, 1)]),
        || format!("H = {:?}", h[0]),
    )?;
    let b = find_breakdown(&h, 2.0, 1000, 1e-12).ok_or("no breakdown found")?;
    ensure((b.z - 1.0).abs() < 1e-6, || format!("breakdown at z = {}", b.z))?;
    let s_profile = build_profile(&model.with_w(toda_brane::brane::Sign::Minus)).map_err(|e| e.to_string())?;
    ensure(evaluate_profile(&s_profile, &h, &rat(1, 1)).is_err(), || "no NonPositiveModulus at z = 1".into())?;
    Ok(format!("(-2/3, 1/3), unit at rho = 0, breakdown z = {:.9}", b.z))
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("golden C2 polynomials", criterion_1),
        ("golden G2 polynomials", criterion_2),
        ("degree formula", criterion_3),
        ("exact residual", criterion_4),
        ("numeric cross-validation", criterion_5),
        ("intersection-rule round trip", criterion_6),
        ("property suite", criterion_7),
        ("profile sanity", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
