//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};
use std::sync::Arc;
use std::time::Instant;

use exitmoments::spectral::DEFAULT_BARTA_GRID;
use exitmoments::{
    barta_lower_bound, cap_eigenvalue_shooting, check_cone, check_wedge, compare_caps,
    cone_finite_met, exit_moment, mean_exit_time, moment_table, simulate_exit, solve_warping,
    theorem1_bound, tower_bound, warped_cone_condition, BoundSpec, CapSpec, CurvatureProfile,
    Error, ModelBall, SimConfig, WarpedConeSpec, WarpingFunction, WedgeCase,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn flat_ball(n: usize, r: f64) -> ModelBall {
    ModelBall::new(n, Arc::new(WarpingFunction::euclidean(r)), r).unwrap()
}

fn hyperbolic_ball(n: usize, r: f64) -> ModelBall {
    ModelBall::new(n, Arc::new(WarpingFunction::hyperbolic(1.0, r).unwrap()), r).unwrap()
}

/// The three caps whose eigenvalues are quoted as `≳ 5.85, 7.60, 9.28`.
fn quoted_caps() -> [(usize, f64, f64); 3] {
    [
        (3, 2.0f64.sqrt().atan(), 5.85),
        (4, 3.0f64.sqrt().atan(), 7.60),
        (5, 2.0f64.atan(), 9.28),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, r, expected) in quoted_caps() {
        let est = barta_lower_bound(&CapSpec::new(m, r).map_err(err)?, DEFAULT_BARTA_GRID, 1e-10).map_err(err)?;
        ok &= (est.value - expected).abs() <= 0.05;
        parts.push(format!("m={m}: {:.4} (want {expected})", est.value));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let at_pi_3 = barta_lower_bound(&CapSpec::new(3, FRAC_PI_3).map_err(err)?, DEFAULT_BARTA_GRID, 1e-10)
        .map_err(err)?;
    parts.push(format!("{elapsed:.2}s; info: m=3 at r=pi/3 gives {:.4}", at_pi_3.value));
    check(ok && elapsed < 5.0, parts.join(", "))
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, r, _) in quoted_caps() {
        let est = barta_lower_bound(&CapSpec::new(m, r).map_err(err)?, DEFAULT_BARTA_GRID, 1e-10).map_err(err)?;
        let finite = cone_finite_met(est.value, m);
        ok &= !finite && est.value <= 2.0 * m as f64;
        parts.push(format!("{:.2} > {}? {finite}", est.value, 2 * m));
    }
    check(ok, parts.join(", "))
}

fn criterion_3() -> Outcome {
    let est = cap_eigenvalue_shooting(&CapSpec::new(2, FRAC_PI_4).map_err(err)?, 1e-10).map_err(err)?;
    check((est.value - 4.0).abs() <= 1e-6, format!("lambda = {:.10}", est.value))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut caps = Vec::new();
    for m in 2..=6 {
        for r in [FRAC_PI_8, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            caps.push(CapSpec::new(m, r).map_err(err)?);
        }
    }
    let results = compare_caps(&caps, 1e-9).map_err(err)?;
    let worst = results
        .iter()
        .map(|c| c.barta.value - c.shooting.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    check(
        results.len() == 20 && worst <= 1e-6 && elapsed < 30.0,
        format!("20 caps, max(barta - shooting) = {worst:.3e}, {elapsed:.2}s"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 5] {
        for r in [0.5, 1.0, 2.0] {
            let ball = flat_ball(n, r);
            for i in 0..10 {
                // includes off-grid points
                let t = r * (i as f64 * 0.0973);
                let exact = (r * r - t * t) / (2.0 * n as f64);
                let got = mean_exit_time(&ball, t).map_err(err)?;
                worst = worst.max(((got - exact) / exact).abs());
            }
        }
    }
    check(worst <= 1e-8, format!("max relative error {worst:.3e} over 90 points"))
}

fn criterion_6() -> Outcome {
    let got = mean_exit_time(&hyperbolic_ball(2, 1.0), 0.0).map_err(err)?;
    let exact = 2.0 * 0.5f64.cosh().ln();
    check((got - exact).abs() <= 1e-6, format!("{got:.10} vs {exact:.10}"))
}

/// `u^1` and `u^2` for the flat disc by plain nested trapezoid sums on a fine grid.
fn trapezoid_second_moment(cells: usize) -> f64 {
    let dt = 1.0 / cells as f64;
    let t: Vec<f64> = (0..=cells).map(|i| i as f64 * dt).collect();
    let next = |prev: &[f64], k: f64| -> Vec<f64> {
        let mut inner = vec![0.0; cells + 1];
        for i in 1..=cells {
            inner[i] = inner[i - 1] + 0.5 * dt * (t[i - 1] * prev[i - 1] + t[i] * prev[i]);
        }
        let ratio: Vec<f64> = (0..=cells).map(|i| if i == 0 { 0.0 } else { inner[i] / t[i] }).collect();
        let mut out = vec![0.0; cells + 1];
        for i in (0..cells).rev() {
            out[i] = out[i + 1] + 0.5 * dt * (ratio[i] + ratio[i + 1]);
        }
        out.iter().map(|v| k * v).collect()
    };
    let u1 = next(&vec![1.0; cells + 1], 1.0);
    let u2 = next(&u1, 2.0);
    u2[0]
}

fn criterion_7() -> Outcome {
    let oracle = trapezoid_second_moment(20_000);
    let got = exit_moment(&flat_ball(2, 1.0), 2, 0.0).map_err(err)?;
    check(
        (got - oracle).abs() <= 1e-6 && (got - 3.0 / 32.0).abs() <= 1e-6,
        format!("quadrature {got:.10}, trapezoid oracle {oracle:.10}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let profile = match rng.random_range(0..3) {
            0 => CurvatureProfile::Constant { b: rng.random_range(0.0..2.0) },
            1 => CurvatureProfile::Polynomial {
                coefficients: vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
            },
            _ => CurvatureProfile::Tabulated {
                knots: vec![(0.0, rng.random_range(0.0..1.0)), (1.0, 0.5), (2.0, rng.random_range(0.0..2.0))],
            },
        };
        let n = rng.random_range(2..=5);
        let r = rng.random_range(0.3..1.5);
        let k = rng.random_range(1..=4usize);
        let warping = Arc::new(solve_warping(&profile, r, 1e-10).map_err(err)?);
        let ball = ModelBall::new(n, warping.clone(), r).map_err(err)?;
        let table = moment_table(&ball, k).map_err(err)?;
        let bound = tower_bound(&BoundSpec::new(n, 0, n as f64, r, warping), k as i64).map_err(err)?;
        for u in table.moment(k) {
            worst = worst.max(u - bound);
        }
    }
    check(worst <= 1e-9, format!("50 instances, max(u^k - k! E^k) = {worst:.3e}"))
}

fn poisson_residual(ball: &ModelBall, k_max: usize) -> Result<f64, String> {
    let table = moment_table(ball, k_max).map_err(err)?;
    let w = ball.warping();
    let len = table.t.len();
    let step = table.t[1] - table.t[0];
    let n1 = (ball.n() - 1) as f64;
    let (lo, hi) = (len / 20, len - len / 20);
    let mut worst: f64 = 0.0;
    for k in 1..=k_max {
        let u = table.moment(k);
        let prev = table.moment(k - 1);
        for i in lo.max(1)..hi.min(len - 1) {
            let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (step * step);
            let d1 = (u[i + 1] - u[i - 1]) / (2.0 * step);
            let res = d2 + n1 * w.log_derivative(table.t[i]).map_err(err)? * d1 + k as f64 * prev[i];
            worst = worst.max(res.abs());
        }
    }
    Ok(worst)
}

fn criterion_9() -> Outcome {
    let flat = poisson_residual(&flat_ball(3, 1.0).with_cells(4096), 3)?;
    let hyp = poisson_residual(&hyperbolic_ball(2, 1.0).with_cells(4096), 3)?;
    check(flat <= 1e-3 && hyp <= 1e-3, format!("sup residual flat {flat:.3e}, hyperbolic {hyp:.3e}"))
}

fn criterion_10() -> Outcome {
    let config = SimConfig::new(flat_ball(2, 1.0), 0.0, 100_000, 1e-4, 20_240_601);
    let start = Instant::now();
    let first = simulate_exit(&config).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let second = simulate_exit(&config).map_err(err)?;
    let serial = simulate_exit(&config.clone().with_threads(1)).map_err(err)?;
    let parallel = simulate_exit(&config.clone().with_threads(4)).map_err(err)?;
    let m1 = first.moment_estimates[1];
    let m2 = first.moment_estimates[2];
    let mean_ok = (m1.mean - 0.25).abs() <= 3.0 * m1.standard_error;
    let second_ok = (m2.mean - 3.0 / 32.0).abs() <= 3.0 * m2.standard_error;
    let deterministic = first.same_estimates(&second) && serial.same_estimates(&parallel) && first.same_estimates(&serial);
    check(
        mean_ok && second_ok && deterministic && elapsed < 60.0,
        format!(
            "mean {:.5} (se {:.1e}), second {:.5} (se {:.1e}), bit-identical {deterministic}, {elapsed:.2}s",
            m1.mean, m1.standard_error, m2.mean, m2.standard_error
        ),
    )
}

fn criterion_11() -> Outcome {
    let (l, k) = (2usize, 1.0);
    let target = 1.0 / (2.0 * l as f64 * k * k);
    let mut parts = Vec::new();
    let mut ok = true;
    for alpha in [0.0, 1.0, 5.0] {
        let v = warped_cone_condition(&WarpedConeSpec::linear(l, alpha, k, 4.5, 1.0, 1e3)).map_err(err)?;
        let rel = (v.inf_f - target).abs() / target;
        ok &= rel <= 0.02 && v.satisfiable;
        parts.push(format!("alpha={alpha}: inf F {:.5}", v.inf_f));
        match warped_cone_condition(&WarpedConeSpec::linear(l, alpha, k, 3.5, 1.0, 1e3)) {
            Ok(v) => ok &= !v.satisfiable,
            Err(Error::HorizonTooSmall { .. }) => ok = false,
            Err(e) => return Err(e.to_string()),
        }
    }
    parts.push("verdict false at lambda 3.5, true at 4.5".into());
    check(ok, parts.join(", "))
}

fn criterion_12() -> Outcome {
    let wedge = check_wedge(&WedgeCase { m: 2, n: 1, l: 1, k: 1, alpha: 1.0 });
    let cone2 = check_cone(2, FRAC_PI_4).map_err(err)?;
    let cone3 = check_cone(3, 2.0f64.sqrt().atan()).map_err(err)?;
    let degenerate = matches!(check_cone(2, FRAC_PI_2), Err(Error::DegenerateCone(_)));
    check(
        !wedge.verdict && cone2.verdict && cone3.verdict && degenerate,
        format!(
            "wedge gamma {} -> {}, cone(2, pi/4) {}, cone(3, atan sqrt2) {}",
            wedge.value, wedge.verdict, cone2.verdict, cone3.verdict
        ),
    )
}

/// `theorem1_bound` with `η = n` reproduces the model mean exit time exactly.
fn tightness() -> Outcome {
    let w = Arc::new(WarpingFunction::hyperbolic(1.0, 1.0).map_err(err)?);
    let bound = theorem1_bound(&BoundSpec::new(2, 0, 2.0, 1.0, w.clone())).map_err(err)?;
    let met = mean_exit_time(&ModelBall::new(2, w, 1.0).map_err(err)?, 0.0).map_err(err)?;
    check(bound == met, format!("bound {bound:.12} = mean exit time {met:.12}"))
}

fn main() {
    let criteria: [(&str, Check); 13] = [
        ("1 Barta bounds on the three caps", criterion_1),
        ("2 cone finiteness verdicts", criterion_2),
        ("3 shooting eigenvalue m=2 r=pi/4", criterion_3),
        ("4 Barta <= shooting on 20 caps", criterion_4),
        ("5 flat mean exit time", criterion_5),
        ("6 hyperbolic mean exit time", criterion_6),
        ("7 second moment vs trapezoid oracle", criterion_7),
        ("8 tower bound on random balls", criterion_8),
        ("9 Poisson hierarchy residual", criterion_9),
        ("10 Monte Carlo cross-check", criterion_10),
        ("11 warped cone linear example", criterion_11),
        ("12 wedge and cone predicates", criterion_12),
        ("extra: bound tightness at eta = n", tightness),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
