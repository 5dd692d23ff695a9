//! Self-check suite: reproduces the reference numbers and cross-checks the
//! quadrature against Monte Carlo.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::criteria::{check_cone, check_wedge, WedgeCase};
use crate::error::Result;
use crate::mc::{simulate_exit, SimConfig};
use crate::moments::{exit_moment, mean_exit_time, ModelBall};
use crate::spectral::{
    barta_lower_bound, cap_eigenvalue_shooting, warped_cone_condition, CapSpec, WarpedConeSpec,
    DEFAULT_BARTA_GRID,
};
use crate::table::format_number;
use crate::warping::WarpingFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerifyCheck {
    fn new(name: impl Into<String>, expected: f64, got: f64, tolerance: f64) -> Self {
        VerifyCheck {
            name: name.into(),
            expected,
            got,
            tolerance,
            passed: (got - expected).abs() <= tolerance,
        }
    }

    fn flag(name: impl Into<String>, expected: bool, got: bool) -> Self {
        let as_num = |b: bool| if b { 1.0 } else { 0.0 };
        VerifyCheck { name: name.into(), expected: as_num(expected), got: as_num(got), tolerance: 0.0, passed: expected == got }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub mc_paths: usize,
    pub mc_dt: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mc_paths: 100_000, mc_dt: 1e-4, seed: 1 }
    }
}

/// Runs every check; numerical errors abort the suite.
pub fn run_verification(options: &VerifyOptions) -> Result<Vec<VerifyCheck>> {
    let mut out = Vec::new();

    for (m, r, label, expected) in [
        (3, 2.0f64.sqrt().atan(), "atan sqrt2", 5.85),
        (4, 3.0f64.sqrt().atan(), "atan sqrt3", 7.60),
        (5, 2.0f64.atan(), "atan 2", 9.28),
    ] {
        let est = barta_lower_bound(&CapSpec::new(m, r)?, DEFAULT_BARTA_GRID, 1e-10)?;
        out.push(VerifyCheck::new(format!("barta m={m} r={label}"), expected, est.value, 0.05));
        out.push(VerifyCheck::flag(format!("barta m={m} below 2m"), true, est.value <= 2.0 * m as f64));
    }
    let shooting = cap_eigenvalue_shooting(&CapSpec::new(2, FRAC_PI_4)?, 1e-10)?;
    out.push(VerifyCheck::new("shooting m=2 r=pi/4", 4.0, shooting.value, 1e-6));

    let flat = ModelBall::new(2, Arc::new(WarpingFunction::euclidean(1.0)), 1.0)?;
    let hyperbolic = ModelBall::new(2, Arc::new(WarpingFunction::hyperbolic(1.0, 1.0)?), 1.0)?;
    out.push(VerifyCheck::new("mean exit time flat n=2 r=1", 0.25, mean_exit_time(&flat, 0.0)?, 1e-8));
    out.push(VerifyCheck::new(
        "mean exit time hyperbolic n=2 r=1",
        2.0 * 0.5f64.cosh().ln(),
        mean_exit_time(&hyperbolic, 0.0)?,
        1e-6,
    ));
    out.push(VerifyCheck::new("second moment flat n=2 r=1", 3.0 / 32.0, exit_moment(&flat, 2, 0.0)?, 1e-6));

    for alpha in [0.0, 1.0, 5.0] {
        let v = warped_cone_condition(&WarpedConeSpec::linear(2, alpha, 1.0, 4.5, 1.0, 1e3))?;
        out.push(VerifyCheck::new(format!("warped cone inf F alpha={alpha}"), 0.25, v.inf_f, 0.005));
    }
    out.push(VerifyCheck::flag(
        "wedge m=2 l=1 k=1 alpha=1",
        false,
        check_wedge(&WedgeCase { m: 2, n: 1, l: 1, k: 1, alpha: 1.0 }).verdict,
    ));
    out.push(VerifyCheck::flag("cone m=2 pi/4", true, check_cone(2, FRAC_PI_4)?.verdict));
    out.push(VerifyCheck::flag("cone m=3 atan sqrt2", true, check_cone(3, 2.0f64.sqrt().atan())?.verdict));

    for (name, ball, k_max) in [("flat", &flat, 2usize), ("hyperbolic", &hyperbolic, 2)] {
        let config = SimConfig::new(ball.clone(), 0.0, options.mc_paths, options.mc_dt, options.seed).with_max_k(k_max);
        let sim = simulate_exit(&config)?;
        for k in 1..=k_max {
            let est = sim.moment_estimates[k];
            let reference = exit_moment(ball, k as i64, 0.0)?;
            out.push(VerifyCheck::new(
                format!("monte carlo {name} k={k} (3 se)"),
                reference,
                est.mean,
                3.0 * est.standard_error,
            ));
        }
    }
    Ok(out)
}

/// `check,expected,got,tolerance,status` table.
pub fn render_checks(checks: &[VerifyCheck]) -> String {
    let mut s = String::from("check,expected,got,tolerance,status\n");
    for c in checks {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            c.name,
            format_number(c.expected),
            format_number(c.got),
            format_number(c.tolerance),
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = run_verification(&VerifyOptions { mc_paths: 4000, ..Default::default() }).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(render_checks(&checks).lines().count() == checks.len() + 1);
    }
}
