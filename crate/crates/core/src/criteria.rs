//! Finite-mean-exit-time and non-immersibility predicates for submanifolds of
//! cylinders, horocylinders, cones and wedges.
//!
//! Each check returns a [`CriterionReport`] holding the verdict and the
//! threshold it was compared against. A `false` verdict is a result, not an error.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::moments::{theorem1_bound, BoundSpec};
use crate::table::format_number;
use crate::warping::{solve_warping, CurvatureProfile};

/// Relative slack for the non-strict comparisons, so that values equal to the
/// threshold up to rounding count as equal.
const EQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion_id: String,
    pub verdict: bool,
    /// Left-hand side of the comparison.
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub input_echo: serde_json::Value,
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn at_most(value: f64, threshold: f64) -> bool {
    value <= threshold + EQUALITY_SLACK * threshold.abs().max(1.0)
}

/// Submanifold of `N × R^ℓ` whose domain `D` projects into a ball of radius `r_D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderCase {
    pub m: usize,
    pub l: usize,
    pub profile: CurvatureProfile,
    pub r_d: f64,
    /// `sup_D |H|`.
    pub max_h: f64,
    pub eta: f64,
}

/// `sup|H| ≤ (m − ℓ − η)·(h'/h)(r_D)`; when it holds, the report carries the
/// mean-exit-time bound for `D`.
pub fn check_theorem1(case: &CylinderCase) -> Result<CriterionReport> {
    if case.m < case.l + 1 {
        return Err(Error::InvalidArgument(format!(
            "need m >= l + 1, got m = {}, l = {}",
            case.m, case.l
        )));
    }
    if !(case.r_d > 0.0) || !(case.max_h >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need r_D > 0 and max_H >= 0, got r_D = {}, max_H = {}",
            case.r_d, case.max_h
        )));
    }
    let warping = Arc::new(solve_warping(&case.profile, case.r_d, 1e-10)?);
    let coefficient = case.m as f64 - case.l as f64 - case.eta;
    let threshold = coefficient * warping.log_derivative(case.r_d)?;
    let verdict = at_most(case.max_h, threshold);

    let mut notes = Vec::new();
    if coefficient < 0.0 {
        notes.push(format!(
            "m - l - eta = {} < 0: negative threshold, the hypothesis cannot hold",
            format_number(coefficient)
        ));
    }
    if !(case.eta > 0.0) || case.eta > (case.m - case.l) as f64 {
        notes.push("eta outside (0, m - l]".into());
    }
    let bound = if verdict && case.eta > 0.0 {
        Some(theorem1_bound(&BoundSpec::new(case.m, case.l, case.eta, case.r_d, warping))?)
    } else {
        None
    };
    Ok(CriterionReport {
        criterion_id: "theorem1".into(),
        verdict,
        value: case.max_h,
        comparison: Comparison::AtMost,
        threshold,
        input_echo: serde_json::to_value(case)?,
        bound,
        notes,
    })
}

/// `sup|H| < (m − ℓ)·√b·coth(√b·r_D)` for a submanifold of a horocylinder.
///
/// Verdict only; the constant in the resulting exit-time bound is not explicit.
pub fn check_theorem2(m: usize, l: usize, b: f64, r_d: f64, max_h: f64) -> Result<CriterionReport> {
    if !(b > 0.0) {
        return Err(Error::NonPositiveB(b));
    }
    if !(r_d > 0.0) || !(max_h >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need r_D > 0 and max_H >= 0, got r_D = {r_d}, max_H = {max_h}"
        )));
    }
    let s = b.sqrt();
    let scale = (m as f64 - l as f64) * s;
    let threshold = scale / (s * r_d).tanh();
    // coth(x) > 1 for every finite x, which rounding would erase once x is large;
    // compare through tanh(√b r_D) < scale/max_H instead.
    let verdict = if scale <= 0.0 {
        false
    } else if max_h <= scale {
        true
    } else {
        s * r_d < (scale / max_h).atanh()
    };
    Ok(CriterionReport {
        criterion_id: "theorem2".into(),
        verdict,
        value: max_h,
        comparison: Comparison::Below,
        threshold,
        input_echo: json!({ "m": m, "l": l, "b": b, "r_d": r_d, "max_h": max_h }),
        bound: None,
        notes: vec!["the exit-time bound constant C(m, b, r_D, sup|H|) is not explicit; verdict only".into()],
    })
}

/// Submanifold of the wedge `{ρ_N ≤ α ρ_L}` in `N^n × L^ℓ × R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeCase {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub alpha: f64,
}

/// `γ = m − (α² + 1)ℓ − k > 0`.
pub fn check_wedge(case: &WedgeCase) -> CriterionReport {
    let gamma = case.m as f64 - (case.alpha * case.alpha + 1.0) * case.l as f64 - case.k as f64;
    CriterionReport {
        criterion_id: "wedge".into(),
        verdict: gamma > 0.0,
        value: gamma,
        comparison: Comparison::Above,
        threshold: 0.0,
        input_echo: serde_json::to_value(case).unwrap_or_default(),
        bound: None,
        notes: Vec::new(),
    }
}

/// Minimal `m`-submanifold of the Euclidean cone of aperture `θ`: `tan θ ≤ √(m − 1)`.
///
/// Compared as `θ ≤ arctan √(m − 1)`, which is what the threshold field carries.
pub fn check_cone(m: usize, theta: f64) -> Result<CriterionReport> {
    if !(theta > 0.0) || theta >= FRAC_PI_2 {
        return Err(Error::DegenerateCone(theta));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m must be >= 2, got {m}")));
    }
    let threshold = ((m - 1) as f64).sqrt().atan();
    Ok(CriterionReport {
        criterion_id: "cone".into(),
        verdict: at_most(theta, threshold),
        value: theta,
        comparison: Comparison::AtMost,
        threshold,
        input_echo: json!({ "m": m, "theta": theta }),
        bound: None,
        notes: Vec::new(),
    })
}

/// One entry of a batch file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "lowercase")]
pub enum CriterionCase {
    Theorem1(CylinderCase),
    Theorem2 { m: usize, l: usize, b: f64, r_d: f64, max_h: f64 },
    Wedge(WedgeCase),
    Cone { m: usize, theta: f64 },
}

impl CriterionCase {
    pub fn check(&self) -> Result<CriterionReport> {
        match self {
            CriterionCase::Theorem1(c) => check_theorem1(c),
            CriterionCase::Theorem2 { m, l, b, r_d, max_h } => check_theorem2(*m, *l, *b, *r_d, *max_h),
            CriterionCase::Wedge(c) => Ok(check_wedge(c)),
            CriterionCase::Cone { m, theta } => check_cone(*m, *theta),
        }
    }
}

/// Checks every case in order; fails on the first invalid case.
pub fn run_batch(cases: &[CriterionCase]) -> Result<Vec<CriterionReport>> {
    cases.iter().map(CriterionCase::check).collect()
}

/// Parses a JSON array of cases.
pub fn parse_batch(json: &str) -> Result<Vec<CriterionCase>> {
    Ok(serde_json::from_str(json)?)
}

/// `criterion_id,verdict,threshold` summary.
pub fn summary_csv(reports: &[CriterionReport]) -> String {
    let mut out = String::from("criterion_id,verdict,threshold\n");
    for r in reports {
        out.push_str(&format!("{},{},{}\n", r.criterion_id, r.verdict, format_number(r.threshold)));
    }
    out
}
