//! Warping functions of rotationally symmetric model manifolds.
//!
//! A radial curvature bound `G ≥ 0` determines the warping `h` through the
//! Cauchy problem `h'' = G h`, `h(0) = 0`, `h'(0) = 1`. The model manifold with
//! metric `dt² + h²(t) dθ²` has radial sectional curvature `-G`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_range, Error, Result};
use crate::quadrature::hermite_interpolate;
use crate::table::CsvTable;

/// Default number of grid cells on `[0, t_max]`.
pub const DEFAULT_CELLS: usize = 4096;
const MAX_CELLS: usize = 1 << 22;

/// Radial curvature bound `G(t) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum CurvatureProfile {
    /// `G ≡ b`.
    Constant { b: f64 },
    /// `G(t) = Σ c_i t^i`.
    Polynomial { coefficients: Vec<f64> },
    /// Piecewise linear through `(t, G(t))` knots.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl CurvatureProfile {
    pub fn flat() -> Self {
        CurvatureProfile::Constant { b: 0.0 }
    }

    pub fn hyperbolic(b: f64) -> Self {
        CurvatureProfile::Constant { b }
    }

    /// Raw value of `G(t)`; callers validate the sign.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            CurvatureProfile::Constant { b } => *b,
            CurvatureProfile::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            CurvatureProfile::Tabulated { knots } => tabulated_value(knots, t),
        }
    }

    /// `G'(t)`; for tabulated profiles the slope of the containing segment.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            CurvatureProfile::Constant { .. } => 0.0,
            CurvatureProfile::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + i as f64 * c),
            CurvatureProfile::Tabulated { knots } => {
                if knots.len() < 2 {
                    return 0.0;
                }
                let j = segment_index(knots, t);
                let (t0, g0) = knots[j];
                let (t1, g1) = knots[j + 1];
                (g1 - g0) / (t1 - t0)
            }
        }
    }

    /// Checks structural invariants and coverage of `[0, t_max]`.
    pub fn validate(&self, t_max: f64) -> Result<()> {
        match self {
            CurvatureProfile::Constant { b } => {
                if !b.is_finite() || *b < 0.0 {
                    return Err(Error::InvalidProfile(format!("constant curvature bound {b} < 0")));
                }
            }
            CurvatureProfile::Polynomial { coefficients } => {
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidProfile("polynomial needs finite coefficients".into()));
                }
            }
            CurvatureProfile::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidProfile("tabulated profile needs at least two knots".into()));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::InvalidProfile(format!(
                            "knots not strictly increasing at t = {}",
                            w[1].0
                        )));
                    }
                }
                if let Some(&(t, g)) = knots.iter().find(|(_, g)| !(*g >= 0.0)) {
                    return Err(Error::InvalidProfile(format!("G({t}) = {g} < 0")));
                }
                let (first, last) = (knots[0].0, knots[knots.len() - 1].0);
                if first > 0.0 || last < t_max {
                    return Err(Error::InvalidProfile(format!(
                        "knots cover [{first}, {last}], need [0, {t_max}]"
                    )));
                }
            }
        }
        Ok(())
    }

    fn checked_value(&self, t: f64) -> Result<f64> {
        let g = self.value(t);
        if g >= 0.0 {
            Ok(g)
        } else {
            Err(Error::InvalidProfile(format!("G({t}) = {g} < 0")))
        }
    }
}

fn segment_index(knots: &[(f64, f64)], t: f64) -> usize {
    let idx = knots.partition_point(|(tk, _)| *tk <= t);
    idx.saturating_sub(1).min(knots.len() - 2)
}

fn tabulated_value(knots: &[(f64, f64)], t: f64) -> f64 {
    if knots.len() == 1 {
        return knots[0].1;
    }
    let j = segment_index(knots, t);
    let (t0, g0) = knots[j];
    let (t1, g1) = knots[j + 1];
    g0 + (g1 - g0) * (t - t0) / (t1 - t0)
}

/// Accepts `constant:B`, `polynomial:c0,c1,...` and `tabulated:t0:g0,t1:g1,...`.
impl FromStr for CurvatureProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let num = |x: &str| -> Result<f64> {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {x:?} in profile {s:?}")))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "flat" | "euclidean" => Ok(CurvatureProfile::flat()),
            "constant" => Ok(CurvatureProfile::Constant { b: num(rest)? }),
            "polynomial" => Ok(CurvatureProfile::Polynomial {
                coefficients: rest.split(',').map(num).collect::<Result<_>>()?,
            }),
            "tabulated" => {
                let knots = rest
                    .split(',')
                    .map(|pair| {
                        let (t, g) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::Parse(format!("knot {pair:?} is not t:G")))?;
                        Ok((num(t)?, num(g)?))
                    })
                    .collect::<Result<_>>()?;
                Ok(CurvatureProfile::Tabulated { knots })
            }
            other => Err(Error::Parse(format!("unknown profile kind {other:?}"))),
        }
    }
}

/// Warping functions known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClosedForm {
    /// `h(t) = t`.
    Euclidean,
    /// `h(t) = sinh(√b t)/√b`.
    Hyperbolic { b: f64 },
}

impl ClosedForm {
    fn h(&self, t: f64) -> f64 {
        match *self {
            ClosedForm::Euclidean => t,
            ClosedForm::Hyperbolic { b } => {
                let s = b.sqrt();
                (s * t).sinh() / s
            }
        }
    }

    fn h_prime(&self, t: f64) -> f64 {
        match *self {
            ClosedForm::Euclidean => 1.0,
            ClosedForm::Hyperbolic { b } => (b.sqrt() * t).cosh(),
        }
    }
}

/// Grid solution of `h'' = G h`, `h(0) = 0`, `h'(0) = 1` on `[0, t_max]`.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct WarpingFunction {
    profile: CurvatureProfile,
    t_max: f64,
    step: f64,
    h: Vec<f64>,
    h_prime: Vec<f64>,
    curvature: Vec<f64>,
    closed_form: Option<ClosedForm>,
}

impl WarpingFunction {
    pub fn euclidean(t_max: f64) -> Self {
        solve_warping(&CurvatureProfile::flat(), t_max, 1e-10).expect("flat warping is always solvable")
    }

    pub fn hyperbolic(b: f64, t_max: f64) -> Result<Self> {
        solve_warping(&CurvatureProfile::hyperbolic(b), t_max, 1e-10)
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.h.len();
        (0..n).map(move |i| self.node(i))
    }

    pub fn h_values(&self) -> &[f64] {
        &self.h
    }

    pub fn h_prime_values(&self) -> &[f64] {
        &self.h_prime
    }

    fn node(&self, i: usize) -> f64 {
        if i + 1 == self.h.len() {
            self.t_max
        } else {
            i as f64 * self.step
        }
    }

    /// Below this radius `h'/h` is evaluated from its series at the origin.
    pub fn series_cutoff(&self) -> f64 {
        (10.0 * self.step).max(1e-3)
    }

    /// `G(0)`, which equals `h'''(0)`.
    pub fn curvature_at_origin(&self) -> f64 {
        self.profile.value(0.0)
    }

    pub fn eval_h(&self, t: f64) -> Result<f64> {
        ensure_range(t, 0.0, self.t_max)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(match self.closed_form {
            Some(cf) => cf.h(t),
            None => hermite_interpolate(0.0, self.step, &self.h, &self.h_prime, t),
        })
    }

    pub fn eval_h_prime(&self, t: f64) -> Result<f64> {
        ensure_range(t, 0.0, self.t_max)?;
        Ok(match self.closed_form {
            Some(cf) => cf.h_prime(t),
            None => self.interpolate_h_prime(t),
        })
    }

    fn interpolate_h_prime(&self, t: f64) -> f64 {
        // derivative data for h' is h'' = G h
        let n = self.h.len();
        let pos = t / self.step;
        let i = (pos.floor().max(0.0) as usize).min(n - 2);
        let lo = [self.h_prime[i], self.h_prime[i + 1]];
        let d = [self.curvature[i] * self.h[i], self.curvature[i + 1] * self.h[i + 1]];
        hermite_interpolate(i as f64 * self.step, self.step, &lo, &d, t)
    }

    /// `h'(t)/h(t)` for `t > 0`.
    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::SingularAtZero);
        }
        ensure_range(t, 0.0, self.t_max)?;
        if t < self.series_cutoff() {
            return Ok(self.log_derivative_series(t));
        }
        self.log_derivative_direct(t)
    }

    /// `1/t + G(0) t/3 + G'(0) t²/4`, accurate to `O(t³)`.
    pub fn log_derivative_series(&self, t: f64) -> f64 {
        let g0 = self.profile.value(0.0);
        let g1 = self.profile.derivative(0.0);
        1.0 / t + g0 * t / 3.0 + g1 * t * t / 4.0
    }

    /// The quotient `h'/h` without the small-`t` expansion.
    pub fn log_derivative_direct(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::SingularAtZero);
        }
        if let Some(ClosedForm::Hyperbolic { b }) = self.closed_form {
            let s = b.sqrt();
            ensure_range(t, 0.0, self.t_max)?;
            return Ok(s / (s * t).tanh());
        }
        Ok(self.eval_h_prime(t)? / self.eval_h(t)?)
    }

    /// Grid export with columns `t,h,h_prime`.
    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(["t", "h", "h_prime"]);
        for i in 0..self.h.len() {
            table.push(vec![self.node(i), self.h[i], self.h_prime[i]]);
        }
        table
    }
}

/// Solves the warping Cauchy problem on `[0, t_max]`.
///
/// Constant profiles are evaluated in closed form; everything else goes
/// through [`integrate_warping`].
pub fn solve_warping(profile: &CurvatureProfile, t_max: f64, tol: f64) -> Result<WarpingFunction> {
    check_inputs(profile, t_max, tol)?;
    let closed_form = match *profile {
        CurvatureProfile::Constant { b: 0.0 } => Some(ClosedForm::Euclidean),
        CurvatureProfile::Constant { b } => Some(ClosedForm::Hyperbolic { b }),
        _ => None,
    };
    match closed_form {
        Some(cf) => {
            let cells = DEFAULT_CELLS;
            let step = t_max / cells as f64;
            let mut h = Vec::with_capacity(cells + 1);
            let mut h_prime = Vec::with_capacity(cells + 1);
            for i in 0..=cells {
                let t = if i == cells { t_max } else { i as f64 * step };
                h.push(cf.h(t));
                h_prime.push(cf.h_prime(t));
            }
            let b = profile.value(0.0);
            Ok(WarpingFunction {
                profile: profile.clone(),
                t_max,
                step,
                h,
                h_prime,
                curvature: vec![b; cells + 1],
                closed_form: Some(cf),
            })
        }
        None => integrate_warping(profile, t_max, tol),
    }
}

fn check_inputs(profile: &CurvatureProfile, t_max: f64, tol: f64) -> Result<()> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    profile.validate(t_max)
}

/// Classical RK4 integration of `h'' = G h` regardless of the profile kind.
///
/// The first node comes from the Taylor expansion
/// `h ≈ t + G(0) t³/6 + G'(0) t⁴/12`. The grid is refined by doubling until
/// the step-doubling estimate of every local error, relative to `max(1, |h|)`,
/// is at most `tol`.
pub fn integrate_warping(profile: &CurvatureProfile, t_max: f64, tol: f64) -> Result<WarpingFunction> {
    check_inputs(profile, t_max, tol)?;
    let mut cells = DEFAULT_CELLS;
    loop {
        let (h, h_prime, curvature, max_err) = rk4_grid(profile, t_max, cells)?;
        if max_err <= tol {
            return Ok(WarpingFunction {
                profile: profile.clone(),
                t_max,
                step: t_max / cells as f64,
                h,
                h_prime,
                curvature,
                closed_form: None,
            });
        }
        if cells >= MAX_CELLS {
            return Err(Error::ToleranceUnreachable { tol, max_steps: cells });
        }
        cells *= 2;
    }
}

type Grid = (Vec<f64>, Vec<f64>, Vec<f64>, f64);

fn rk4_grid(profile: &CurvatureProfile, t_max: f64, cells: usize) -> Result<Grid> {
    let step = t_max / cells as f64;
    let mut h = Vec::with_capacity(cells + 1);
    let mut hp = Vec::with_capacity(cells + 1);
    let mut curvature = Vec::with_capacity(cells + 1);

    let g0 = profile.checked_value(0.0)?;
    let g1 = profile.derivative(0.0);
    h.push(0.0);
    hp.push(1.0);
    curvature.push(g0);

    let t1 = step;
    h.push(t1 + g0 * t1.powi(3) / 6.0 + g1 * t1.powi(4) / 12.0);
    hp.push(1.0 + g0 * t1 * t1 / 2.0 + g1 * t1.powi(3) / 3.0);
    curvature.push(profile.checked_value(t1)?);

    let mut max_err: f64 = 0.0;
    for i in 1..cells {
        let t = i as f64 * step;
        let y = (h[i], hp[i]);
        let full = rk4_step(profile, t, y, step)?;
        let half = rk4_step(profile, t, y, 0.5 * step)?;
        let twice = rk4_step(profile, t + 0.5 * step, half, 0.5 * step)?;
        let scale = twice.0.abs().max(1.0);
        let err = ((twice.0 - full.0).abs().max((twice.1 - full.1).abs()) * 16.0 / 15.0) / scale;
        max_err = max_err.max(err);
        let t_next = if i + 1 == cells { t_max } else { (i + 1) as f64 * step };
        if !(full.0 > 0.0) {
            return Err(Error::NonPositiveH { t: t_next, h: full.0 });
        }
        h.push(full.0);
        hp.push(full.1);
        curvature.push(profile.checked_value(t_next)?);
    }
    Ok((h, hp, curvature, max_err))
}

fn rk4_step(profile: &CurvatureProfile, t: f64, (y, v): (f64, f64), dt: f64) -> Result<(f64, f64)> {
    let ga = profile.checked_value(t)?;
    let gm = profile.checked_value(t + 0.5 * dt)?;
    let gb = profile.checked_value(t + dt)?;
    let k1 = (v, ga * y);
    let k2 = (v + 0.5 * dt * k1.1, gm * (y + 0.5 * dt * k1.0));
    let k3 = (v + 0.5 * dt * k2.1, gm * (y + 0.5 * dt * k2.0));
    let k4 = (v + dt * k3.1, gb * (y + dt * k3.0));
    Ok((
        y + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        v + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_profile_is_linear() {
        let w = solve_warping(&CurvatureProfile::flat(), 2.0, 1e-10).unwrap();
        assert_eq!(w.closed_form(), Some(ClosedForm::Euclidean));
        assert_eq!(w.eval_h(1.5).unwrap(), 1.5);
        assert_eq!(w.eval_h(0.0).unwrap(), 0.0);
        assert_eq!(w.eval_h_prime(2.0).unwrap(), 1.0);
        assert_eq!(w.log_derivative(2.0).unwrap(), 0.5);
    }

    #[test]
    fn euclidean_h_prime_far_out() {
        let w = WarpingFunction::euclidean(8.0);
        assert_eq!(w.eval_h_prime(7.0).unwrap(), 1.0);
    }

    #[test]
    fn hyperbolic_values() {
        let w = solve_warping(&CurvatureProfile::hyperbolic(1.0), 2.0, 1e-10).unwrap();
        assert_relative_eq!(w.eval_h(1.0).unwrap(), 1.175201, epsilon = 1e-6);
        assert_relative_eq!(w.eval_h(0.5).unwrap(), 0.521095, epsilon = 1e-6);
        assert_relative_eq!(w.log_derivative(1.0).unwrap(), 1.313035, epsilon = 1e-6);
        let w4 = solve_warping(&CurvatureProfile::hyperbolic(4.0), 1.0, 1e-10).unwrap();
        let expected = 2.0 / 2.0f64.tanh();
        assert_relative_eq!(w4.log_derivative(1.0).unwrap(), expected, max_relative = 1e-12);
        assert!((w4.log_derivative(1.0).unwrap() - 2.074).abs() < 1e-3);
    }

    #[test]
    fn rk4_matches_sinh() {
        let tol = 1e-10;
        let w = integrate_warping(&CurvatureProfile::hyperbolic(1.0), 2.0, tol).unwrap();
        assert!(w.closed_form().is_none());
        for (t, h) in w.grid().zip(w.h_values()) {
            assert!((h - t.sinh()).abs() <= tol, "t={t} h={h}");
        }
        assert_relative_eq!(w.eval_h(1.0).unwrap(), 1.0f64.sinh(), epsilon = 1e-9);
        assert_relative_eq!(w.eval_h_prime(1.3).unwrap(), 1.3f64.cosh(), epsilon = 1e-9);
    }

    #[test]
    fn series_near_origin() {
        let w = solve_warping(&CurvatureProfile::hyperbolic(1.0), 2.0, 1e-10).unwrap();
        let v = w.log_derivative(1e-6).unwrap();
        assert!((v * 1e-6 - 1.0).abs() < 1e-3);
        let ts = w.series_cutoff();
        let series = w.log_derivative_series(ts);
        let direct = w.log_derivative_direct(ts).unwrap();
        assert!(((series - direct) / direct).abs() < 1e-8);
    }

    #[test]
    fn errors() {
        let w = WarpingFunction::euclidean(1.0);
        assert_eq!(w.log_derivative(0.0), Err(Error::SingularAtZero));
        assert!(matches!(w.eval_h(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(w.eval_h(-0.1), Err(Error::OutOfRange { .. })));
        let neg = CurvatureProfile::Polynomial { coefficients: vec![1.0, -2.0] };
        assert!(matches!(solve_warping(&neg, 2.0, 1e-8), Err(Error::InvalidProfile(_))));
        let bad = CurvatureProfile::Tabulated { knots: vec![(0.0, 1.0), (0.0, 2.0)] };
        assert!(matches!(solve_warping(&bad, 1.0, 1e-8), Err(Error::InvalidProfile(_))));
        let short = CurvatureProfile::Tabulated { knots: vec![(0.0, 1.0), (0.5, 2.0)] };
        assert!(matches!(solve_warping(&short, 1.0, 1e-8), Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn profile_parsing_and_json() {
        let p: CurvatureProfile = "constant:0".parse().unwrap();
        assert_eq!(p, CurvatureProfile::flat());
        let p: CurvatureProfile = "polynomial:1,0,2".parse().unwrap();
        assert_eq!(p.value(2.0), 9.0);
        assert_eq!(p.derivative(2.0), 8.0);
        let p: CurvatureProfile = "tabulated:0:0,1:2".parse().unwrap();
        assert_eq!(p.value(0.25), 0.5);
        let json = r#"{"variant":"tabulated","knots":[[0,1],[2,3]]}"#;
        let q: CurvatureProfile = serde_json::from_str(json).unwrap();
        assert_eq!(q.value(1.0), 2.0);
        let j: CurvatureProfile = serde_json::from_str(r#"{"variant":"constant","b":1}"#).unwrap();
        assert_eq!(j, CurvatureProfile::hyperbolic(1.0));
    }

    #[test]
    fn csv_export() {
        let w = WarpingFunction::euclidean(1.0);
        let csv = w.to_csv().render();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,h,h_prime"));
        assert_eq!(lines.next(), Some("0,0,1"));
        assert_eq!(csv.lines().count(), DEFAULT_CELLS + 2);
    }
}
