//! First Dirichlet eigenvalues of geodesic caps in round spheres and the
//! eigenvalue conditions for finite mean exit time of cones.
//!
//! Two independent routes are provided for caps `B_r ⊂ S^{m-1}`:
//!
//! * [`barta_lower_bound`]: for a positive trial function `u` vanishing at `r`,
//!   `λ₁(B_r) ≥ inf_t u(t) / D(t)` with
//!   `D(t) = ∫_t^r ∫_0^τ sin^{m-2}(s) u(s) / sin^{m-2}(τ) ds dτ`;
//! * [`cap_eigenvalue_shooting`]: bisection on `λ` for the radial problem
//!   `φ'' + (m-2) cot(t) φ' + λ φ = 0`, `φ(0) = 1`, `φ'(0) = 0`, `φ(r) = 0`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{cumulative_hermite, hermite_interpolate, tail_hermite, RadialGrid};
use crate::table::CsvTable;

/// Default number of cells for the Barta quotient grid.
pub const DEFAULT_BARTA_GRID: usize = 4096;
const SHOOTING_CELLS: usize = 4096;
const MAX_WIDENINGS: usize = 60;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Geodesic ball of polar radius `r` about the north pole of `S^{m-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub m: usize,
    pub r: f64,
}

impl CapSpec {
    pub fn new(m: usize, r: f64) -> Result<Self> {
        let cap = CapSpec { m, r };
        cap.validate()?;
        Ok(cap)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidArgument(format!("cap parameter m must be >= 2, got {}", self.m)));
        }
        if !(self.r > 0.0) || self.r > FRAC_PI_2 + 1e-12 {
            return Err(Error::DegenerateCap(self.r));
        }
        Ok(())
    }

    fn weight_power(&self) -> f64 {
        (self.m - 2) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    LowerBound,
    Shooting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub kind: EigenKind,
    pub value: f64,
    pub achieved_at: Option<f64>,
    pub tolerance: f64,
}

/// Positive trial function on `[0, r)` for the Barta quotient.
pub trait TrialFunction: Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// `u(t) = cos(tπ/2r)`.
#[derive(Debug, Clone, Copy)]
pub struct CosineTrial {
    pub r: f64,
}

impl TrialFunction for CosineTrial {
    fn value(&self, t: f64) -> f64 {
        (t * FRAC_PI_2 / self.r).cos()
    }

    fn derivative(&self, t: f64) -> f64 {
        -FRAC_PI_2 / self.r * (t * FRAC_PI_2 / self.r).sin()
    }
}

/// The quotient `q(t) = u(t)/D(t)` sampled on the grid.
#[derive(Debug, Clone)]
pub struct BartaProfile {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
}

impl BartaProfile {
    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(["t", "q"]);
        for (&t, &q) in self.t.iter().zip(&self.q) {
            table.push(vec![t, q]);
        }
        table
    }
}

/// Barta lower bound for `λ₁(B_r)` with the cosine trial function.
pub fn barta_lower_bound(cap: &CapSpec, grid_size: usize, refine_tol: f64) -> Result<EigenEstimate> {
    barta_with_trial(cap, &CosineTrial { r: cap.r }, grid_size, refine_tol).map(|(e, _)| e)
}

/// Barta lower bound for an arbitrary trial function, together with the
/// sampled quotient.
pub fn barta_with_trial<T: TrialFunction + ?Sized>(
    cap: &CapSpec,
    trial: &T,
    grid_size: usize,
    refine_tol: f64,
) -> Result<(EigenEstimate, BartaProfile)> {
    cap.validate()?;
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!("grid_size must be >= 64, got {grid_size}")));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("refine_tol must be positive, got {refine_tol}")));
    }
    let grid = RadialGrid::sample(cap.r, grid_size, |t| Ok((t.sin(), t.cos())))?;
    let u: Vec<f64> = grid.t.iter().map(|&t| trial.value(t)).collect();
    let du: Vec<f64> = grid.t.iter().map(|&t| trial.derivative(t)).collect();
    if let Some(i) = u[..u.len() - 1].iter().position(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "trial function must be positive on [0, r), u({}) = {}",
            grid.t[i], u[i]
        )));
    }
    let t_series = (10.0 * grid.step).max(1e-3);
    // sin(s) = s - s³/6 + ..., i.e. h'''(0) = -1
    let avg = grid.averaged(cap.weight_power(), Some((&u, &du)), -1.0, t_series)?;
    let d = tail_hermite(&avg.g, &avg.dg, grid.step);
    let d_prime: Vec<f64> = avg.g.iter().map(|g| -g).collect();

    let last = grid.len() - 1;
    let mut q: Vec<f64> = (0..last).map(|i| u[i] / d[i]).collect();
    // at t = r both u and D vanish; the quotient tends to -u'(r)/g(r)
    q.push(if u[last] == 0.0 { -du[last] / avg.g[last] } else { f64::INFINITY });

    let (mut best_i, mut best) = (0, q[0]);
    for (i, &v) in q.iter().enumerate() {
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let quotient = |t: f64| -> f64 {
        if t >= cap.r {
            return q[last];
        }
        let dt = hermite_interpolate(0.0, grid.step, &d, &d_prime, t);
        trial.value(t) / dt
    };
    let lo = grid.t[best_i.saturating_sub(1)];
    let hi = grid.t[(best_i + 1).min(last)];
    let (t_ref, q_ref) = golden_section(quotient, lo, hi, refine_tol);
    let (value, at) = if q_ref < best { (q_ref, t_ref) } else { (best, grid.t[best_i]) };

    Ok((
        EigenEstimate { kind: EigenKind::LowerBound, value, achieved_at: Some(at), tolerance: refine_tol },
        BartaProfile { t: grid.t, q },
    ))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates
        .into_iter()
        .fold((a, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// First Dirichlet eigenvalue of the cap by shooting and bisection to `tol`.
pub fn cap_eigenvalue_shooting(cap: &CapSpec, tol: f64) -> Result<EigenEstimate> {
    cap.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let mesh = shooting_mesh(cap);
    let scale = (FRAC_PI_2 / cap.r).powi(2);
    let (mut lo, mut hi) = (0.5 * scale, 4.0 * cap.m as f64 * scale);

    let mut attempts = 0;
    while crosses_zero(cap, &mesh, lo) {
        attempts += 1;
        if attempts > MAX_WIDENINGS {
            return Err(Error::BracketFailure { attempts, lo, hi });
        }
        lo *= 0.5;
    }
    while !crosses_zero(cap, &mesh, hi) {
        attempts += 1;
        if attempts > MAX_WIDENINGS {
            return Err(Error::BracketFailure { attempts, lo, hi });
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if crosses_zero(cap, &mesh, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EigenEstimate {
        kind: EigenKind::Shooting,
        value: 0.5 * (lo + hi),
        achieved_at: None,
        tolerance: tol,
    })
}

/// Integration nodes: geometric steps away from the `cot` singularity, then uniform.
fn shooting_mesh(cap: &CapSpec) -> Vec<f64> {
    let step = cap.r / SHOOTING_CELLS as f64;
    if cap.m == 2 {
        return (0..=SHOOTING_CELLS)
            .map(|i| if i == SHOOTING_CELLS { cap.r } else { i as f64 * step })
            .collect();
    }
    let mut mesh = vec![cap.r * 1e-7];
    let switch = 20.0 * step;
    while *mesh.last().unwrap() < switch {
        let t = *mesh.last().unwrap();
        mesh.push(t + 0.05 * t);
    }
    let t = *mesh.last().unwrap();
    let rest = ((cap.r - t) / step).ceil().max(1.0) as usize;
    let h = (cap.r - t) / rest as f64;
    for i in 1..=rest {
        mesh.push(if i == rest { cap.r } else { t + i as f64 * h });
    }
    mesh
}

/// Whether the solution of the radial problem vanishes somewhere in `(0, r]`.
fn crosses_zero(cap: &CapSpec, mesh: &[f64], lambda: f64) -> bool {
    let a = cap.weight_power();
    let t0 = mesh[0];
    let mut phi = 1.0 - lambda * t0 * t0 / (2.0 * (cap.m - 1) as f64);
    let mut dphi = -lambda * t0 / (cap.m - 1) as f64;
    let rhs = |t: f64, y: f64, v: f64| -> (f64, f64) {
        let drift = if a == 0.0 { 0.0 } else { a / t.tan() };
        (v, -drift * v - lambda * y)
    };
    for w in mesh.windows(2) {
        let (t, dt) = (w[0], w[1] - w[0]);
        let k1 = rhs(t, phi, dphi);
        let k2 = rhs(t + 0.5 * dt, phi + 0.5 * dt * k1.0, dphi + 0.5 * dt * k1.1);
        let k3 = rhs(t + 0.5 * dt, phi + 0.5 * dt * k2.0, dphi + 0.5 * dt * k2.1);
        let k4 = rhs(t + dt, phi + dt * k3.0, dphi + dt * k3.1);
        phi += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        dphi += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if phi <= 0.0 {
            return true;
        }
    }
    false
}

/// Barta bound and shooting value for one cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapComparison {
    pub cap: CapSpec,
    pub barta: EigenEstimate,
    pub shooting: EigenEstimate,
}

/// Evaluates both routes for every `(m, r)` pair, one cap per task.
pub fn compare_caps(caps: &[CapSpec], tol: f64) -> Result<Vec<CapComparison>> {
    caps.par_iter()
        .map(|cap| {
            Ok(CapComparison {
                cap: *cap,
                barta: barta_lower_bound(cap, DEFAULT_BARTA_GRID, 1e-10)?,
                shooting: cap_eigenvalue_shooting(cap, tol)?,
            })
        })
        .collect()
}

/// Finite Dirichlet mean exit time of the cone over a domain with first
/// eigenvalue `lambda1` in an `l`-dimensional cone: `λ₁ > 2ℓ`.
pub fn cone_finite_met(lambda1: f64, l: usize) -> bool {
    debug_assert!(lambda1 > 0.0 && l >= 2);
    lambda1 > 2.0 * l as f64
}

/// Warping of the base `[0, ∞)` of a warped cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum ConeWarp {
    /// `w(t) = α + k t`.
    Linear { alpha: f64, k: f64 },
    /// Piecewise linear through `(t, w(t))` knots covering `[0, horizon]`.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl ConeWarp {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            ConeWarp::Linear { alpha, k } => alpha + k * t,
            ConeWarp::Tabulated { knots } => {
                let j = knot_segment(knots, t);
                let (t0, w0) = knots[j];
                let (t1, w1) = knots[j + 1];
                w0 + (w1 - w0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            ConeWarp::Linear { k, .. } => *k,
            ConeWarp::Tabulated { knots } => {
                let j = knot_segment(knots, t);
                (knots[j + 1].1 - knots[j].1) / (knots[j + 1].0 - knots[j].0)
            }
        }
    }

    /// `ℓ w'² + w w''` at `t`, i.e. `w²(ℓH² − K)` with `H = w'/w`, `K = −w''/w`.
    fn asymptotic_diagnostic(&self, l: usize, t: f64, step: f64) -> f64 {
        let lf = l as f64;
        match self {
            ConeWarp::Linear { k, .. } => lf * k * k,
            ConeWarp::Tabulated { .. } => {
                let (a, b, c) = (self.value(t - 2.0 * step), self.value(t - step), self.value(t));
                let w1 = (c - a) / (2.0 * step);
                let w2 = (c - 2.0 * b + a) / (step * step);
                lf * w1 * w1 + b * w2
            }
        }
    }
}

fn knot_segment(knots: &[(f64, f64)], t: f64) -> usize {
    let idx = knots.partition_point(|(tk, _)| *tk <= t);
    idx.saturating_sub(1).min(knots.len() - 2)
}

/// Cone `[0, ∞) ×_w Ω` over a domain `Ω` of an `(ℓ−1)`-dimensional link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedConeSpec {
    pub l: usize,
    pub w: ConeWarp,
    /// First Dirichlet eigenvalue of `Ω`.
    pub lambda: f64,
    pub r0: f64,
    pub horizon: f64,
    #[serde(default = "default_cone_cells")]
    pub cells: usize,
}

fn default_cone_cells() -> usize {
    1 << 20
}

impl WarpedConeSpec {
    pub fn linear(l: usize, alpha: f64, k: f64, lambda: f64, r0: f64, horizon: f64) -> Self {
        WarpedConeSpec {
            l,
            w: ConeWarp::Linear { alpha, k },
            lambda,
            r0,
            horizon,
            cells: default_cone_cells(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::InvalidArgument(format!("cone dimension l must be >= 2, got {}", self.l)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.r0 > 0.0) || !(self.horizon > self.r0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < r0 < horizon, got r0 = {}, horizon = {}",
                self.r0, self.horizon
            )));
        }
        if self.cells < 64 {
            return Err(Error::InvalidArgument(format!("need at least 64 cells, got {}", self.cells)));
        }
        match &self.w {
            ConeWarp::Linear { alpha, k } => {
                if !(*alpha >= 0.0 && *k >= 0.0) || (*alpha == 0.0 && *k == 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "linear warping needs alpha, k >= 0 not both zero, got ({alpha}, {k})"
                    )));
                }
            }
            ConeWarp::Tabulated { knots } => {
                if knots.len() < 2 || knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidArgument("cone warping knots must be strictly increasing".into()));
                }
                if knots[0].0 > 0.0 || knots[knots.len() - 1].0 < self.horizon {
                    return Err(Error::InvalidArgument("cone warping knots must cover [0, horizon]".into()));
                }
                if knots.iter().skip(1).any(|&(_, w)| !(w > 0.0)) || knots[0].1 < 0.0 {
                    return Err(Error::InvalidArgument("cone warping must be positive for t > 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// `F(t) = (1/w²(t)) ∫_0^t ψ/ψ'`, with `ψ = ∫_0^t w^{ℓ−1}`, on a uniform grid.
struct ConeProfile {
    step: f64,
    w: Vec<f64>,
    /// `∫_0^t ψ/ψ'`
    phi: Vec<f64>,
    f: Vec<f64>,
}

fn cone_profile(spec: &WarpedConeSpec, extent: f64, cells: usize) -> Result<ConeProfile> {
    let step = extent / cells as f64;
    let l1 = (spec.l - 1) as i32;
    let node = |i: usize| if i == cells { extent } else { i as f64 * step };
    let w: Vec<f64> = (0..=cells).map(|i| spec.w.value(node(i))).collect();
    let dw: Vec<f64> = (0..=cells).map(|i| spec.w.derivative(node(i))).collect();
    let wl: Vec<f64> = w.iter().map(|x| x.powi(l1)).collect();
    let dwl: Vec<f64> = w
        .iter()
        .zip(&dw)
        .map(|(x, d)| l1 as f64 * x.powi(l1 - 1) * d)
        .collect();
    let psi = cumulative_hermite(&wl, &dwl, step);

    let mut ratio = vec![0.0; cells + 1];
    let mut dratio = vec![0.0; cells + 1];
    // (ψ/ψ')' = 1 − (ψ/ψ')·(ℓ−1)w'/w; at the origin the limit is 1/ℓ when w(0) = 0
    dratio[0] = if w[0] > 0.0 { 1.0 } else { 1.0 / spec.l as f64 };
    for i in 1..=cells {
        if !(w[i] > 0.0) {
            return Err(Error::InvalidArgument(format!("cone warping vanishes at t = {}", node(i))));
        }
        ratio[i] = psi[i] / wl[i];
        dratio[i] = 1.0 - ratio[i] * l1 as f64 * dw[i] / w[i];
    }
    let phi = cumulative_hermite(&ratio, &dratio, step);
    let f = phi
        .iter()
        .zip(&w)
        .map(|(p, x)| if *x > 0.0 { p / (x * x) } else { 0.0 })
        .collect();
    Ok(ConeProfile { step, w, phi, f })
}

/// Outcome of the warped-cone eigenvalue condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedConeVerdict {
    pub satisfiable: bool,
    /// `inf F` over the certified tail `[r_star, horizon]`.
    pub inf_f: f64,
    pub argmin_t: f64,
    /// Start of the certified tail, `max(r0, horizon/2)`.
    pub r_star: f64,
    /// `inf F` over the full window `[r0, horizon]`.
    pub inf_f_from_r0: f64,
    /// `c` solving `c/(cλ − 1) = inf F` when satisfiable.
    pub c_witness: Option<f64>,
    pub decreasing_at_horizon: bool,
    /// `w²(ℓH² − K)` at the horizon; must stay bounded when `w → ∞`.
    pub curvature_diagnostic: f64,
    pub notes: Vec<String>,
}

/// Decides whether some `c > 1/λ` satisfies `F(t) ≥ c/(cλ − 1)` on a tail of the cone.
///
/// `c ↦ c/(cλ−1)` decreases on `(1/λ, ∞)` towards `1/λ`, so the condition is
/// satisfiable exactly when `inf F > 1/λ` on the tail. The truncation radius
/// may be enlarged freely, so the tail examined is `[max(r0, horizon/2), horizon]`.
pub fn warped_cone_condition(spec: &WarpedConeSpec) -> Result<WarpedConeVerdict> {
    spec.validate()?;
    let profile = cone_profile(spec, spec.horizon, spec.cells)?;
    let last = profile.f.len() - 1;
    let index_of = |t: f64| ((t / profile.step).ceil() as usize).min(last);
    let r_star = spec.r0.max(0.5 * spec.horizon);

    let min_from = |start: usize| -> (usize, f64) {
        let mut best = (start, profile.f[start]);
        for (i, &v) in profile.f.iter().enumerate().skip(start) {
            if v < best.1 {
                best = (i, v);
            }
        }
        best
    };
    let (arg, inf_f) = min_from(index_of(r_star));
    let (_, inf_f_from_r0) = min_from(index_of(spec.r0));

    let window = (spec.cells / 100).max(1);
    let decreasing_at_horizon = profile.f[last] < profile.f[last - window] * (1.0 - 1e-9);
    let threshold = 1.0 / spec.lambda;
    if decreasing_at_horizon && inf_f <= threshold {
        return Err(Error::HorizonTooSmall { horizon: spec.horizon, inf_f });
    }
    let satisfiable = inf_f > threshold;
    let c_witness = satisfiable.then(|| inf_f / (inf_f * spec.lambda - 1.0));

    let mut notes = vec![
        "L'Hospital asymptotics at infinity presume the warped product is stochastically complete when the link is a round sphere; this is not checked".to_string(),
    ];
    if decreasing_at_horizon {
        notes.push("F is still decreasing at the horizon; the verdict holds on the truncated cone only".into());
    }
    Ok(WarpedConeVerdict {
        satisfiable,
        inf_f,
        argmin_t: arg as f64 * profile.step,
        r_star,
        inf_f_from_r0,
        c_witness,
        decreasing_at_horizon,
        curvature_diagnostic: spec.w.asymptotic_diagnostic(spec.l, spec.horizon, profile.step),
        notes,
    })
}

/// `F(t)` on the cone grid, for plotting.
pub fn warped_cone_profile(spec: &WarpedConeSpec, cells: usize) -> Result<CsvTable> {
    spec.validate()?;
    let profile = cone_profile(spec, spec.horizon, cells)?;
    let mut table = CsvTable::new(["t", "w", "F"]);
    for i in 1..profile.f.len() {
        table.push(vec![i as f64 * profile.step, profile.w[i], profile.f[i]]);
    }
    Ok(table)
}

/// `u(t) = (cλ − 1) ∫_0^t ψ/ψ'`, the radial supersolution on the cone.
pub fn warped_cone_supersolution(spec: &WarpedConeSpec, c: f64, t: f64) -> Result<f64> {
    spec.validate()?;
    let min = 1.0 / spec.lambda;
    if !(c > min) {
        return Err(Error::InvalidC { c, min });
    }
    if !(t >= 0.0) {
        return Err(Error::OutOfRange { value: t, lo: 0.0, hi: f64::INFINITY });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let profile = cone_profile(spec, t, 4096)?;
    Ok((c * spec.lambda - 1.0) * profile.phi[profile.phi.len() - 1])
}
