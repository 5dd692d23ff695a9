//! Exit-time moments of Brownian motion from geodesic balls of model manifolds.
//!
//! For the ball `Ω_r` of the `n`-dimensional model with warping `h`, the
//! moments `u^k(x) = E^x[τ^k]` are radial and obey the Poisson hierarchy
//! `Δu^k + k u^{k-1} = 0`, `u^k = 0` on `∂Ω_r`, `u^0 ≡ 1`. In the radial
//! coordinate this integrates to
//!
//! ```text
//!     u^k(t) = k ∫_t^r ( ∫_0^τ h^{n-1}(s) u^{k-1}(s) ds ) / h^{n-1}(τ) dτ.
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_range, Error, Result};
use crate::quadrature::{hermite_interpolate, linear_interpolate, tail_hermite, RadialGrid};
use crate::table::CsvTable;
use crate::warping::{WarpingFunction, DEFAULT_CELLS};

/// Geodesic ball of radius `r` about the pole of the `n`-dimensional model.
#[derive(Debug, Clone)]
pub struct ModelBall {
    n: usize,
    warping: Arc<WarpingFunction>,
    r: f64,
    cells: usize,
}

impl ModelBall {
    pub fn new(n: usize, warping: Arc<WarpingFunction>, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("model dimension must be >= 2, got {n}")));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {r}")));
        }
        ensure_range(r, 0.0, warping.t_max())?;
        Ok(ModelBall { n, warping, r, cells: DEFAULT_CELLS })
    }

    /// Number of quadrature cells on `[0, r]`.
    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells.max(2);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn warping(&self) -> &Arc<WarpingFunction> {
        &self.warping
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        radial_grid(&self.warping, self.r, self.cells)
    }
}

fn radial_grid(w: &WarpingFunction, r: f64, cells: usize) -> Result<RadialGrid> {
    RadialGrid::sample(r, cells, |t| Ok((w.eval_h(t)?, w.eval_h_prime(t)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

/// `u^k(t_i)` for `k = 0..=K` on a radial grid.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub n: usize,
    pub r: f64,
    pub method: Method,
    pub t: Vec<f64>,
    /// `values[k][i] = u^k(t[i])`.
    pub values: Vec<Vec<f64>>,
    /// `d/dt u^k`; empty for Monte Carlo tables.
    pub derivatives: Vec<Vec<f64>>,
    /// Standard errors; only for Monte Carlo tables.
    pub standard_errors: Option<Vec<Vec<f64>>>,
}

impl MomentTable {
    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid profile of `u^k`.
    pub fn moment(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// `u^k(t)` for any `t ∈ [0, r]`.
    ///
    /// Quadrature tables interpolate with cubic Hermite polynomials built from
    /// the exact derivative `(u^k)' = -k g_k`; Monte Carlo tables interpolate
    /// linearly.
    pub fn value(&self, k: usize, t: f64) -> Result<f64> {
        if k > self.max_order() {
            return Err(Error::InvalidArgument(format!(
                "moment order {k} exceeds table order {}",
                self.max_order()
            )));
        }
        ensure_range(t, 0.0, self.r)?;
        if k == 0 {
            return Ok(1.0);
        }
        if self.t.len() == 1 {
            return Ok(self.values[k][0]);
        }
        let step = self.t[1] - self.t[0];
        let origin = self.t[0];
        if !self.derivatives.is_empty() {
            if let Some(i) = self.t.iter().position(|&x| x == t) {
                return Ok(self.values[k][i]);
            }
            Ok(hermite_interpolate(origin, step, &self.values[k], &self.derivatives[k], t))
        } else {
            Ok(linear_interpolate(origin, step, &self.values[k], t))
        }
    }

    /// CSV with a `# n=.. r=.. method=..` line and columns `t,u0,...,uK`.
    pub fn to_csv(&self) -> CsvTable {
        let mut header = vec!["t".to_string()];
        header.extend((0..=self.max_order()).map(|k| format!("u{k}")));
        let mut table = CsvTable::new(header).with_comment(format!(
            "n={} r={} method={}",
            self.n,
            crate::table::format_number(self.r),
            self.method
        ));
        for (i, &t) in self.t.iter().enumerate() {
            let mut row = vec![t];
            row.extend(self.values.iter().map(|u| u[i]));
            table.push(row);
        }
        table
    }
}

/// Full moment table up to order `k_max` by iterated quadrature.
pub fn moment_table(ball: &ModelBall, k_max: usize) -> Result<MomentTable> {
    let grid = ball.grid()?;
    let n = grid.len();
    let p = (ball.n - 1) as f64;
    let c0 = ball.warping.curvature_at_origin();
    let t_series = ball.warping.series_cutoff();

    let mut values = vec![vec![1.0; n]];
    let mut derivatives = vec![vec![0.0; n]];
    for k in 1..=k_max {
        let prev = (&values[k - 1][..], &derivatives[k - 1][..]);
        let avg = grid.averaged(p, Some(prev), c0, t_series)?;
        let tail = tail_hermite(&avg.g, &avg.dg, grid.step);
        let kf = k as f64;
        values.push(tail.iter().map(|v| kf * v).collect());
        derivatives.push(avg.g.iter().map(|g| -kf * g).collect());
    }
    Ok(MomentTable {
        n: ball.n,
        r: ball.r,
        method: Method::Quadrature,
        t: grid.t,
        values,
        derivatives,
        standard_errors: None,
    })
}

/// `E^x[τ]` for `x` at distance `t` from the pole.
pub fn mean_exit_time(ball: &ModelBall, t: f64) -> Result<f64> {
    ensure_range(t, 0.0, ball.r)?;
    moment_table(ball, 1)?.value(1, t)
}

/// `E^x[τ^k]` for `x` at distance `t` from the pole.
pub fn exit_moment(ball: &ModelBall, k: i64, t: f64) -> Result<f64> {
    if k < 0 {
        return Err(Error::NegativeOrder(k));
    }
    ensure_range(t, 0.0, ball.r)?;
    if k == 0 {
        return Ok(1.0);
    }
    moment_table(ball, k as usize)?.value(k as usize, t)
}

/// Parameters of the cylinder mean-exit-time bound.
#[derive(Debug, Clone)]
pub struct BoundSpec {
    /// Dimension of the immersed submanifold.
    pub m: usize,
    /// Dimension of the Euclidean fiber of the cylinder.
    pub l: usize,
    pub eta: f64,
    /// Radius of the ball of `N` containing the projection of the domain.
    pub r_d: f64,
    pub warping: Arc<WarpingFunction>,
    pub cells: usize,
}

impl BoundSpec {
    pub fn new(m: usize, l: usize, eta: f64, r_d: f64, warping: Arc<WarpingFunction>) -> Self {
        BoundSpec { m, l, eta, r_d, warping, cells: DEFAULT_CELLS }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::EtaNonPositive(self.eta));
        }
        if self.m < self.l + 1 {
            return Err(Error::InvalidArgument(format!(
                "need m >= l + 1, got m = {}, l = {}",
                self.m, self.l
            )));
        }
        if !(self.r_d > 0.0) {
            return Err(Error::InvalidArgument(format!("r_D must be positive, got {}", self.r_d)));
        }
        ensure_range(self.r_d, 0.0, self.warping.t_max())
    }
}

/// `∫_0^{r_D} (∫_0^τ h^{η-1}) / h^{η-1}(τ) dτ`, an upper bound for the mean
/// exit time of the domain.
///
/// With `η` equal to the model dimension this is exactly the mean exit time
/// from the centre of the model ball of radius `r_D`, computed on the same grid.
pub fn theorem1_bound(spec: &BoundSpec) -> Result<f64> {
    spec.validate()?;
    let grid = radial_grid(&spec.warping, spec.r_d, spec.cells)?;
    let avg = grid.averaged(
        spec.eta - 1.0,
        None,
        spec.warping.curvature_at_origin(),
        spec.warping.series_cutoff(),
    )?;
    let tail = tail_hermite(&avg.g, &avg.dg, grid.step);
    Ok(tail[0])
}

/// `k! · theorem1_bound(spec)^k`, the bound on the `k`-th exit moment.
pub fn tower_bound(spec: &BoundSpec, k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::NegativeOrder(k));
    }
    let base = theorem1_bound(spec)?;
    let mut out = 1.0;
    for j in 1..=k {
        out *= j as f64 * base;
    }
    Ok(out)
}
