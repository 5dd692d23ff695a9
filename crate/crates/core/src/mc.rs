//! Monte Carlo estimates of exit-time moments from model balls.
//!
//! The radial part of Brownian motion (generator `Δ`) on the `n`-dimensional
//! model solves
//!
//! ```text
//!     dR = √2 dW + (n - 1) (h'/h)(R) dt.
//! ```
//!
//! Each step advances the Euclidean part `(n - 1)/R` exactly, by moving an
//! `n`-dimensional Gaussian step and taking the norm, and adds the remaining
//! drift `(n - 1)(h'/h - 1/R)` by an Euler step. The remainder is bounded near
//! the origin, so no reflection or drift cap is needed. Exits are caught both at
//! the end of a step and inside it through the Brownian-bridge crossing
//! probability.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{Method, ModelBall, MomentTable};
use crate::quadrature::pairwise_sum;
use crate::table::CsvTable;
use crate::warping::ClosedForm;

/// Bridge crossing probabilities below `exp(-BRIDGE_CUTOFF)` are treated as zero.
const BRIDGE_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub ball: ModelBall,
    pub start_t: f64,
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub max_k: usize,
    /// Below this radius the drift correction uses its series at the origin.
    pub t_floor: f64,
    /// Test for exits inside each step with the Brownian-bridge probability.
    pub bridge_correction: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn new(ball: ModelBall, start_t: f64, paths: usize, dt: f64, seed: u64) -> Self {
        let t_floor = ball.warping().series_cutoff();
        SimConfig {
            ball,
            start_t,
            paths,
            dt,
            seed,
            max_k: 2,
            t_floor,
            bridge_correction: true,
            threads: None,
        }
    }

    pub fn with_max_k(mut self, max_k: usize) -> Self {
        self.max_k = max_k;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_bridge_correction(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    /// Largest step accepted by [`simulate_exit`].
    pub fn step_limit(&self) -> f64 {
        (self.ball.radius() / 50.0).powi(2)
    }

    fn validate(&self, guard_step: bool) -> Result<()> {
        let r = self.ball.radius();
        if !(self.start_t >= 0.0 && self.start_t < r) {
            return Err(Error::OutOfRange { value: self.start_t, lo: 0.0, hi: r });
        }
        if self.paths == 0 {
            return Err(Error::InvalidArgument("paths must be >= 1".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if self.max_k == 0 {
            return Err(Error::InvalidArgument("max_k must be >= 1".into()));
        }
        if !(self.t_floor > 0.0) {
            return Err(Error::InvalidArgument(format!("t_floor must be positive, got {}", self.t_floor)));
        }
        if guard_step && self.dt > self.step_limit() {
            return Err(Error::StepTooLarge { dt: self.dt, limit: self.step_limit() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: usize,
    pub mean: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub moment_estimates: Vec<MomentEstimate>,
    pub paths_used: usize,
    pub dt_effective: f64,
    pub seed_echo: u64,
    /// Wall-clock time; not serialized, so that reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SimResult {
    pub fn moment(&self, k: usize) -> Option<&MomentEstimate> {
        self.moment_estimates.iter().find(|e| e.k == k)
    }

    pub fn mean(&self) -> f64 {
        self.moment_estimates[1].mean
    }

    /// Same estimates, ignoring wall-clock time.
    pub fn same_estimates(&self, other: &SimResult) -> bool {
        self.moment_estimates == other.moment_estimates
            && self.paths_used == other.paths_used
            && self.dt_effective.to_bits() == other.dt_effective.to_bits()
            && self.seed_echo == other.seed_echo
    }
}

/// Drift beyond the Euclidean part, `(n - 1)(h'/h - 1/R)`.
struct Correction<'a> {
    ball: &'a ModelBall,
    scale: f64,
    t_floor: f64,
    g0: f64,
    g1: f64,
}

impl<'a> Correction<'a> {
    fn new(ball: &'a ModelBall, t_floor: f64) -> Self {
        let profile = ball.warping().profile();
        Correction {
            ball,
            scale: (ball.n() - 1) as f64,
            t_floor,
            g0: profile.value(0.0),
            g1: profile.derivative(0.0),
        }
    }

    fn at(&self, r: f64) -> Result<f64> {
        let w = self.ball.warping();
        match w.closed_form() {
            Some(ClosedForm::Euclidean) => return Ok(0.0),
            _ if r < self.t_floor => return Ok(self.scale * (self.g0 * r / 3.0 + self.g1 * r * r / 4.0)),
            _ => {}
        }
        Ok(self.scale * (w.log_derivative(r)? - 1.0 / r))
    }
}

fn exit_time(config: &SimConfig, correction: &Correction, index: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let n = config.ball.n();
    let r = config.ball.radius();
    let dt = config.dt;
    let sigma = (2.0 * dt).sqrt();

    let mut radius = config.start_t;
    let mut time = 0.0;
    loop {
        let along: f64 = rng.sample(StandardNormal);
        let mut perp = 0.0;
        for _ in 1..n {
            let z: f64 = rng.sample(StandardNormal);
            perp += z * z;
        }
        let x = radius + sigma * along;
        let next = (x * x + sigma * sigma * perp).sqrt() + correction.at(radius)? * dt;
        if next >= r {
            return Ok(time + dt * (r - radius) / (next - radius));
        }
        if config.bridge_correction {
            let exponent = (r - radius) * (r - next) / dt;
            if exponent < BRIDGE_CUTOFF {
                let u: f64 = rng.random();
                if u < (-exponent).exp() {
                    return Ok(time + 0.5 * dt);
                }
            }
        }
        radius = next.max(0.0);
        time += dt;
    }
}

fn exit_times(config: &SimConfig) -> Result<Vec<f64>> {
    let correction = Correction::new(&config.ball, config.t_floor);
    let run = || {
        (0..config.paths)
            .into_par_iter()
            .map(|i| exit_time(config, &correction, i))
            .collect::<Result<Vec<f64>>>()
    };
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn estimates(times: &[f64], max_k: usize) -> Vec<MomentEstimate> {
    let count = times.len() as f64;
    let mut out = vec![MomentEstimate { k: 0, mean: 1.0, standard_error: 0.0 }];
    let mut powers = vec![1.0; times.len()];
    for k in 1..=max_k {
        for (p, &t) in powers.iter_mut().zip(times) {
            *p *= t;
        }
        let mean = pairwise_sum(&powers) / count;
        let squares: Vec<f64> = powers.iter().map(|p| (p - mean) * (p - mean)).collect();
        let variance = if times.len() > 1 { pairwise_sum(&squares) / (count - 1.0) } else { 0.0 };
        out.push(MomentEstimate { k, mean, standard_error: (variance / count).sqrt() });
    }
    out
}

fn run(config: &SimConfig, guard_step: bool) -> Result<(SimResult, Vec<f64>)> {
    config.validate(guard_step)?;
    let started = Instant::now();
    let times = exit_times(config)?;
    let result = SimResult {
        moment_estimates: estimates(&times, config.max_k),
        paths_used: times.len(),
        dt_effective: config.dt,
        seed_echo: config.seed,
        elapsed: started.elapsed(),
    };
    Ok((result, times))
}

/// Sample moments `E[τ^k]`, `k ≤ max_k`, of the exit time from the ball.
///
/// Path `i` draws from stream `i` of a generator seeded with `config.seed`, and
/// sums are reduced in a fixed order, so the result does not depend on the
/// thread count.
pub fn simulate_exit(config: &SimConfig) -> Result<SimResult> {
    run(config, true).map(|(result, _)| result)
}

/// Like [`simulate_exit`], also returning the per-path exit times.
pub fn simulate_exit_with_times(config: &SimConfig) -> Result<(SimResult, Vec<f64>)> {
    run(config, true)
}

/// Writes exit times as consecutive little-endian `f64`.
pub fn write_exit_times(path: &Path, times: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for t in times {
        out.write_all(&t.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a file written by [`write_exit_times`].
pub fn read_exit_times(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse(format!("{} bytes is not a whole number of f64", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// `dt,mean,se` rows from one run per step size, all with the same seed.
///
/// Coarse steps are the point of the sweep, so the step-size guard is not applied.
pub fn convergence_sweep(config: &SimConfig, dt_list: &[f64]) -> Result<CsvTable> {
    if dt_list.is_empty() {
        return Err(Error::InvalidArgument("dt list is empty".into()));
    }
    if dt_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("dt list must be strictly decreasing".into()));
    }
    let mut table = CsvTable::new(["dt", "mean", "se"]);
    for &dt in dt_list {
        let cfg = SimConfig { dt, ..config.clone() };
        let (result, _) = run(&cfg, false)?;
        let m = result.moment_estimates[1];
        table.push(vec![dt, m.mean, m.standard_error]);
    }
    Ok(table)
}

/// Moment table estimated at `points + 1` evenly spaced starting radii.
///
/// The last row is the boundary, where every moment of positive order is zero.
pub fn monte_carlo_table(config: &SimConfig, points: usize) -> Result<MomentTable> {
    if points == 0 {
        return Err(Error::InvalidArgument("need at least one starting radius".into()));
    }
    let r = config.ball.radius();
    let k_max = config.max_k;
    let mut t = Vec::with_capacity(points + 1);
    let mut values = vec![Vec::with_capacity(points + 1); k_max + 1];
    let mut errors = vec![Vec::with_capacity(points + 1); k_max + 1];
    for i in 0..points {
        let start = r * i as f64 / points as f64;
        let result = simulate_exit(&SimConfig { start_t: start, ..config.clone() })?;
        t.push(start);
        for e in &result.moment_estimates {
            values[e.k].push(e.mean);
            errors[e.k].push(e.standard_error);
        }
    }
    t.push(r);
    for k in 0..=k_max {
        values[k].push(if k == 0 { 1.0 } else { 0.0 });
        errors[k].push(0.0);
    }
    Ok(MomentTable {
        n: config.ball.n(),
        r,
        method: Method::MonteCarlo,
        t,
        values,
        derivatives: Vec::new(),
        standard_errors: Some(errors),
    })
}
