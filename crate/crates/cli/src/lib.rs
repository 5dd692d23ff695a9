//! Command-line front end: argument parsing, dispatch and output formatting.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 failed
//! verification suite.

pub mod angle;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use exitmoments::criteria::{parse_batch, summary_csv};
use exitmoments::mc::{monte_carlo_table, simulate_exit_with_times, write_exit_times};
use exitmoments::spectral::{barta_with_trial, warped_cone_profile, CosineTrial, DEFAULT_BARTA_GRID};
use exitmoments::table::{format_number, CsvTable};
use exitmoments::verify::render_checks;
use exitmoments::warping::DEFAULT_CELLS;
use exitmoments::{
    cap_eigenvalue_shooting, check_cone, check_wedge, cone_finite_met, convergence_sweep,
    mean_exit_time, moment_table, run_batch, run_verification, solve_warping,
    theorem1_bound, tower_bound, warped_cone_condition, BoundSpec, CapSpec, Comparison,
    ConeWarp, CriterionReport, CurvatureProfile, ModelBall, MomentTable, SimConfig,
    VerifyOptions, WarpedConeSpec, WarpingFunction, WedgeCase,
};

use angle::parse_angle;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "exitmoments", version, about = "Exit-time moments, eigenvalue bounds and finiteness criteria")]
pub struct Cli {
    /// Output format; tables default to csv, reports to json.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Print timings and diagnostics to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Radial curvature: flat, constant:B, polynomial:c0,c1,..., tabulated:t:g,t:g,...
    #[arg(long, default_value = "flat", value_parser = parse_profile)]
    profile: CurvatureProfile,
    /// JSON file holding the curvature profile; overrides --profile.
    #[arg(long)]
    profile_json: Option<PathBuf>,
}

impl ProfileArgs {
    fn resolve(&self) -> Result<CurvatureProfile, CliError> {
        match &self.profile_json {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
            }
            None => Ok(self.profile.clone()),
        }
    }

    fn warping(&self, t_max: f64) -> Result<Arc<WarpingFunction>, CliError> {
        Ok(Arc::new(solve_warping(&self.resolve()?, t_max, 1e-10)?))
    }
}

fn parse_profile(s: &str) -> Result<CurvatureProfile, String> {
    s.parse().map_err(|e: exitmoments::Error| e.to_string())
}

#[derive(Debug, Args)]
struct BallArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// Model dimension.
    #[arg(long)]
    n: usize,
    /// Ball radius.
    #[arg(long)]
    r: f64,
    /// Quadrature cells on [0, r].
    #[arg(long, default_value_t = DEFAULT_CELLS)]
    cells: usize,
}

impl BallArgs {
    fn ball(&self) -> Result<ModelBall, CliError> {
        Ok(ModelBall::new(self.n, self.profile.warping(self.r)?, self.r)?.with_cells(self.cells))
    }
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Disable the in-step Brownian-bridge exit test.
    #[arg(long)]
    no_bridge: bool,
    /// Radius below which the drift correction uses its series.
    #[arg(long)]
    t_floor: Option<f64>,
}

impl McArgs {
    fn config(&self, ball: ModelBall, start: f64, max_k: usize) -> SimConfig {
        let mut config = SimConfig::new(ball, start, self.paths, self.dt, self.seed)
            .with_max_k(max_k)
            .with_bridge_correction(!self.no_bridge);
        config.threads = self.threads;
        if let Some(t) = self.t_floor {
            config.t_floor = t;
        }
        config
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve h'' = G h and dump t, h, h'.
    Warp {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Mean exit time profile of a model ball.
    Met {
        #[command(flatten)]
        ball: BallArgs,
        /// Evaluate at a single radius.
        #[arg(long)]
        at: Option<f64>,
        /// Number of intervals in the emitted profile.
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Exit-time moments u^0..u^K.
    Moments {
        #[command(flatten)]
        ball: BallArgs,
        /// Highest moment order.
        #[arg(short = 'K', long = "K")]
        k_max: usize,
        /// Evaluate at a single radius.
        #[arg(long)]
        at: Option<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
        method: MethodArg,
        #[command(flatten)]
        mc: McArgs,
        /// Starting radii for a Monte Carlo table.
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Mean exit time bound for a domain in a cylinder, and tower bounds.
    Bound {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long = "r-d")]
        r_d: f64,
        /// Highest moment order for the tower bounds.
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long, default_value_t = DEFAULT_CELLS)]
        cells: usize,
    },
    /// Barta lower bound for the first eigenvalue of a spherical cap.
    Barta {
        #[arg(long)]
        m: usize,
        /// Cap radius: decimal, pi/N or atan:X.
        #[arg(long, value_parser = parse_angle)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_BARTA_GRID)]
        grid: usize,
        /// Write the sampled quotient (t, q) to this CSV file.
        #[arg(long)]
        quotient_out: Option<PathBuf>,
    },
    /// First Dirichlet eigenvalue of a spherical cap by shooting.
    Eigen {
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = parse_angle)]
        r: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Cone tests: eigenvalue criterion (--lambda, --l) and minimal cone aperture (--m, --theta).
    Cone {
        #[arg(long, requires = "l")]
        lambda: Option<f64>,
        #[arg(long, requires = "lambda")]
        l: Option<usize>,
        #[arg(long, requires = "theta")]
        m: Option<usize>,
        #[arg(long, value_parser = parse_angle, requires = "m")]
        theta: Option<f64>,
    },
    /// Wedge dimension test m - (alpha^2 + 1) l - k > 0.
    Wedge {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: f64,
    },
    /// Eigenvalue condition on a warped cone.
    WarpedCone {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Piecewise linear warping t:w,t:w,...; replaces alpha + k t.
        #[arg(long)]
        knots: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 1e3)]
        horizon: f64,
        #[arg(long, default_value_t = 1 << 20)]
        cells: usize,
        /// Write the (t, w, F) profile to this CSV file.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Batch of criterion checks from a JSON array.
    Criteria {
        #[arg(long)]
        input: PathBuf,
        /// Also write a criterion_id,verdict,threshold summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Monte Carlo exit-time moments.
    Simulate {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        #[command(flatten)]
        mc: McArgs,
        /// Write per-path exit times as little-endian f64.
        #[arg(long)]
        times_out: Option<PathBuf>,
        /// Comma-separated decreasing step sizes; emits dt, mean, se rows.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
    },
    /// Reference values and quadrature vs Monte Carlo cross-check.
    Verify {
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(exitmoments::Error),
    VerifyFailed(usize),
}

impl From<exitmoments::Error> for CliError {
    fn from(e: exitmoments::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::VerifyFailed(_) => EXIT_VERIFY,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Numerical(e) => write!(f, "error: {e}"),
            CliError::VerifyFailed(n) => write!(f, "verification failed: {n} check(s) failed"),
        }
    }
}

struct Output {
    format: Option<Format>,
    path: Option<PathBuf>,
    verbose: u8,
}

impl Output {
    fn info(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Numerical(e.into());
        match &self.path {
            Some(path) => std::fs::write(path, text).map_err(io),
            None => {
                let mut out = std::io::stdout().lock();
                match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                    // a closed downstream pipe (e.g. `| head`) is not a failure
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => other.map_err(io),
                }
            }
        }
    }

    fn emit_json<T: Serialize + ?Sized>(&self, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.into()))?;
        text.push('\n');
        self.emit(&text)
    }

    /// Tables default to csv.
    fn table(&self, table: &CsvTable) -> Result<(), CliError> {
        match self.format.unwrap_or(Format::Csv) {
            Format::Csv => self.emit(&table.render()),
            Format::Json => self.emit_json(&table_json(table)),
        }
    }

    /// Reports default to json; `csv` is the text rows given.
    fn report<T: Serialize + ?Sized>(&self, value: &T, csv: impl FnOnce() -> String) -> Result<(), CliError> {
        match self.format.unwrap_or(Format::Json) {
            Format::Json => self.emit_json(value),
            Format::Csv => self.emit(&csv()),
        }
    }
}

fn table_json(table: &CsvTable) -> Value {
    let mut v = json!({ "columns": table.header, "rows": table.rows });
    if let Some(c) = &table.comment {
        v["comment"] = json!(c);
    }
    v
}

fn text_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn reports_csv(reports: &[CriterionReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.criterion_id.clone(),
                r.verdict.to_string(),
                format_number(r.value),
                comparison_symbol(r.comparison).into(),
                format_number(r.threshold),
                r.bound.map(format_number).unwrap_or_default(),
            ]
        })
        .collect();
    text_csv(&["criterion_id", "verdict", "value", "comparison", "threshold", "bound"], &rows)
}

fn comparison_symbol(c: Comparison) -> &'static str {
    match c {
        Comparison::AtMost => "<=",
        Comparison::Below => "<",
        Comparison::Above => ">",
    }
}

fn moment_table_json(table: &MomentTable) -> Value {
    json!({
        "n": table.n,
        "r": table.r,
        "method": table.method,
        "t": table.t,
        "values": table.values,
        "standard_errors": table.standard_errors,
    })
}

fn write_csv_file(table: &CsvTable, path: &Path) -> Result<(), CliError> {
    Ok(table.write_to(path)?)
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let out = Output { format: cli.format, path: cli.output, verbose: cli.verbose };
    let started = Instant::now();
    let result = dispatch(cli.command, &out);
    out.info(format!("elapsed {:.3}s", started.elapsed().as_secs_f64()));
    result
}

fn dispatch(command: Command, out: &Output) -> Result<(), CliError> {
    match command {
        Command::Warp { profile, t_max, tol } => {
            let w = solve_warping(&profile.resolve()?, t_max, tol)?;
            out.info(format!("grid step {}", format_number(w.step())));
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => out.emit(&w.to_csv().render()),
                Format::Json => out.emit_json(&json!({
                    "profile": w.profile(),
                    "t_max": w.t_max(),
                    "step": w.step(),
                    "closed_form": w.closed_form(),
                    "t": w.grid().collect::<Vec<_>>(),
                    "h": w.h_values(),
                    "h_prime": w.h_prime_values(),
                })),
            }
        }
        Command::Met { ball, at, points } => {
            let ball = ball.ball()?;
            let mut table = CsvTable::new(["t", "mean_exit_time"]);
            match at {
                Some(t) => table.push(vec![t, mean_exit_time(&ball, t)?]),
                None => {
                    let moments = moment_table(&ball, 1)?;
                    let points = points.max(1);
                    for i in 0..=points {
                        let t = ball.radius() * i as f64 / points as f64;
                        table.push(vec![t, moments.value(1, t)?]);
                    }
                }
            }
            out.table(&table)
        }
        Command::Moments { ball, k_max, at, method, mc, points } => {
            let ball = ball.ball()?;
            match (method, at) {
                (MethodArg::Quadrature, Some(t)) => {
                    let mut table = CsvTable::new(["k", "value"]);
                    let moments = moment_table(&ball, k_max)?;
                    for k in 0..=k_max {
                        table.push(vec![k as f64, moments.value(k, t)?]);
                    }
                    out.table(&table)
                }
                (MethodArg::Quadrature, None) => {
                    let moments = moment_table(&ball, k_max)?;
                    match out.format.unwrap_or(Format::Csv) {
                        Format::Csv => out.emit(&moments.to_csv().render()),
                        Format::Json => out.emit_json(&moment_table_json(&moments)),
                    }
                }
                (MethodArg::MonteCarlo, Some(t)) => {
                    let (result, _) = simulate_exit_with_times(&mc.config(ball, t, k_max.max(1)))?;
                    let mut table = CsvTable::new(["k", "value", "se"]);
                    for e in result.moment_estimates.iter().filter(|e| e.k <= k_max) {
                        table.push(vec![e.k as f64, e.mean, e.standard_error]);
                    }
                    out.table(&table)
                }
                (MethodArg::MonteCarlo, None) => {
                    let moments = monte_carlo_table(&mc.config(ball, 0.0, k_max.max(1)), points)?;
                    match out.format.unwrap_or(Format::Csv) {
                        Format::Csv => out.emit(&moments.to_csv().render()),
                        Format::Json => out.emit_json(&moment_table_json(&moments)),
                    }
                }
            }
        }
        Command::Bound { profile, m, l, eta, r_d, k, cells } => {
            let mut spec = BoundSpec::new(m, l, eta, r_d, profile.warping(r_d)?);
            spec.cells = cells;
            let base = theorem1_bound(&spec)?;
            let towers = (0..=k.max(0)).map(|j| tower_bound(&spec, j)).collect::<Result<Vec<_>, _>>()?;
            let mut table = CsvTable::new(["k", "bound"]);
            for (j, b) in towers.iter().enumerate() {
                table.push(vec![j as f64, *b]);
            }
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => out.emit(&table.render()),
                Format::Json => out.emit_json(&json!({
                    "m": m, "l": l, "eta": eta, "r_d": r_d,
                    "mean_exit_time_bound": base,
                    "tower_bounds": towers,
                })),
            }
        }
        Command::Barta { m, r, grid, quotient_out } => {
            let cap = CapSpec::new(m, r)?;
            let (est, profile) = barta_with_trial(&cap, &CosineTrial { r }, grid, 1e-10)?;
            if let Some(path) = quotient_out {
                write_csv_file(&profile.to_csv(), &path)?;
            }
            let exceeds = cone_finite_met(est.value, m.max(2));
            out.report(
                &json!({ "m": m, "r": r, "estimate": est, "exceeds_2m": exceeds }),
                || {
                    text_csv(
                        &["m", "r", "lambda_lower", "achieved_at", "exceeds_2m"],
                        &[vec![
                            m.to_string(),
                            format_number(r),
                            format_number(est.value),
                            est.achieved_at.map(format_number).unwrap_or_default(),
                            exceeds.to_string(),
                        ]],
                    )
                },
            )
        }
        Command::Eigen { m, r, tol } => {
            let est = cap_eigenvalue_shooting(&CapSpec::new(m, r)?, tol)?;
            out.report(&json!({ "m": m, "r": r, "estimate": est }), || {
                text_csv(
                    &["m", "r", "lambda", "tolerance"],
                    &[vec![m.to_string(), format_number(r), format_number(est.value), format_number(est.tolerance)]],
                )
            })
        }
        Command::Cone { lambda, l, m, theta } => {
            let mut reports = Vec::new();
            if let (Some(lambda), Some(l)) = (lambda, l) {
                if l < 2 || lambda.is_nan() || lambda <= 0.0 {
                    return Err(CliError::Usage("need --l >= 2 and --lambda > 0".into()));
                }
                reports.push(CriterionReport {
                    criterion_id: "cone_eigenvalue".into(),
                    verdict: cone_finite_met(lambda, l),
                    value: lambda,
                    comparison: Comparison::Above,
                    threshold: 2.0 * l as f64,
                    input_echo: json!({ "lambda": lambda, "l": l }),
                    bound: None,
                    notes: Vec::new(),
                });
            }
            if let (Some(m), Some(theta)) = (m, theta) {
                reports.push(check_cone(m, theta)?);
            }
            if reports.is_empty() {
                return Err(CliError::Usage("give --lambda and --l, or --m and --theta".into()));
            }
            out.report(&reports, || reports_csv(&reports))
        }
        Command::Wedge { m, n, l, k, alpha } => {
            let report = check_wedge(&WedgeCase { m, n, l, k, alpha });
            out.report(&report, || reports_csv(std::slice::from_ref(&report)))
        }
        Command::WarpedCone { l, lambda, alpha, k, knots, r0, horizon, cells, profile_out } => {
            let w = match knots {
                Some(s) => ConeWarp::Tabulated { knots: parse_knots(&s)? },
                None => ConeWarp::Linear { alpha, k },
            };
            let spec = WarpedConeSpec { l, w, lambda, r0, horizon, cells };
            if let Some(path) = profile_out {
                write_csv_file(&warped_cone_profile(&spec, cells.min(1 << 14))?, &path)?;
            }
            let verdict = warped_cone_condition(&spec)?;
            out.report(&verdict, || {
                text_csv(
                    &["satisfiable", "inf_f", "argmin_t", "r_star", "inf_f_from_r0", "c_witness"],
                    &[vec![
                        verdict.satisfiable.to_string(),
                        format_number(verdict.inf_f),
                        format_number(verdict.argmin_t),
                        format_number(verdict.r_star),
                        format_number(verdict.inf_f_from_r0),
                        verdict.c_witness.map(format_number).unwrap_or_default(),
                    ]],
                )
            })
        }
        Command::Criteria { input, summary } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
            let cases = parse_batch(&text).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
            let reports = run_batch(&cases)?;
            if let Some(path) = summary {
                std::fs::write(&path, summary_csv(&reports)).map_err(|e| CliError::Numerical(e.into()))?;
            }
            out.report(&reports, || summary_csv(&reports))
        }
        Command::Simulate { ball, start, max_k, mc, times_out, sweep } => {
            let config = mc.config(ball.ball()?, start, max_k);
            if let Some(dts) = sweep {
                return out.table(&convergence_sweep(&config, &dts)?);
            }
            let (result, times) = simulate_exit_with_times(&config)?;
            out.info(format!("{} paths in {:.3}s", result.paths_used, result.elapsed.as_secs_f64()));
            if let Some(path) = times_out {
                write_exit_times(&path, &times)?;
            }
            out.report(&result, || {
                let mut table = CsvTable::new(["k", "mean", "se"]);
                for e in &result.moment_estimates {
                    table.push(vec![e.k as f64, e.mean, e.standard_error]);
                }
                table.render()
            })
        }
        Command::Verify { paths, dt, seed } => {
            let checks = run_verification(&VerifyOptions { mc_paths: paths, mc_dt: dt, seed })?;
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => out.emit(&render_checks(&checks))?,
                Format::Json => out.emit_json(&checks)?,
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::VerifyFailed(failed));
            }
            Ok(())
        }
    }
}

fn parse_knots(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (t, w) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("knot {pair:?} is not t:w")))?;
            let num = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {x:?}")));
            Ok((num(t)?, num(w)?))
        })
        .collect()
}
