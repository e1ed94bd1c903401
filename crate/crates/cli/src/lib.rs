//! `radplan` command-line front end.
//!
//! Every run writes the resolved `config.json` and a `<command>.json`
//! report (carrying the config's SHA-256) into `--out`; curves go to CSV.

pub mod config;
pub mod expr;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use radplan_core::analysis::{
    check_bounds, check_convexity, classify, decade_probes, default_probes, limit_identity,
};
use radplan_core::nonlinearity::{HTransform, NonlinearityPair};
use radplan_core::planning::{bound_transfer, hjb_residual_profile, PolicyField};
use radplan_core::radial::{
    ode_oracle, picard_solve, residual, Coefficient, RadialProblem, RadialSolution,
};
use radplan_core::sim::{
    compare_policies, discounted_cost, simulate_paths, transversality_check, Dynamics, ScaledPolicy,
};

use crate::config::{Command, GridSpec, ProblemSpec, RunConfig, SimSpec};
use crate::expr::ExprError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] radplan_core::Error),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) | CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Expr(_) | CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_IO,
        }
    }

    fn status(&self) -> &'static str {
        match self.exit_code() {
            EXIT_VALIDATION => "validation-failure",
            EXIT_NUMERIC => "numeric-failure",
            _ => "io-failure",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "radplan",
    version,
    about = "Radial large solutions and the production-planning model"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve the radial problem on [0, r_max]; writes solution.csv.
    Solve(SolveArgs),
    /// Classify the solution as large or bounded from the envelope integrals.
    Classify(ClassifyArgs),
    /// Solve the planning model and check its closed forms and HJB residual.
    Model(SolveArgs),
    /// Monte Carlo cost and transversality estimates for the feedback policy.
    Simulate(SimulateArgs),
    /// Quick numerical self-check.
    Verify(IoArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Space dimension (number of goods).
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Diffusion coefficients, comma separated (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sigma: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    u0: f64,
    /// Use h(u) = u, g(u) = u ln u.
    #[arg(long)]
    model_log: bool,
    /// Nonlinearity pair: `model-log` or `power:p,q,s0`.
    #[arg(long)]
    pair: Option<String>,
    /// Coefficient a(r) as an expression in r.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Coefficient b(r) as an expression in r.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    n_grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    blowup_cap: Option<f64>,
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Read the full run configuration from a JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Probe radii, comma separated (default 1, 10, ..., 1e15).
    #[arg(long, value_delimiter = ',')]
    probes: Option<Vec<f64>>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 15.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial inventory, comma separated (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y0: Option<Vec<f64>>,
    /// Number of transversality probe intervals.
    #[arg(long, default_value_t = 15)]
    probes: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2")]
    scalings: Vec<f64>,
    #[command(flatten)]
    io: IoArgs,
}

const DEFAULT_OUT: &str = "radplan-out";

fn resolve_problem(p: &ProblemArgs) -> Result<ProblemSpec, CliError> {
    if p.a.is_some() || p.b.is_some() {
        let pair = match (&p.pair, p.model_log) {
            (Some(pair), _) => pair.clone(),
            (None, true) => "model-log".to_string(),
            (None, false) => {
                return Err(CliError::Usage("--a/--b need --pair or --model-log".into()))
            }
        };
        return Ok(ProblemSpec::Custom {
            dim: p.n,
            a: p.a.clone().unwrap_or_else(|| "0".into()),
            b: p.b.clone().unwrap_or_else(|| "0".into()),
            pair,
            u0: p.u0,
        });
    }
    if let Some(pair) = &p.pair {
        if pair != "model-log" {
            return Err(CliError::Usage(format!(
                "pair `{pair}` needs coefficients --a/--b; the planning model uses model-log"
            )));
        }
    }
    Ok(ProblemSpec::Model {
        dim: p.n,
        sigma: p.sigma.clone().unwrap_or_else(|| vec![1.0; p.n]),
        alpha: p.alpha,
        u0: p.u0,
    })
}

fn resolve_grid(g: Option<&GridArgs>, simulate: bool) -> GridSpec {
    // the simulator needs a wide grid; u reaches ~1e41 by r = 20 on the model
    let (r_max, n_grid, cap) = if simulate {
        (20.0, 20_001, 1e300)
    } else {
        (1.0, 2001, 1e12)
    };
    GridSpec {
        r_max: g.and_then(|g| g.r_max).unwrap_or(r_max),
        n_grid: g.and_then(|g| g.n_grid).unwrap_or(n_grid),
        tol_abs: g.and_then(|g| g.tol).unwrap_or(1e-13),
        tol_rel: g.and_then(|g| g.tol).unwrap_or(1e-13),
        max_iter: g.and_then(|g| g.max_iter).unwrap_or(10_000),
        blowup_cap: g.and_then(|g| g.blowup_cap).unwrap_or(cap),
    }
}

fn load_or_resolve(
    command: Command,
    io: &IoArgs,
    resolve: impl FnOnce() -> Result<RunConfig, CliError>,
) -> Result<RunConfig, CliError> {
    let mut cfg = match &io.config {
        Some(path) => {
            let cfg = RunConfig::from_json(&fs::read_to_string(path)?)?;
            if cfg.command != command {
                return Err(CliError::Usage(format!(
                    "config file is for `{}`, not `{}`",
                    cfg.command.as_str(),
                    command.as_str()
                )));
            }
            cfg
        }
        None => resolve()?,
    };
    if let Some(out) = &io.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn resolve(cmd: &Cmd) -> Result<RunConfig, CliError> {
    let out = |io: &IoArgs| io.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match cmd {
        Cmd::Solve(a) | Cmd::Model(a) => {
            let command = if matches!(cmd, Cmd::Solve(_)) {
                Command::Solve
            } else {
                Command::Model
            };
            load_or_resolve(command, &a.io, || {
                Ok(RunConfig {
                    command,
                    problem: resolve_problem(&a.problem)?,
                    grid: resolve_grid(Some(&a.grid), false),
                    sim: None,
                    probe_radii: None,
                    out: out(&a.io),
                })
            })
        }
        Cmd::Classify(a) => load_or_resolve(Command::Classify, &a.io, || {
            Ok(RunConfig {
                command: Command::Classify,
                problem: resolve_problem(&a.problem)?,
                grid: resolve_grid(None, false),
                sim: None,
                probe_radii: a.probes.clone(),
                out: out(&a.io),
            })
        }),
        Cmd::Simulate(a) => load_or_resolve(Command::Simulate, &a.io, || {
            let problem = resolve_problem(&a.problem)?;
            let dim = a.problem.n;
            Ok(RunConfig {
                command: Command::Simulate,
                problem,
                grid: resolve_grid(Some(&a.grid), true),
                sim: Some(SimSpec {
                    horizon: a.horizon,
                    dt: a.dt,
                    n_paths: a.paths,
                    seed: a.seed,
                    y0: a.y0.clone().unwrap_or_else(|| vec![1.0; dim]),
                    probes: a.probes,
                    scalings: a.scalings.clone(),
                }),
                probe_radii: None,
                out: out(&a.io),
            })
        }),
        Cmd::Verify(io) => load_or_resolve(Command::Verify, io, || {
            Ok(RunConfig {
                command: Command::Verify,
                problem: ProblemSpec::Model {
                    dim: 3,
                    sigma: vec![1.0; 3],
                    alpha: 1.0,
                    u0: 1.0,
                },
                grid: GridSpec {
                    r_max: 1.0,
                    n_grid: 4001,
                    ..resolve_grid(None, false)
                },
                sim: None,
                probe_radii: None,
                out: out(io),
            })
        }),
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match resolve(&cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Err(io) = write_report(&cfg, e.status(), None, Some(e.to_string())) {
                eprintln!("error: could not write the diagnostic report: {io}");
            }
            e.exit_code()
        }
    }
}

fn write_report(
    cfg: &RunConfig,
    status: &str,
    result: Option<Value>,
    error: Option<String>,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("config.json"), cfg.to_json() + "\n")?;
    let report = json!({
        "command": cfg.command.as_str(),
        "status": status,
        "config_hash": cfg.hash(),
        "config": cfg,
        "result": result,
        "error": error,
    });
    let path = cfg.out.join(format!("{}.json", cfg.command.as_str()));
    fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(path)
}

fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn execute(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.command {
        Command::Solve => cmd_solve(cfg),
        Command::Classify => cmd_classify(cfg),
        Command::Model => cmd_model(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

fn validated_problem(cfg: &RunConfig) -> Result<(RadialProblem, Value), CliError> {
    let problem = cfg.problem()?;
    let report = problem.validate(cfg.grid.r_max, 2001)?;
    report.require()?;
    Ok((problem, serde_json::to_value(&report)?))
}

fn solve_converged(problem: &RadialProblem, cfg: &RunConfig) -> Result<RadialSolution, CliError> {
    let sol = picard_solve(problem, &cfg.grid.to_grid_config())?;
    if !sol.converged {
        fs::create_dir_all(&cfg.out)?;
        write_columns(
            &cfg.out.join("solution.csv"),
            &["r", "u", "du"],
            &[&sol.grid, &sol.u, &sol.du],
        )?;
        return Err(CliError::Numeric(format!(
            "Picard iteration did not converge in {} iterations",
            sol.iterations
        )));
    }
    Ok(sol)
}

fn bounds_value(problem: &RadialProblem, sol: &RadialSolution) -> Result<Value, CliError> {
    let ht = HTransform::new(problem.pair().clone(), problem.u0())?;
    Ok(serde_json::to_value(check_bounds(problem, sol, &ht)?)?)
}

fn cmd_solve(cfg: &RunConfig) -> Result<i32, CliError> {
    let (problem, validation) = validated_problem(cfg)?;
    let sol = solve_converged(&problem, cfg)?;
    let oracle_gap = ode_oracle(&problem, &cfg.grid.to_grid_config())
        .map(|o| sol.sup_distance(&o))
        .ok();
    fs::create_dir_all(&cfg.out)?;
    write_columns(
        &cfg.out.join("solution.csv"),
        &["r", "u", "du"],
        &[&sol.grid, &sol.u, &sol.du],
    )?;
    let n = sol.len();
    let result = json!({
        "solution_csv": "solution.csv",
        "iterations": sol.iterations,
        "converged": sol.converged,
        "n_points": n,
        "r_max": sol.r_max(),
        "u_end": sol.u[n - 1],
        "du_end": sol.du[n - 1],
        "oracle_sup_gap": oracle_gap,
        "ode_residual": residual(&problem, &sol),
        "bounds": bounds_value(&problem, &sol)?,
        "validation": validation,
    });
    write_report(cfg, "ok", Some(result), None)?;
    Ok(EXIT_OK)
}

fn cmd_classify(cfg: &RunConfig) -> Result<i32, CliError> {
    let (problem, validation) = validated_problem(cfg)?;
    let probes = cfg.probe_radii.clone().unwrap_or_else(default_probes);
    let report = classify(&problem, &probes)?;
    let limit = if problem.dim() >= 3 {
        match limit_identity(&problem, &probes) {
            Ok(li) => serde_json::to_value(li)?,
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let result = json!({
        "classification": report.classification,
        "p_bar_estimate": report.p_bar_estimate,
        "p_under_estimate": report.p_under_estimate,
        "p_bar_finite": report.p_bar_estimate.is_finite(),
        "p_under_finite": report.p_under_estimate.is_finite(),
        "report": report,
        "limit_identity": limit,
        "validation": validation,
    });
    write_report(cfg, "ok", Some(result), None)?;
    Ok(EXIT_OK)
}

fn cmd_model(cfg: &RunConfig) -> Result<i32, CliError> {
    let (model, problem) = cfg.model()?;
    let sol = solve_converged(&problem, cfg)?;
    let r_max = sol.r_max();
    let n = sol.len();
    let bounds_ht = HTransform::new(problem.pair().clone(), problem.u0())?;
    let bounds = check_bounds(&problem, &sol, &bounds_ht)?;
    let field = PolicyField::new(model.clone(), sol.clone())?;
    let hjb = hjb_residual_profile(&field);
    let transfer = bound_transfer(&field, &bounds);
    let convexity = check_convexity(&problem, &sol);
    let classification = classify(&problem, &default_probes())?;

    let s2 = model.sigma_sq();
    let z: Vec<f64> = sol.u.iter().map(|u| -2.0 * s2 * u.ln()).collect();
    let dz: Vec<f64> = sol
        .u
        .iter()
        .zip(&sol.du)
        .map(|(u, du)| -2.0 * s2 * du / u)
        .collect();
    let rate: Vec<f64> = dz.iter().map(|d| (-0.5 * d).max(0.0)).collect();
    fs::create_dir_all(&cfg.out)?;
    write_columns(
        &cfg.out.join("solution.csv"),
        &["r", "u", "du"],
        &[&sol.grid, &sol.u, &sol.du],
    )?;
    write_columns(
        &cfg.out.join("value.csv"),
        &["r", "z", "dz", "radial_rate", "hjb_residual"],
        &[&sol.grid, &z, &dz, &rate, &hjb.residuals],
    )?;

    let u_end = sol.u[n - 1];
    let result = json!({
        "solution_csv": "solution.csv",
        "value_csv": "value.csv",
        "sigma_sq": s2,
        "a": problem.a().label(),
        "b": problem.b().eval(0.0),
        "iterations": sol.iterations,
        "u_end": u_end,
        "closed_forms": {
            "r": r_max,
            "p_bar": model.closed_p_bar(r_max)?,
            "p_under": model.closed_p_under(r_max)?,
            "h_of_u_end": model.closed_h(u_end)?,
            "h_of_u_end_quadrature": bounds_ht.eval(u_end)?,
            "upper_envelope": model.closed_h_inv(model.closed_p_bar(r_max)?).ok(),
        },
        "hjb_residual": { "max": hjb.max, "mean": hjb.mean },
        "bounds": bounds,
        "bound_transfer": transfer,
        "convexity": convexity,
        "classification": classification.classification,
    });
    write_report(cfg, "ok", Some(result), None)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(cfg: &RunConfig) -> Result<i32, CliError> {
    let (model, problem) = cfg.model()?;
    let spec = cfg
        .sim
        .as_ref()
        .ok_or_else(|| CliError::Usage("simulate config has no `sim` section".into()))?;
    let sim_cfg = spec.to_sim_config();
    let sol = solve_converged(&problem, cfg)?;
    let field = PolicyField::new(model.clone(), sol)?;
    let dynamics = Dynamics::from(&model);
    let ensemble = simulate_paths(
        &ScaledPolicy {
            field: &field,
            scale: 1.0,
        },
        &dynamics,
        &sim_cfg,
    )?;
    let cost = discounted_cost(&ensemble);
    let series = transversality_check(&field, &ensemble, &ensemble.probe_times.clone())?;
    let table = compare_policies(&field, &sim_cfg, &spec.scalings)?;
    if !cost.valid || !table.all_valid() {
        eprintln!(
            "warning: more than 1% of paths left the radial grid (r_max = {}); estimates flagged invalid",
            field.r_max()
        );
    }
    let result = json!({
        "cost_mean": cost.mean,
        "cost_stderr": cost.stderr,
        "truncation_bound": cost.truncation_bound,
        "valid": cost.valid,
        "optimal_policy_cost": cost,
        "transversality": {
            "series": series.times.iter().zip(&series.estimates).map(|(t, v)| json!([t, v])).collect::<Vec<_>>(),
            "counts": series.counts,
            "final_over_max": series.final_over_max(),
            "truncated_fraction": series.truncated_fraction,
        },
        "per_policy": table.rows,
        "value_at_y0": field.value_function(&spec.y0).ok(),
    });
    write_report(cfg, "ok", Some(result), None)?;
    Ok(EXIT_OK)
}

fn cmd_verify(cfg: &RunConfig) -> Result<i32, CliError> {
    let mut checks = Vec::new();
    let mut check = |name: &str, value: f64, threshold: f64| {
        checks.push(json!({ "check": name, "value": value, "threshold": threshold, "pass": value <= threshold }));
    };

    let (model, problem) = cfg.model()?;
    let grid = cfg.grid.to_grid_config();
    let picard = picard_solve(&problem, &grid)?;
    check(
        "picard_vs_rk4_sup_gap",
        picard.sup_distance(&ode_oracle(&problem, &grid)?),
        1e-5,
    );

    let linear = RadialProblem::new(
        3,
        Coefficient::constant(1.0),
        Coefficient::zero(),
        NonlinearityPair::power(1.0, 1.0, 1.0)?,
        1.0,
    )?;
    let mut sinh_grid = grid;
    sinh_grid.r_max = 2.0;
    let lin = picard_solve(&linear, &sinh_grid)?;
    let sinh_err = lin
        .grid
        .iter()
        .zip(&lin.u)
        .map(|(r, u)| (u - if *r == 0.0 { 1.0 } else { r.sinh() / r }).abs())
        .fold(0.0, f64::max);
    check("sinh_max_error", sinh_err, 1e-6);

    let ht = HTransform::new(problem.pair().clone(), 1.0)?;
    check(
        "h_of_e_vs_ln2",
        (ht.eval(1f64.exp())? - 2f64.ln()).abs(),
        1e-10,
    );
    check(
        "p_bar_1_vs_7_over_60",
        (radplan_core::analysis::p_bar(&problem, 1.0)? - 7.0 / 60.0).abs(),
        1e-10,
    );

    let decay = RadialProblem::new(
        3,
        Coefficient::new("exp(-r)", |r| (-r).exp()),
        Coefficient::zero(),
        NonlinearityPair::model_log(),
        1.0,
    )?;
    let li = limit_identity(&decay, &decade_probes(0, 12))?;
    check(
        "limit_identity_gap",
        (li.lhs - 1.0).abs().max((li.rhs - 1.0).abs()),
        1e-6,
    );

    let (_, hjb_problem) = radplan_core::planning::build_model(3, &[1.0; 3], 1.0, 1.0)?;
    let hjb_sol = picard_solve(&hjb_problem, &sinh_grid)?;
    let hjb = hjb_residual_profile(&PolicyField::new(model, hjb_sol)?);
    check("hjb_residual_max", hjb.max, 1e-3);

    let all = checks.iter().all(|c| c["pass"] == json!(true));
    write_report(
        cfg,
        if all { "ok" } else { "numeric-failure" },
        Some(json!({ "checks": checks, "all_pass": all })),
        None,
    )?;
    Ok(if all { EXIT_OK } else { EXIT_NUMERIC })
}
