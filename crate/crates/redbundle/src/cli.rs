//! Command-line front end.
//!
//! Three subcommands share a configuration pipeline (file + flag overrides,
//! see [`crate::config`]):
//!
//! - `simulate` integrates the extended dynamics on the configured chart and
//!   writes a CSV trajectory (coordinate columns plus the momentum `J`).
//! - `reduce` integrates the full flow from a level-set initial state and
//!   the reduced flow from its projection, writes both trajectories as CSVs
//!   on the reduced chart, and emits a JSON report with their sup-norm
//!   discrepancy.
//! - `verify` runs the randomized structure-identity suites and emits a
//!   JSON [`VerificationReport`].
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 usage or
//! configuration error, 3 precondition or numerical failure. Human-readable
//! progress goes to stderr; machine output goes to `--out`/`--report` files
//! or stdout.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{env_tolerance_scale, ChartChoice, ModelChoice, Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::{Chart, FdConfig, ScalarField};
use crate::integrate::integrate;
use crate::scalar::inf_norm_diff;
use crate::verify::{run_heavytop, run_oscillator, Tolerances, VerifyOptions};

#[derive(Parser, Debug)]
#[command(
    name = "redbundle",
    version,
    about = "Time-dependent Hamiltonian mechanics on principal line bundles: \
             simulation, symmetry reduction, and structure verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the extended dynamics and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Integrate full and reduced flows from a level-set state and report
    /// their discrepancy.
    Reduce(ReduceArgs),
    /// Run randomized structure-identity suites and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Model: oscillator | heavytop.
    #[arg(long)]
    model: Option<String>,
    /// Flat key-value configuration file (TOML syntax; unknown keys are
    /// rejected).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Integrator: rk4 | midpoint.
    #[arg(long)]
    integrator: Option<String>,
    /// Start time.
    #[arg(long)]
    t0: Option<f64>,
    /// End time.
    #[arg(long)]
    t1: Option<f64>,
    /// Fixed step size (must be positive).
    #[arg(long)]
    dt: Option<f64>,
    /// Momentum level for reduction and the magnetic suite.
    #[arg(long)]
    nu: Option<f64>,
    /// Seed for every randomized suite.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count per verification check.
    #[arg(long)]
    samples: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self, suite: Option<&str>) -> Overrides {
        Overrides {
            model: self.model.clone(),
            integrator: self.integrator.clone(),
            t0: self.t0,
            t1: self.t1,
            dt: self.dt,
            nu: self.nu,
            seed: self.seed,
            samples: self.samples,
            suite: suite.map(str::to_string),
        }
    }

    fn resolve(&self, suite: Option<&str>) -> Result<RunConfig> {
        RunConfig::resolve(self.config.as_deref(), &self.overrides(suite))
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trajectory CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Base path for the two trajectory CSVs; `X.csv` becomes
    /// `X_full.csv` (projected full flow) and `X_reduced.csv`.
    #[arg(long)]
    out: PathBuf,
    /// JSON consistency-report path (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Check suite: all | bracket | cosymplectic | momentum | reduction |
    /// magnetic.
    #[arg(long)]
    suite: Option<String>,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Deliberately break the structure 2-form first; the suites must fail.
    #[arg(long)]
    corrupt_omega: bool,
}

/// Parse arguments from the process environment and run. Returns the process
/// exit code. Argument-syntax errors exit directly through clap with code 2.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let cfg = args.common.resolve(None)?;
    match cfg.model {
        ModelChoice::Oscillator => {
            let model = cfg.build_oscillator()?;
            match cfg.chart {
                ChartChoice::Polar => {
                    let c = model.polar::<f64>()?;
                    let rhs = model.polar_extended_rhs::<f64>();
                    simulate_to_csv(&cfg, &args.out, c.bundle.total_chart(), &rhs, c.momentum.total())
                }
                _ => {
                    let c = model.cartesian::<f64>()?;
                    let rhs = model.cartesian_extended_rhs::<f64>();
                    simulate_to_csv(&cfg, &args.out, c.bundle.total_chart(), &rhs, c.momentum.total())
                }
            }
        }
        ModelChoice::HeavyTop => {
            let model = cfg.build_heavytop()?;
            let c = model.euler::<f64>()?;
            let rhs = model.euler_extended_rhs::<f64>()?;
            simulate_to_csv(&cfg, &args.out, c.bundle.total_chart(), &rhs, c.momentum.total())
        }
    }
}

fn simulate_to_csv(
    cfg: &RunConfig,
    out: &Path,
    chart: &Chart,
    rhs: &dyn Fn(&[f64]) -> Vec<f64>,
    momentum: &ScalarField<f64>,
) -> Result<i32> {
    let y0 = cfg.initial_state(chart.dim())?;
    let traj = integrate(cfg.integrator, rhs, &y0, cfg.dt, cfg.nsteps(), None)?;

    let mut header: Vec<String> = chart.coords().iter().map(|s| s.to_string()).collect();
    header.push("J".to_string());
    let j0 = momentum.eval(&y0);
    let mut j_drift = 0.0f64;
    let mut rows = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        let j = momentum.eval(state);
        j_drift = j_drift.max((j - j0).abs());
        let mut row = state.clone();
        row.push(j);
        rows.push(row);
    }
    write_csv(out, &header, &rows)?;
    eprintln!(
        "wrote {} rows to {}; momentum drift |ΔJ| ≤ {:.3e}",
        rows.len(),
        out.display(),
        j_drift
    );
    Ok(0)
}

// ---------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------

/// Machine-readable outcome of a `reduce` run: the sup-norm discrepancy
/// between the chart-projected full trajectory and the reduced trajectory.
#[derive(Debug, Serialize)]
struct ReduceReport {
    model: String,
    nu: f64,
    integrator: String,
    dt: f64,
    steps: usize,
    level_residual: f64,
    discrepancy: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_reduce(args: ReduceArgs) -> Result<i32> {
    let cfg = args.common.resolve(None)?;
    let tol = 1e-5 * cfg.tolerance_scale * env_tolerance_scale()?;
    let nsteps = cfg.nsteps();

    let (chart, level_residual, projected, reduced) = match cfg.model {
        ModelChoice::Oscillator => {
            let model = cfg.build_oscillator()?;
            let polar = model.polar::<f64>()?;
            let red = model.reduced::<f64>(cfg.nu)?;
            let y0 = cfg.cyclic_initial_state(polar.bundle.total_chart().dim())?;
            let lev = check_level(red.reduction.level_residual(&y0))?;

            let full_rhs = model.polar_extended_rhs::<f64>();
            let full = integrate(cfg.integrator, &full_rhs, &y0, cfg.dt, nsteps, None)?;
            let red_rhs = model.reduced_extended_rhs::<f64>(cfg.nu);
            let z0 = red.reduction.project_total(&y0);
            let red_traj = integrate(cfg.integrator, &red_rhs, &z0, cfg.dt, nsteps, None)?;

            let projected: Vec<Vec<f64>> = full
                .states
                .iter()
                .map(|a| red.reduction.project_total(a))
                .collect();
            let chart = red.reduction.reduced().total_chart().clone();
            (chart, lev, projected, red_traj.states)
        }
        ModelChoice::HeavyTop => {
            let model = cfg.build_heavytop()?;
            let euler = model.euler::<f64>()?;
            let (reduction, red_section) = model.euler_reduction::<f64>(cfg.nu)?;
            let y0 = cfg.cyclic_initial_state(euler.bundle.total_chart().dim())?;
            let lev = check_level(reduction.level_residual(&y0))?;

            let full_rhs = model.euler_extended_rhs::<f64>()?;
            let full = integrate(cfg.integrator, &full_rhs, &y0, cfg.dt, nsteps, None)?;
            let fd = FdConfig::<f64>::default();
            let red_rhs = move |y: &[f64]| {
                red_section
                    .dynamics_at(y, &fd)
                    .unwrap_or_else(|_| vec![f64::NAN; y.len()])
            };
            let z0 = reduction.project_total(&y0);
            let red_traj = integrate(cfg.integrator, &red_rhs, &z0, cfg.dt, nsteps, None)?;

            let projected: Vec<Vec<f64>> = full
                .states
                .iter()
                .map(|a| reduction.project_total(a))
                .collect();
            let chart = reduction.reduced().total_chart().clone();
            (chart, lev, projected, red_traj.states)
        }
    };

    let mut discrepancy = 0.0f64;
    for (a, b) in projected.iter().zip(&reduced) {
        discrepancy = discrepancy.max(inf_norm_diff(a, b));
    }

    let header: Vec<String> = chart.coords().iter().map(|s| s.to_string()).collect();
    let full_path = sibling(&args.out, "full");
    let reduced_path = sibling(&args.out, "reduced");
    write_csv(&full_path, &header, &projected)?;
    write_csv(&reduced_path, &header, &reduced)?;

    let report = ReduceReport {
        model: cfg.model.to_string(),
        nu: cfg.nu,
        integrator: cfg.integrator.to_string(),
        dt: cfg.dt,
        steps: nsteps,
        level_residual,
        discrepancy,
        tolerance: tol,
        pass: discrepancy <= tol,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    match &args.report {
        Some(p) => std::fs::write(p, &json)?,
        None => print!("{json}"),
    }
    eprintln!(
        "wrote {} and {}; sup-discrepancy {:.3e} (tolerance {:.3e})",
        full_path.display(),
        reduced_path.display(),
        discrepancy,
        tol
    );
    Ok(if report.pass { 0 } else { 1 })
}

fn check_level(lev: f64) -> Result<f64> {
    if !(lev <= 1e-9) {
        return Err(Error::Precondition(format!(
            "initial state is off the momentum level: |J − ν| = {lev:.3e} > 1e-9; \
             set the cyclic momentum entry of `init` to nu"
        )));
    }
    Ok(lev)
}

/// `X.csv` → `X_tag.csv`, keeping the directory.
fn sibling(out: &Path, tag: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trajectory");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_{tag}.{ext}"))
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let cfg = args.common.resolve(args.suite.as_deref())?;
    let opts = VerifyOptions {
        suite: cfg.suite,
        seed: cfg.seed,
        samples: cfg.samples,
        nu: cfg.nu,
        tols: Tolerances::default(),
        tolerance_scale: cfg.tolerance_scale * env_tolerance_scale()?,
        corrupt_omega: args.corrupt_omega,
        config_hash: cfg.hash(),
    };
    let report = match cfg.model {
        ModelChoice::Oscillator => run_oscillator(&cfg.build_oscillator()?, &opts)?,
        ModelChoice::HeavyTop => run_heavytop(&cfg.build_heavytop()?, &opts)?,
    };
    eprint!("{}", report.render_text());
    let json = report.to_json();
    match &args.report {
        Some(p) => std::fs::write(p, &json)?,
        None => print!("{json}"),
    }
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------
// output
// ---------------------------------------------------------------------

/// CSV in full round-trip precision: scientific notation with `.` decimal
/// separator regardless of locale.
fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * header.len() * 12);
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                text.push(',');
            }
            text.push_str(&format!("{v:e}"));
            first = false;
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_paths_keep_directory_and_extension() {
        let p = sibling(Path::new("/tmp/run/traj.csv"), "full");
        assert_eq!(p, Path::new("/tmp/run/traj_full.csv"));
        let q = sibling(Path::new("out"), "reduced");
        assert_eq!(q, Path::new("out_reduced.csv"));
    }

    #[test]
    fn exit_codes_follow_the_contract()  {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Precondition("x".into())), 3);
        assert_eq!(exit_code(&Error::NoConvergence { max_iters: 3 }), 3);
    }

    #[test]
    fn csv_numbers_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let values = vec![vec![0.1, -3.25e-17, 12345.678901234567]];
        write_csv(&path, &["a".into(), "b".into(), "c".into()], &values).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a,b,c");
        let parsed: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(parsed, values[0]);
    }

    #[test]
    fn argument_parsing_accepts_the_documented_flags() {
        let cli = Cli::try_parse_from([
            "redbundle", "verify", "--model", "oscillator", "--suite", "bracket",
            "--seed", "7", "--samples", "50", "--nu", "1.0", "--corrupt-omega",
        ])
        .unwrap();
        match cli.command {
            Command::Verify(v) => {
                assert_eq!(v.common.model.as_deref(), Some("oscillator"));
                assert_eq!(v.suite.as_deref(), Some("bracket"));
                assert!(v.corrupt_omega);
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from([
            "redbundle", "simulate", "--model", "oscillator", "--dt", "1e-3",
            "--t1", "10", "--out", "x.csv", "--integrator", "midpoint",
        ])
        .unwrap();
        match cli.command {
            Command::Simulate(s) => assert_eq!(s.out, PathBuf::from("x.csv")),
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["redbundle", "simulate", "--model", "x"]).is_err());
    }
}
