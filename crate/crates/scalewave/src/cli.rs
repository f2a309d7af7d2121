//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;

use scalewave_core::analysis::{self, LogCorrection};
use scalewave_core::{model, odi, solver, verify, RunOutcome};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::io;
use crate::reports::{FitReport, OdiReport, VerifyReport};

#[derive(Debug, Parser)]
#[command(
    name = "scalewave",
    version,
    about = "Radial semilinear wave equation with scale-invariant damping and mass"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Config override `KEY=VALUE`, applied after the file.
    #[arg(long = "set", value_name = "K=V", global = true)]
    pub overrides: Vec<String>,
    /// Worker threads for `sweep`.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
    /// Seed for sampled test points and function families.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run; writes the sample series as CSV.
    Simulate,
    /// Runs over `p_values × amplitudes`; writes one CSV row per run.
    Sweep,
    /// Runs a numerical check suite; writes a JSON report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Comparison lemma toolkit for the configured ODI problem; writes JSON.
    Odi,
    /// Log-log decay fit of one column of a series CSV; writes JSON.
    DecayFit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "l2")]
        column: String,
        #[arg(long, value_enum, default_value_t = Correction::None)]
        correction: Correction,
    },
    /// Prints δ, the critical exponent, the regime flags and decay exponents.
    Info,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Inequalities,
    Bihari,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Correction {
    None,
    /// Divide by `1 + √log(1+t)`.
    Ell,
    /// Divide by `1 + √log((1+t)/(1+s))` with `s = initial_time`.
    EllShifted,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ =
        env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCALEWAVE_LOG", "error"))
            .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("scalewave: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let base = match &cli.config {
        Some(path) => Config::from_json(&std::fs::read_to_string(path)?)?,
        None => Config::default(),
    };
    base.with_overrides(&cli.overrides)
}

fn output(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(cli: &Cli, value: &T) -> Result<()> {
    let mut out = output(cli)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Simulate => simulate(cli, &cfg),
        Command::Sweep => sweep(cli, &cfg),
        Command::Verify { suite } => verify_suite(cli, &cfg, *suite),
        Command::Odi => odi_report(cli, &cfg),
        Command::DecayFit {
            input,
            column,
            correction,
        } => decay_fit(cli, &cfg, input, column, *correction),
        Command::Info => info_lines(cli, &cfg),
    }
}

fn simulate(cli: &Cli, cfg: &Config) -> Result<()> {
    let grid = cfg.grid()?;
    let run_cfg = cfg.run_config();
    let (u0, u1) = (cfg.u0(), cfg.u1());
    info!("simulate: {:?}, {} nodes", run_cfg.params, grid.len());
    let report = solver::run(&grid, |r| u0.eval(r), |r| u1.eval(r), &run_cfg)?;
    for w in &report.warnings {
        warn!("{w:?}");
    }
    info!(
        "outcome {:?} after {} steps of {}",
        report.outcome, report.steps, report.dt
    );
    let mut out = output(cli)?;
    io::write_samples(&report, &mut out)?;
    out.flush()?;
    match report.outcome {
        RunOutcome::Diverged { t } => Err(CliError::Diverged(t)),
        _ => Ok(()),
    }
}

fn sweep(cli: &Cli, cfg: &Config) -> Result<()> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let plan = cfg.sweep_plan();
    let cases = plan.cases();
    info!("sweep: {} cases on {} threads", cases.len(), cli.jobs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<_> = pool.install(|| {
        cases
            .par_iter()
            .map(|&(p, a)| analysis::sweep_row(&plan, p, a))
            .collect()
    });
    for r in rows.iter().filter(|r| r.error.is_some()) {
        warn!(
            "p = {}, amplitude = {}: {}",
            r.params.p,
            r.amplitude,
            r.error.as_deref().unwrap_or("")
        );
    }
    if !analysis::sweep_is_monotone(&rows) {
        warn!("sweep classification is not monotone in p");
    }
    let mut out = output(cli)?;
    io::write_sweep(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn verify_suite(cli: &Cli, cfg: &Config, suite: Suite) -> Result<()> {
    let report = match suite {
        Suite::Identities => VerifyReport::new(
            "identities",
            cli.seed,
            None,
            verify::identity_suite(cli.seed, cfg.psi_points, cfg.energy_points),
        ),
        Suite::Inequalities => {
            let params = cfg.params();
            let checks = verify::inequality_suite(&params, &cfg.sigmas, &cfg.times, cli.seed)?;
            VerifyReport::new("inequalities", cli.seed, Some(params), checks)
        }
        Suite::Bihari => VerifyReport::new(
            "bihari",
            cli.seed,
            None,
            verify::bihari_suite(cfg.bihari_samples, cfg.bihari_t_end)?,
        ),
    };
    for c in report.checks.iter().filter(|c| !c.pass) {
        warn!("{} failed: worst {} > {}", c.id, c.worst, c.tolerance);
    }
    write_json(cli, &report)
}

fn odi_report(cli: &Cli, cfg: &Config) -> Result<()> {
    let problem = cfg.odi_problem();
    let (comparison, solution) = odi::comparison_check(&problem, cfg.odi_dt)?;
    let report = OdiReport {
        problem,
        nu: solution.nu,
        nu_bounds: odi::nu_bounds(&problem),
        t0: solution.t0,
        blowup_time: solution.trajectory.blowup_time,
        comparison,
    };
    write_json(cli, &report)
}

fn decay_fit(
    cli: &Cli,
    cfg: &Config,
    input: &PathBuf,
    column: &str,
    correction: Correction,
) -> Result<()> {
    let series = io::read_series(File::open(input)?, column)?;
    let last = series
        .last()
        .map(|s| s.0)
        .ok_or_else(|| CliError::Usage("empty series".into()))?;
    let window = cfg
        .fit_window()
        .unwrap_or_else(|| analysis::default_window(last));
    let correction = match correction {
        Correction::None => LogCorrection::None,
        Correction::Ell => LogCorrection::Ell,
        Correction::EllShifted => LogCorrection::EllShifted {
            s: cfg.initial_time,
        },
    };
    let fit = analysis::fit_decay(&series, window, correction)?;
    let report = FitReport {
        input: input.display().to_string(),
        column: column.into(),
        correction,
        fit,
    };
    write_json(cli, &report)
}

fn info_lines(cli: &Cli, cfg: &Config) -> Result<()> {
    let params = cfg.params();
    params.validate()?;
    let regime = model::regime_check(&params);
    let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| v.to_string());
    let mut out = output(cli)?;
    writeln!(out, "n={}", params.n)?;
    writeln!(out, "mu1={}", params.mu1)?;
    writeln!(out, "mu2sq={}", params.mu2sq)?;
    writeln!(out, "p={}", params.p)?;
    writeln!(out, "delta={}", regime.delta)?;
    writeln!(out, "sqrt_delta={}", opt(regime.sqrt_delta))?;
    writeln!(
        out,
        "shifted_dimension={}",
        opt(params.shifted_dimension().ok())
    )?;
    writeln!(out, "p_crit={}", opt(regime.p_crit))?;
    writeln!(out, "log_borderline={}", params.is_log_borderline())?;
    writeln!(out, "thm22_applicable={}", regime.thm22_applicable)?;
    writeln!(out, "thm23_applicable={}", regime.thm23_applicable)?;
    if let Ok(table) = model::decay_exponents(&params) {
        writeln!(out, "l2_exponent={}", table.l2_exponent)?;
        writeln!(out, "grad_exponent={}", table.grad_exponent)?;
        writeln!(out, "log_correction={}", table.log_correction)?;
        writeln!(out, "kappa_threshold={}", table.kappa_threshold)?;
        writeln!(out, "initial_time_exponent={}", table.initial_time_exponent)?;
    }
    out.flush()?;
    Ok(())
}
