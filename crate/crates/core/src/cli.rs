//! Command-line interface. [`main`] parses arguments, runs one subcommand
//! and returns the process exit code: 0 on success, 1 on invalid input or
//! usage, 2 on any other failure (including a verification suite with
//! failing trials).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construction::{self, build, plan, ConstructionPlan, Family};
use crate::engine::{brute_force_pareto, merge_pareto};
use crate::error::{Error, Result};
use crate::harness::{self, Grid, OutputFormat};
use crate::model::KnapsackInstance;
use crate::rational::Rational;
use crate::sampler::{sample_instance, SampleSeed};
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "knapsack-pareto", version, about = "Lower-bound knapsack instances and exact Pareto-set counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the construction plan as JSON.
    Plan(PlanArgs),
    /// Print the unsampled instance as JSON.
    Build(PlanArgs),
    /// Print a realized instance as JSON.
    Sample {
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Count the Pareto set; optionally list it as JSON lines.
    Enumerate(EnumerateArgs),
    /// Run one of the structural verification suites.
    Verify(VerifyArgs),
    /// Run a Monte Carlo experiment over a parameter grid.
    Experiment(ExperimentArgs),
    /// Fit a log-log growth exponent to a CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct PlanArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, value_parser = parse_count)]
    n: u64,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    d: u64,
    #[arg(long, value_parser = parse_rational, default_value = "1")]
    phi: Rational,
}

impl PlanArgs {
    fn plan(&self) -> Result<ConstructionPlan> {
        plan(self.family, self.n, self.d, &self.phi)
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct SeedArgs {
    #[arg(long, value_parser = parse_count, default_value = "0")]
    seed: u64,
    #[arg(long, value_parser = parse_count, default_value = "0")]
    trial: u64,
}

impl SeedArgs {
    fn sample_seed(&self) -> SampleSeed {
        SampleSeed::new(self.seed, self.trial)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Engine {
    Merge,
    Brute,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    /// Instance JSON; sampled first if it carries no profits.
    #[arg(long, conflicts_with_all = ["family", "n", "d", "phi"])]
    instance: Option<PathBuf>,
    #[arg(long, value_parser = parse_family, required_unless_present = "instance")]
    family: Option<Family>,
    #[arg(long, value_parser = parse_count, required_unless_present = "instance")]
    n: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    d: Option<u64>,
    #[arg(long, value_parser = parse_rational)]
    phi: Option<Rational>,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value = "merge")]
    engine: Engine,
    /// Also print every Pareto-optimal solution.
    #[arg(long)]
    set: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Doubling,
    AllParetoMulti,
    Budget,
    Interval,
    MFormula,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, value_parser = parse_count)]
    np: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    nq: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    n: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    d: Option<u64>,
    #[arg(long, value_parser = parse_rational)]
    phi: Option<Rational>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    /// Largest index for the m-formula suite.
    #[arg(long, value_parser = parse_count, default_value = "20")]
    max_i: u64,
    #[arg(long, value_parser = parse_count, default_value = "100")]
    trials: u64,
    #[arg(long, value_parser = parse_count, default_value = "0")]
    seed: u64,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// For example `n=6..16;d=1;phi=3,5/2`.
    #[arg(long)]
    grid: String,
    #[arg(long, value_parser = parse_count, default_value = "100")]
    trials: u64,
    #[arg(long, value_parser = parse_count, default_value = "0")]
    seed: u64,
    /// Output file; the summary goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    format: OutputFormat,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Non-negative integer, also written as an integral rational or decimal.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let r = parse_rational(s)?;
    if !r.is_integer() || r < Rational::zero() {
        return Err(format!("expected a non-negative integer, got {s:?}"));
    }
    r.numer().to_string().parse().map_err(|_| format!("{s:?} does not fit in 64 bits"))
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Plan(args) => {
            let plan = args.plan()?;
            emit(out, &plan.to_json()?)?;
        }
        Command::Build(args) => {
            let instance = build(&args.plan()?)?;
            emit(out, &instance.to_json()?)?;
        }
        Command::Sample { plan, seed } => {
            let instance = sample_instance(&build(&plan.plan()?)?, seed.sample_seed())?;
            emit(out, &instance.to_json()?)?;
        }
        Command::Enumerate(args) => enumerate(args, out)?,
        Command::Verify(args) => {
            let (passed, total) = run_suite(&args)?;
            emit(out, &format!("{passed}/{total} passed"))?;
            return Ok(if passed == total { 0 } else { 2 });
        }
        Command::Experiment(args) => {
            let grid: Grid = args.grid.parse()?;
            let summary = harness::run_experiment(args.family, &grid, args.trials, args.seed);
            match &args.out {
                Some(path) => harness::emit_results(&summary, path, args.format)?,
                None => match args.format {
                    OutputFormat::Csv => harness::write_csv(&summary.records, &mut *out)?,
                    OutputFormat::Json => emit(out, &serde_json::to_string_pretty(&summary)?)?,
                },
            }
        }
        Command::Fit { csv } => {
            let fit = harness::fit_growth(&harness::read_fit_points(&csv)?)?;
            emit(out, &serde_json::to_string(&fit)?)?;
        }
    }
    Ok(0)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

#[derive(Serialize)]
struct SetLine<'a> {
    solution: Vec<String>,
    weight: &'a Rational,
    profits: &'a [f64],
}

fn enumerate(args: EnumerateArgs, out: &mut dyn Write) -> Result<()> {
    let instance = match &args.instance {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            KnapsackInstance::from_json(&text)?
        }
        None => {
            let family = args.family.ok_or_else(|| Error::InvalidInput("--family is required".into()))?;
            let n = args.n.ok_or_else(|| Error::InvalidInput("--n is required".into()))?;
            let phi = args.phi.clone().unwrap_or_else(Rational::one);
            build(&plan(family, n, args.d.unwrap_or(1), &phi)?)?
        }
    };
    let realized = if instance.is_sampled() {
        instance
    } else {
        sample_instance(&instance, args.seed.sample_seed())?
    };
    let front = match args.engine {
        Engine::Merge => merge_pareto(&realized)?,
        Engine::Brute => brute_force_pareto(&realized)?,
    };
    emit(out, &serde_json::json!({ "count": front.count() }).to_string())?;
    if args.set {
        for (s, v) in &front.entries {
            let line = SetLine {
                solution: s.bitstrings(&realized),
                weight: &v.weight,
                profits: &v.profits,
            };
            emit(out, &serde_json::to_string(&line)?)?;
        }
    }
    Ok(())
}

fn need<T: Clone>(v: &Option<T>, flag: &str, suite: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::InvalidInput(format!("suite {suite} needs --{flag}")))
}

/// Returns `(passed, total)`.
fn run_suite(args: &VerifyArgs) -> Result<(u64, u64)> {
    let seeds = |trials: u64| (0..trials).map(move |t| SampleSeed::new(args.seed, t));
    let count = |checks: &mut dyn Iterator<Item = Result<bool>>| -> Result<(u64, u64)> {
        let mut passed = 0;
        let mut total = 0;
        for c in checks {
            total += 1;
            passed += c? as u64;
        }
        Ok((passed, total))
    };
    match args.suite {
        Suite::Doubling => {
            let n_p = need(&args.np, "np", "doubling")?;
            let phi = args.phi.clone().unwrap_or_else(Rational::one);
            count(&mut seeds(args.trials).map(|s| verify::verify_doubling(n_p, &phi, s)))
        }
        Suite::AllParetoMulti => {
            let d = need(&args.d, "d", "all-pareto-multi")?;
            let phi = need(&args.phi, "phi", "all-pareto-multi")?;
            let n_q = need(&args.nq, "nq", "all-pareto-multi")?;
            let plan = ConstructionPlan::multicriteria_fixed(d, &phi, n_q)?;
            count(&mut seeds(args.trials).map(|s| verify::verify_all_pareto_multi(&plan, s)))
        }
        Suite::Budget => {
            let family = args.family.unwrap_or(if args.d.is_some_and(|d| d >= 2) {
                Family::Multicriteria
            } else {
                Family::Bicriteria
            });
            let n = need(&args.n, "n", "budget")?;
            let phi = args.phi.clone().unwrap_or_else(Rational::one);
            let plan = plan(family, n, args.d.unwrap_or(1), &phi)?;
            count(&mut std::iter::once(verify::check_budget(&plan)))
        }
        Suite::Interval => {
            let phi = need(&args.phi, "phi", "interval")?;
            let plan = match (args.n, args.np, args.nq) {
                (Some(n), _, _) => construction::plan_bicriteria(n, &phi)?,
                (None, Some(n_p), Some(n_q)) => ConstructionPlan::bicriteria_fixed(n_p, &phi, n_q)?,
                _ => return Err(Error::InvalidInput("suite interval needs --n, or --np and --nq".into())),
            };
            let instance = build(&plan)?;
            count(&mut seeds(args.trials).map(|s| {
                let realized = sample_instance(&instance, s)?;
                verify::check_interval_separation(&plan, &realized)
            }))
        }
        Suite::MFormula => {
            let d = need(&args.d, "d", "m-formula")?;
            let phi = need(&args.phi, "phi", "m-formula")?;
            let max_i = u32::try_from(args.max_i)
                .map_err(|_| Error::InvalidInput(format!("--max-i {} is too large", args.max_i)))?;
            count(&mut std::iter::once(verify::check_m_formula(d, &phi, max_i)))
        }
    }
}
