//! Command-line front end.

use std::any::Any;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use monosched_core::error::Error;
use monosched_core::instance::{Instance, JobPool, Params};
use monosched_core::mechanism::{graph_for, payment, DEFAULT_MAX_STEPS};
use monosched_core::numerics::{parse_rational, Rational};
use monosched_core::solver::{ptas, Schedule};
use monosched_core::verify::generate::{rng_for, sample};
use rayon::prelude::*;
use serde_json::json;

use crate::io::{read_instance, InputError, Parsed};
use crate::report::{solve_report, suite_lines, PaymentRow, PaymentsReport};
use crate::suites::{self, Suite};

#[derive(Parser, Debug)]
#[command(name = "monosched", version, about = "Monotone approximation scheme for scheduling on related machines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance and print the allocation report.
    Solve(SolveArgs),
    /// Run a verification suite; exits 1 on any failed trial.
    Verify(SuiteArgs),
    /// Work, payment and utility at the true speed for every machine.
    Payments(PaymentsArgs),
    /// Run the monotonicity suite; exits 1 on any failed trial.
    Monotonicity(SuiteArgs),
    /// Write a random instance drawn with the suite generator.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Overrides {
    /// Accuracy parameter, a rational in (0, 1].
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<Rational>,
    /// Extension degree; rounding uses powers of 2^(1/t).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: Option<u32>,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Add decimal approximations next to the rational strings.
    #[arg(long)]
    pub float: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub out: Output,
    /// Include visited vertices per layer and the configuration path.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Suite to run (`verify` only).
    #[arg(long, value_enum, default_value = "checks")]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of trials; the exhaustive suite runs in full when omitted.
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub out: Output,
    /// Worker threads; never changes the report.
    #[arg(long, env = "SCHED_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Args, Debug)]
pub struct PaymentsArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub out: Output,
    /// Cap on work-curve steps per machine.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    #[arg(long, env = "SCHED_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Draw the instance of this trial index.
    #[arg(long, default_value_t = 0)]
    pub index: u64,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_epsilon(s: &str) -> Result<Rational, String> {
    let e = parse_rational(s).map_err(|e| e.to_string())?;
    Params::new(e.clone(), 1).map_err(|e| e.to_string())?;
    Ok(e)
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Outcome {
    Ok,
    Violations(usize),
    Input(String),
    Internal { message: String, bundle: serde_json::Value },
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violations(_) => 1,
            Outcome::Input(_) => 2,
            Outcome::Internal { .. } => 3,
        }
    }
}

impl From<InputError> for Outcome {
    fn from(e: InputError) -> Self {
        Outcome::Input(e.to_string())
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Outcome> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Outcome::Input(format!("invalid `output`: {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_overrides(mut p: Parsed, o: &Overrides) -> Parsed {
    if let Some(e) = &o.epsilon {
        p.epsilon = e.clone();
    }
    if let Some(t) = o.t {
        p.t = t;
    }
    p
}

fn core_error(e: Error, input: &Parsed, command: &str) -> Outcome {
    match e {
        Error::InvalidParameter { field, reason } | Error::InvalidInstance { field, reason } => {
            Outcome::Input(format!("invalid `{field}`: {reason}"))
        }
        Error::Parse(m) => Outcome::Input(m),
        other => Outcome::Internal {
            message: other.to_string(),
            bundle: json!({
                "command": command,
                "instance": input.to_file(),
                "error": other.to_string(),
            }),
        },
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_solve(a: &SolveArgs) -> Result<(), Outcome> {
    let input = with_overrides(read_instance(&a.instance)?, &a.overrides);
    let inst = Instance::new(&input.jobs, &input.speeds, input.epsilon.clone(), input.t).map_err(|e| core_error(e, &input, "solve"))?;
    let sched = ptas(&inst).map_err(|e| core_error(e, &input, "solve"))?;
    let report = solve_report(&input, &sched, &inst.pool, a.out.float, a.trace);
    emit(a.out.output.as_deref(), &to_json(&report))
}

pub fn cmd_payments(a: &PaymentsArgs) -> Result<(), Outcome> {
    let input = with_overrides(read_instance(&a.instance)?, &a.overrides);
    let params = Params::new(input.epsilon.clone(), input.t).map_err(|e| core_error(e, &input, "payments"))?;
    let pool = Arc::new(JobPool::new(&input.jobs, params).map_err(|e| core_error(e, &input, "payments"))?);
    let g = graph_for(&pool, input.speeds.len());
    let rows: Vec<Result<PaymentRow, Error>> = suites::thread_pool(a.threads).install(|| {
        (0..input.speeds.len())
            .into_par_iter()
            .map(|i| {
                let speed = &input.speeds[i];
                if speed == &Rational::from_integer(0.into()) {
                    let z = Rational::from_integer(0.into());
                    return Ok(PaymentRow::new(i, speed, &z, &z, &z, a.out.float));
                }
                let r = payment(&pool, &input.speeds, i, &g, a.max_steps)?;
                let utility = &r.payment - &r.work_at_bid / speed;
                Ok(PaymentRow::new(i, speed, &r.work_at_bid, &r.payment, &utility, a.out.float))
            })
            .collect()
    });
    let machines = rows.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| core_error(e, &input, "payments"))?;
    let report = PaymentsReport {
        epsilon: monosched_core::numerics::format_rational(&input.epsilon),
        t: input.t,
        machines,
    };
    emit(a.out.output.as_deref(), &to_json(&report))
}

/// Moves every job onto machine 0, for harness sanity checks.
fn pile_onto_first(s: &mut Schedule) {
    let all: Vec<usize> = s.assignment.iter().flatten().copied().collect();
    let total: Rational = s.workloads.iter().sum();
    for (i, set) in s.assignment.iter_mut().enumerate() {
        *set = if i == 0 { all.clone() } else { Vec::new() };
    }
    for (i, w) in s.workloads.iter_mut().enumerate() {
        *w = if i == 0 { total.clone() } else { Rational::from_integer(0.into()) };
    }
}

pub fn cmd_suite(a: &SuiteArgs, suite: Suite) -> Result<(), Outcome> {
    let shape = suites::shape(a.overrides.epsilon.as_ref(), a.overrides.t);
    let pool = suites::thread_pool(a.threads);
    let tamper = a.inject_fault.then_some(pile_onto_first as fn(&mut Schedule));
    let records = suites::run(suite, &shape, a.seed, a.trials, &pool, tamper);
    emit(a.out.output.as_deref(), &suite_lines(suite.name(), &records, a.out.float))?;
    let failed = records.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        eprintln!("{failed} of {} trials failed", records.len());
        return Err(Outcome::Violations(failed));
    }
    Ok(())
}

pub fn cmd_gen(a: &GenArgs) -> Result<(), Outcome> {
    let shape = suites::shape(a.overrides.epsilon.as_ref(), a.overrides.t);
    let s = sample(&mut rng_for(a.seed, a.index), &shape);
    emit(a.output.as_deref(), &to_json(&Parsed::from(&s).to_file()))
}

pub fn run(cli: &Cli) -> Result<(), Outcome> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_suite(a, a.suite),
        Command::Payments(a) => cmd_payments(a),
        Command::Monotonicity(a) => cmd_suite(a, Suite::Monotonicity),
        Command::Gen(a) => cmd_gen(a),
    }
}

fn panic_message(p: &(dyn Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn report_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Solve(a) => a.out.output.as_deref(),
        Command::Verify(a) | Command::Monotonicity(a) => a.out.output.as_deref(),
        Command::Payments(a) => a.out.output.as_deref(),
        Command::Gen(a) => a.output.as_deref(),
    }
}

/// Writes the reproduction bundle beside the report, or to stderr without one.
fn write_bundle(cli: &Cli, bundle: &serde_json::Value) {
    let text = to_json(bundle);
    if let Some(p) = report_path(cli) {
        let mut name = p.as_os_str().to_owned();
        name.push(".repro.json");
        if fs::write(&name, &text).is_ok() {
            eprintln!("reproduction bundle written to {}", Path::new(&name).display());
            return;
        }
    }
    eprint!("reproduction bundle:\n{text}");
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let outcome = match panic::catch_unwind(AssertUnwindSafe(|| run(&cli))) {
        Ok(Ok(())) => Outcome::Ok,
        Ok(Err(o)) => o,
        Err(p) => {
            let message = panic_message(&*p);
            Outcome::Internal {
                bundle: json!({ "argv": argv, "error": message }),
                message,
            }
        }
    };
    match &outcome {
        Outcome::Ok | Outcome::Violations(_) => {}
        Outcome::Input(m) => eprintln!("error: {m}"),
        Outcome::Internal { message, bundle } => {
            eprintln!("internal error: {message}");
            let mut bundle = bundle.clone();
            bundle["argv"] = json!(argv);
            write_bundle(&cli, &bundle);
        }
    }
    ExitCode::from(outcome.code())
}
