//! `sitcalc`: run scenarios against action theories, check theories,
//! cross-check the engine against the brute-force oracle, and print
//! closed-form Kalman updates.

mod output;
mod verify;

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sitcalc_core::engine::{run_scenario, RunOptions, ScenarioErrorKind};
use sitcalc_core::gaussian::{kalman_correct, kalman_predict, GaussianBelief};
use sitcalc_core::model::NumericMode;
use sitcalc_core::theory::{
    check_theory, parse_scenario, ActionTheory, ParseError, Scenario, Severity,
};

#[derive(Parser)]
#[command(
    name = "sitcalc",
    version,
    about = "Degrees of belief in noisy action theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write its belief trace.
    Run(RunArgs),
    /// Compare the engine with the brute-force oracle on a scenario.
    Verify(VerifyArgs),
    /// Report diagnostics for a theory.
    Check {
        #[arg(long)]
        theory: PathBuf,
    },
    /// Closed-form Gaussian predict/correct steps as CSV.
    Kalman(KalmanArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Belief,
    Simulate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "belief")]
    mode: Mode,
    /// Seed for the environment's choices in simulate mode.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep every K-related situation instead of merging indistinguishable ones.
    #[arg(long)]
    no_collapse: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Exact rational weights (the default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Floating-point weights.
    #[arg(long)]
    float: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Float mode: drop situations below this share of the total weight.
    /// Dropped situations no longer count for `know`.
    #[arg(long, requires = "float")]
    prune_epsilon: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inputs: Inputs,
}

#[derive(Args)]
struct KalmanArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mean: f64,
    #[arg(long, default_value_t = 1.0)]
    variance: f64,
    /// Steps such as `predict:2:1` (move 2, noise variance 1) or
    /// `correct:3:0.5` (reading 3, sensor variance 0.5).
    #[arg(allow_negative_numbers = true)]
    steps: Vec<String>,
}

/// How a failed command maps to an exit code.
enum Failure {
    /// Bad input: unreadable files, theory or scenario errors.
    Input(anyhow::Error),
    /// The scenario is well-formed but the run failed.
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Verify(a) => verify::verify(a),
        Command::Check { theory } => check(&theory),
        Command::Kalman(a) => kalman(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            report(&e);
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            report(&e);
            ExitCode::from(2)
        }
    }
}

fn color() -> bool {
    std::env::var("SITCALC_COLOR").map_or(true, |v| v != "0") && io::stderr().is_terminal()
}

fn paint(text: &str, code: &str) -> String {
    if color() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn report(e: &anyhow::Error) {
    eprintln!("{} {e:#}", paint("error:", "1;31"));
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses and validates the theory, printing warnings and notes.
fn load_theory(path: &Path) -> anyhow::Result<ActionTheory> {
    let text = read(path)?;
    match check_theory(&text) {
        Ok((theory, diags)) => {
            for d in diags {
                eprintln!("{}:{}", path.display(), colored(&d.to_string(), d.severity));
            }
            Ok(theory)
        }
        Err(e) => bail!(located(path, &e)),
    }
}

/// Every diagnostic of `e` prefixed with the file it came from.
fn located(path: &Path, e: &ParseError) -> String {
    let lines: Vec<String> = e
        .diagnostics
        .iter()
        .map(|d| format!("{}:{d}", path.display()))
        .collect();
    lines.join("\n")
}

fn colored(line: &str, severity: Severity) -> String {
    let code = match severity {
        Severity::Error => "31",
        Severity::Warning => "33",
        Severity::Note => "36",
    };
    paint(line, code)
}

fn load_scenario(path: &Path, theory: &ActionTheory) -> anyhow::Result<Scenario> {
    let text = read(path)?;
    parse_scenario(&text, theory).map_err(|e| anyhow::anyhow!(located(path, &e)))
}

fn options(inputs: &Inputs, mode: NumericMode, prune: Option<f64>) -> RunOptions {
    RunOptions {
        mode,
        simulate: inputs.mode == Mode::Simulate,
        seed: inputs.seed,
        collapse: !inputs.no_collapse,
        prune_epsilon: prune,
    }
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let theory = load_theory(&a.inputs.theory)?;
    let scenario = load_scenario(&a.inputs.scenario, &theory)?;
    if a.inputs.mode == Mode::Simulate && scenario.actual().is_none() {
        return Err(Failure::Input(anyhow::anyhow!(
            "simulate mode needs an `actual {{ ... }}` world in {}",
            a.inputs.scenario.display()
        )));
    }
    let mode = if a.float {
        NumericMode::Float
    } else {
        NumericMode::Exact
    };
    let opts = options(&a.inputs, mode, a.prune_epsilon);
    let trace = match run_scenario(&theory, &scenario, &opts) {
        Ok(t) => t,
        Err(e) if matches!(e.kind, ScenarioErrorKind::MissingActual) => {
            return Err(Failure::Input(e.into()))
        }
        Err(e) => return Err(Failure::Runtime(e.into())),
    };
    let text = match (a.format, &a.output) {
        (Some(Format::Csv), _) => output::csv(&theory, &trace)?,
        (Some(Format::Json), _) | (None, Some(_)) => output::json(&theory, &trace, &opts),
        (None, None) => output::text(&theory, &trace),
    };
    match &a.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn check(path: &Path) -> Result<(), Failure> {
    let text = read(path)?;
    match check_theory(&text) {
        Ok((theory, diags)) => {
            for d in &diags {
                println!("{}:{}", path.display(), d);
            }
            eprintln!(
                "{}: {} schemas, {} fluents, {} initial worlds; {} warnings",
                path.display(),
                theory.schemas.len(),
                theory.vocab.fluents.len(),
                theory.init.len(),
                diags
                    .iter()
                    .filter(|d| d.severity == Severity::Warning)
                    .count()
            );
            Ok(())
        }
        Err(e) => {
            for d in &e.diagnostics {
                println!("{}:{}", path.display(), d);
            }
            Err(Failure::Input(anyhow::anyhow!(
                "{} has errors",
                path.display()
            )))
        }
    }
}

fn kalman(a: KalmanArgs) -> Result<(), Failure> {
    kalman_steps(a).map_err(Failure::Input)
}

fn kalman_steps(a: KalmanArgs) -> anyhow::Result<()> {
    let mut b = GaussianBelief::new(a.mean, a.variance)?;
    let mut out = csv::Writer::from_writer(io::stdout());
    out.write_record([
        "step",
        "kind",
        "input",
        "noise_variance",
        "mean",
        "variance",
    ])?;
    out.write_record([
        "0",
        "prior",
        "",
        "",
        &b.mean().to_string(),
        &b.variance().to_string(),
    ])?;
    for (i, s) in a.steps.iter().enumerate() {
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, x, v] = parts[..] else {
            bail!("step `{s}` should look like predict:X:VAR or correct:Z:VAR");
        };
        let x: f64 = x.parse().with_context(|| format!("bad number in `{s}`"))?;
        let v: f64 = v.parse().with_context(|| format!("bad number in `{s}`"))?;
        let (kind, next) = match kind {
            "predict" | "p" => ("predict", kalman_predict(b, x, v)?),
            "correct" | "c" => ("correct", kalman_correct(b, x, v)?),
            _ => bail!("unknown step kind `{kind}` (use predict or correct)"),
        };
        b = next;
        out.write_record([
            &(i + 1).to_string(),
            kind,
            &x.to_string(),
            &v.to_string(),
            &b.mean().to_string(),
            &b.variance().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
