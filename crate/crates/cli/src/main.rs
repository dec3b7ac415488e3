mod catalog;
mod construct;
mod order;
mod report;
mod verify;
mod witness;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{emit, Outcome, RunInputs, RunReport, Status};

#[derive(Parser, Debug)]
#[command(name = "idealab", version, about = "Exact experiments with submeasures, ideals on ω and measures on ω ∪ {p}")]
struct Cli {
    /// Largest natural examined by prefix computations
    #[arg(long, global = true)]
    horizon: Option<u64>,
    /// Search budget (indices, samples or points, depending on the command)
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and validate a submeasure or ADL descriptor
    Construct(construct::Args),
    /// Run a witness pipeline on a JSON input file
    Witness(witness::Args),
    /// Run a property suite
    Verify(verify::Args),
    /// Compare ideals and weight functions
    Order(order::Args),
    /// Manage the ideal catalog directory
    Catalog(catalog::Args),
}

/// Global flags as seen by the commands.
pub struct Globals {
    pub horizon: Option<u64>,
    pub budget: Option<u64>,
    pub seed: u64,
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Parses `text` as JSON, or reads the file named after a leading `@`.
pub fn json_arg(text: &str) -> Result<Value> {
    match text.strip_prefix('@') {
        Some(p) => read_json(Path::new(p)),
        None => serde_json::from_str(text).with_context(|| format!("parsing {text:?} as JSON")),
    }
}

pub fn field<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<T> {
    let x = v.get(key).with_context(|| format!("missing field {key:?}"))?;
    serde_json::from_value(x.clone()).with_context(|| format!("field {key:?}"))
}

pub fn field_or<T: serde::de::DeserializeOwned>(v: &Value, key: &str, default: T) -> Result<T> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(_) => field(v, key),
    }
}

/// Budget exhaustion in the library is a run outcome, every other library error is bad input.
pub fn lift<T>(r: idealab::Result<T>) -> Result<std::result::Result<T, Outcome>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(idealab::Error::Budget(msg)) => Ok(Err(Outcome::new(Status::Failure, json!({ "failure": msg }))?)),
        Err(e) => Err(e.into()),
    }
}

type Runner = Box<dyn FnOnce(&Globals) -> Result<Outcome>>;

struct Prepared {
    inputs: RunInputs,
    run: Runner,
}

fn prepare(cli: Cli) -> Result<(Prepared, Globals)> {
    let g = Globals { horizon: cli.horizon, budget: cli.budget, seed: cli.seed };
    let (operation, arguments, input, run): (String, Value, Value, Runner) = match cli.command {
        Command::Construct(a) => {
            let (args, input) = a.describe()?;
            (format!("construct {}", a.family), args, input, Box::new(move |g| a.run(g)))
        }
        Command::Witness(a) => {
            let input = read_json(&a.input)?;
            let op = format!("witness {}", a.pipeline.name());
            let args = json!({ "pipeline": a.pipeline.name() });
            let inp = input.clone();
            (op, args, inp, Box::new(move |g| witness::run(a.pipeline, &input, g)))
        }
        Command::Verify(a) => {
            let input = match &a.input {
                Some(p) => read_json(p)?,
                None => Value::Null,
            };
            let op = format!("verify {}", a.suite.name());
            let inp = input.clone();
            (op, json!({ "suite": a.suite.name() }), inp, Box::new(move |g| verify::run(a.suite, &input, g)))
        }
        Command::Order(a) => {
            let (op, args, input) = a.describe()?;
            (op, args, input.clone(), Box::new(move |g| a.run(&input, g)))
        }
        Command::Catalog(a) => {
            let (op, args, input) = a.describe()?;
            (op, args, input.clone(), Box::new(move |g| a.run(&input, g)))
        }
    };
    let inputs = RunInputs { operation, arguments, input, horizon: g.horizon, budget: g.budget, seed: g.seed };
    Ok((Prepared { inputs, run }, g))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let out = cli.out.clone();
    let started = Instant::now();
    let result = prepare(cli).and_then(|(p, g)| {
        let outcome = (p.run)(&g)?;
        Ok(RunReport::new(&p.inputs, outcome, started.elapsed()))
    });
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(3);
        }
    };
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match text.and_then(|t| emit(&t, out.as_deref())) {
        Ok(()) => ExitCode::from(report.status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
