//! Command line front end.
//!
//! Exit codes: 0 success, 1 malformed input or configuration, 2 infeasible
//! quota, 3 a property check failed, 4 the request exceeded an enumeration
//! cap, 5 the two engines disagreed under `bench`.

mod commands;
mod output;

use std::path::PathBuf;

use adasub::greedy::{Engine, SelectionRule, StoppingRule};
use adasub::model::Caps;
use adasub::objectives::Backend;
use adasub::Error;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "adasub",
    version,
    about = "Adaptive greedy policies under partial observation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the greedy policy and report its exact metrics.
    Run(RunArgs),
    /// Exhaustively check adaptive monotonicity and submodularity.
    Check(CommonArgs),
    /// Compare the greedy policy against the brute-force optimum.
    Oracle(RunArgs),
    /// Emit optimality-gap certificates along the greedy policy.
    Bound(RunArgs),
    /// Build with both engines and compare trees and work counts.
    Bench(RunArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the instance JSON file.
    #[arg(long)]
    instance: PathBuf,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Stop each branch after this many selections.
    #[arg(long, value_name = "K")]
    maximize: Option<usize>,

    /// Stop a branch once the quota is certifiably reached.
    #[arg(long, value_name = "Q")]
    cover: Option<f64>,

    /// Stop a branch when no remaining item fits the leftover budget.
    #[arg(long, value_name = "B")]
    budget: Option<f64>,

    /// Like --cover, additionally reporting the accumulated shortfall.
    #[arg(long, value_name = "Q")]
    minsum: Option<f64>,

    /// Selection engine.
    #[arg(long, value_enum, default_value_t = EngineArg::Naive)]
    engine: EngineArg,

    /// Item scoring rule.
    #[arg(long, value_enum, default_value_t = RuleArg::Benefit)]
    rule: RuleArg,

    /// Marginal-benefit backend: `enumerate` or `sample:N`.
    #[arg(long, default_value = "enumerate", value_parser = parse_backend)]
    backend: BackendArg,

    /// Seed for the sampling backend; required with `sample:N`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Naive,
    Lazy,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Benefit,
    #[value(name = "per-cost")]
    PerCost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug)]
enum BackendArg {
    Enumerate,
    Sample(usize),
}

fn parse_backend(text: &str) -> Result<BackendArg, String> {
    if text == "enumerate" {
        return Ok(BackendArg::Enumerate);
    }
    if let Some(count) = text.strip_prefix("sample:") {
        let samples: usize = count
            .parse()
            .map_err(|_| format!("'{count}' is not a sample count"))?;
        if samples == 0 {
            return Err("sample count must be positive".into());
        }
        return Ok(BackendArg::Sample(samples));
    }
    Err(format!("'{text}' is neither 'enumerate' nor 'sample:N'"))
}

impl EngineArg {
    fn as_engine(self) -> Engine {
        match self {
            EngineArg::Naive => Engine::Naive,
            EngineArg::Lazy => Engine::Lazy,
        }
    }

    fn label(self) -> &'static str {
        match self {
            EngineArg::Naive => "naive",
            EngineArg::Lazy => "lazy",
        }
    }
}

impl RuleArg {
    fn as_rule(self) -> SelectionRule {
        match self {
            RuleArg::Benefit => SelectionRule::Benefit,
            RuleArg::PerCost => SelectionRule::BenefitPerCost,
        }
    }

    fn label(self) -> &'static str {
        match self {
            RuleArg::Benefit => "benefit",
            RuleArg::PerCost => "per-cost",
        }
    }
}

impl RunArgs {
    fn stop(&self) -> Result<StoppingRule, Error> {
        let mut rules = Vec::new();
        if let Some(k) = self.maximize {
            rules.push(StoppingRule::Cardinality(k));
        }
        if let Some(q) = self.cover {
            rules.push(StoppingRule::Quota(q));
        }
        if let Some(b) = self.budget {
            rules.push(StoppingRule::Budget(b));
        }
        if let Some(q) = self.minsum {
            rules.push(StoppingRule::MinSum(q));
        }
        match rules.len() {
            1 => Ok(rules[0]),
            0 => Err(Error::InvalidConfig(
                "one of --maximize, --cover, --budget, --minsum is required".into(),
            )),
            _ => Err(Error::InvalidConfig(
                "--maximize, --cover, --budget, --minsum are mutually exclusive".into(),
            )),
        }
    }

    fn backend(&self) -> Result<Backend, Error> {
        match self.backend {
            BackendArg::Enumerate => Ok(Backend::Enumerate),
            BackendArg::Sample(samples) => {
                let seed = self.seed.ok_or_else(|| {
                    Error::InvalidConfig("--seed is required with --backend sample:N".into())
                })?;
                Ok(Backend::Sample { samples, seed })
            }
        }
    }
}

fn caps_from_env() -> Result<Caps, Error> {
    let mut caps = Caps::default();
    if let Ok(text) = std::env::var("ADASUB_SUPPORT_CAP") {
        caps.support_cap = text.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!("ADASUB_SUPPORT_CAP: '{text}' is not a u64"))
        })?;
    }
    Ok(caps)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InfeasibleQuota { .. } => 2,
        Error::TooLarge(_) | Error::SupportTooLarge { .. } => 4,
        _ => 1,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            std::process::exit(0);
        }
        Err(err) => {
            eprint!("{err}");
            std::process::exit(1);
        }
    };
    let code = run(cli).unwrap_or_else(|err| {
        eprintln!("error: {err}");
        exit_code(&err)
    });
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    let caps = caps_from_env()?;
    match cli.command {
        Command::Run(args) => commands::run(&args, &caps),
        Command::Check(args) => commands::check(&args, &caps),
        Command::Oracle(args) => commands::oracle(&args, &caps),
        Command::Bound(args) => commands::bound(&args, &caps),
        Command::Bench(args) => commands::bench(&args, &caps),
    }
}
