use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mecsim::experiment::{prb_dump, run_once, sweep, write_csv, SweepKey, SweepSpec};
use mecsim::{Objective, ScenarioConfig, Scheme, SimError};

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mecsim",
    version,
    about = "Small-cell MEC offloading simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scheme on one seeded scenario and print a CSV row.
    Run(RunArgs),
    /// Run every (value, seed, scheme) combination and print one CSV row each.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML scenario file; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Objective used when the scheme is `proposed`.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,

    /// Write CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Fill wall_time_ms with measured time (otherwise 0, keeping output reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,

    /// Scenario seed; defaults to the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,

    /// proposed, proposed_minmax, proposed_minsum, all_local, all_offload_orth or equal_cpu.
    #[arg(long, default_value = "proposed")]
    scheme: String,

    /// Append the per-cell PRB lists after the CSV row.
    #[arg(long)]
    detail: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,

    /// Single seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,

    /// Inclusive seed range `A..B`.
    #[arg(long, value_name = "A..B")]
    seeds: Option<String>,

    /// Comma-separated scheme list, or `all`.
    #[arg(long, default_value = "all")]
    scheme: String,

    /// Parameter to vary: cells, lambda or mec_ghz.
    #[arg(long, requires = "values")]
    vary: Option<String>,

    /// Comma-separated values for --vary.
    #[arg(long, value_name = "CSVLIST", requires = "vary")]
    values: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Minmax,
    Minsum,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Minmax => Objective::MinMax,
            ObjectiveArg::Minsum => Objective::MinSum,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(String),
    Runtime(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<ScenarioConfig, Failure> {
    match path {
        Some(p) => Ok(ScenarioConfig::load(p)?),
        None => Ok(ScenarioConfig::default()),
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Resolves one scheme name; `proposed` takes the objective (min-sum by default).
fn resolve_scheme(name: &str, objective: Option<ObjectiveArg>) -> Result<Scheme, Failure> {
    if name == "proposed" {
        return Ok(Scheme::proposed(
            objective.map_or(Objective::MinSum, Objective::from),
        ));
    }
    let scheme: Scheme = name.parse().map_err(Failure::Usage)?;
    if let Some(obj) = objective {
        if scheme != Scheme::proposed(obj.into()) {
            return Err(Failure::Usage(format!(
                "--objective does not apply to scheme `{scheme}`"
            )));
        }
    }
    Ok(scheme)
}

fn resolve_schemes(list: &str, objective: Option<ObjectiveArg>) -> Result<Vec<Scheme>, Failure> {
    if list == "all" {
        if objective.is_some() {
            return Err(Failure::Usage(
                "--objective cannot be combined with --scheme all".into(),
            ));
        }
        return Ok(Scheme::ALL.to_vec());
    }
    let schemes = list
        .split(',')
        .map(|s| resolve_scheme(s.trim(), objective))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(schemes)
}

fn parse_seed_range(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("--seeds expects A..B, got `{text}`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if b < a {
        return Err(Failure::Usage(format!("--seeds {text} is empty")));
    }
    Ok((a..=b).collect())
}

fn parse_values(text: &str) -> Result<Vec<f64>, Failure> {
    let values = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad value `{s}` in --values")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(Failure::Usage("--values is empty".into()));
    }
    Ok(values)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let scheme = resolve_scheme(&args.scheme, args.common.objective)?;
    let config = load_config(args.common.config.as_ref())?;
    let seed = args.seed.unwrap_or(config.seed);
    let (record, outcome) = run_once(&config, seed, scheme, args.common.timing)?;

    let mut out = open_output(args.common.output.as_ref())?;
    write_csv(&mut out, std::slice::from_ref(&record))?;
    if args.detail {
        writeln!(out)?;
        out.write_all(prb_dump(&outcome.c).as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let schemes = resolve_schemes(&args.scheme, args.common.objective)?;
    let config = load_config(args.common.config.as_ref())?;
    let seeds = match (&args.seeds, args.seed) {
        (Some(range), _) => parse_seed_range(range)?,
        (None, Some(seed)) => vec![seed],
        (None, None) => vec![config.seed],
    };
    let (key, values) = match (&args.vary, &args.values) {
        (Some(key), Some(values)) => (
            key.parse::<SweepKey>().map_err(Failure::Usage)?,
            parse_values(values)?,
        ),
        // no variation: a single point at the configured cell count
        _ => (SweepKey::Cells, vec![config.n_cells as f64]),
    };
    let spec = SweepSpec {
        key,
        values,
        seeds,
        schemes,
    };
    let records = sweep(&config, &spec, args.common.timing)?;

    let mut out = open_output(args.common.output.as_ref())?;
    write_csv(&mut out, &records)?;
    out.flush()?;
    Ok(())
}
