//! Argument parsing and subcommand execution for the `motivsim` binary.

use std::fs;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use motivsim::batch::run_seeds;
use motivsim::harness::trace::{encode, read_jsonl};
use motivsim::harness::{
    builtin, builtin_names, compute_metrics, load_scenario, run, MetricBounds, RunOutput, Scenario, TraceFormat,
};
use motivsim::CoreError;
use motivsim_service::{ServeConfig, ServeError, Server, DEFAULT_TICK_RATE};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_PORT: u16 = 8765;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_UNKNOWN_SCENARIO: i32 = 2;
pub const EXIT_UNWRITABLE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "motivsim",
    version,
    about = "Run, replay and serve animat motivation experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run a scenario and write its trace, metrics and resolved scenario.
    Run(RunArgs),
    /// Re-simulate the scenario behind a trace, optionally checking it byte for byte.
    Replay(ReplayArgs),
    /// Compute metrics from a JSONL trace.
    Metrics(MetricsArgs),
    /// Serve a live simulation over a websocket at /ws.
    Serve(ServeArgs),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

impl From<Format> for TraceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Jsonl => TraceFormat::Jsonl,
            Format::Csv => TraceFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in scenario name or path to a scenario file.
    #[arg(long)]
    pub scenario: String,
    /// Seed override [default: 1]
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Seed range such as `1..11` (end exclusive) or `1..=10`; one subdirectory per seed.
    #[arg(long, value_parser = parse_seed_range)]
    pub seeds: Option<SeedRange>,
    /// Output directory.
    #[arg(long, env = "MOTIVSIM_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Trace format.
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Trace file (.jsonl or .csv) written by `run`.
    #[arg(long)]
    pub trace: PathBuf,
    /// Scenario to re-simulate; defaults to scenario.json beside the trace.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Seed override; defaults to the scenario's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit with status 5 unless the re-simulated trace is identical.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// JSONL trace file.
    #[arg(long)]
    pub trace: PathBuf,
    /// Scenario providing the alpha bounds; defaults to scenario.json beside the trace, else [0, 1].
    #[arg(long)]
    pub scenario: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Built-in scenario name or path to a scenario file.
    #[arg(long)]
    pub scenario: String,
    /// Seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Listening port.
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    /// Listening address.
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Simulated ticks per second.
    #[arg(long, default_value_t = DEFAULT_TICK_RATE)]
    pub tick_rate: f64,
    /// Start paused; clients send `resume` or `step_n`.
    #[arg(long)]
    pub paused: bool,
    /// Hold the clock until the first viewer connects.
    #[arg(long)]
    pub wait_for_viewer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub start: u64,
    /// Exclusive.
    pub end: u64,
}

impl SeedRange {
    pub fn seeds(&self) -> Vec<u64> {
        (self.start..self.end).collect()
    }
}

pub fn parse_seed_range(s: &str) -> Result<SeedRange, String> {
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        return Err(format!("expected START..END or START..=END, got `{s}`"));
    };
    let start: u64 = a.trim().parse().map_err(|e| format!("bad start `{a}`: {e}"))?;
    let end: u64 = b.trim().parse().map_err(|e| format!("bad end `{b}`: {e}"))?;
    let end = if inclusive {
        end.checked_add(1).ok_or("range end overflows")?
    } else {
        end
    };
    if end <= start {
        return Err(format!("empty seed range `{s}`"));
    }
    Ok(SeedRange { start, end })
}

/// A failed invocation: the exit status and a one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl Failure {
    fn new(code: i32, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::UnknownScenario(_) => EXIT_UNKNOWN_SCENARIO,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

/// Built-in name first, then a file path.
pub fn resolve_scenario(spec: &str) -> Result<Scenario, Failure> {
    if let Ok(s) = builtin(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        let known: Vec<_> = builtin_names().collect();
        return Err(Failure::new(
            EXIT_UNKNOWN_SCENARIO,
            format!(
                "unknown scenario `{spec}` (not a file; built-ins: {})",
                known.join(", ")
            ),
        ));
    }
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    load_scenario(&text).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::new(EXIT_UNWRITABLE, format!("cannot write {}: {e}", path.display())))
}

fn write_run(dir: &Path, scenario: &Scenario, out: &RunOutput, format: TraceFormat) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::new(EXIT_UNWRITABLE, format!("cannot create {}: {e}", dir.display())))?;
    write(
        &dir.join(format!("trace.{}", format.extension())),
        &encode(&out.trace, format),
    )?;
    write(&dir.join("metrics.json"), &out.metrics.to_json())?;
    write(&dir.join("scenario.json"), &scenario.to_json())
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let scenario = resolve_scenario(&args.scenario)?;
    let format = TraceFormat::from(args.format);
    match args.seeds {
        None => {
            let scenario = scenario.with_seed(args.seed.unwrap_or(DEFAULT_SEED));
            let out = run(&scenario)?;
            write_run(&args.out, &scenario, &out, format)?;
            log::info!("wrote {} records to {}", out.trace.len(), args.out.display());
        }
        Some(range) => {
            let seeds = range.seeds();
            let outputs = run_seeds(&scenario, &seeds)?;
            for out in &outputs {
                let seeded = scenario.clone().with_seed(out.seed);
                write_run(&args.out.join(format!("seed-{}", out.seed)), &seeded, out, format)?;
            }
            log::info!("wrote {} runs to {}", outputs.len(), args.out.display());
        }
    }
    Ok(())
}

/// The scenario given on the command line, or scenario.json beside the trace.
fn scenario_for_trace(spec: Option<&str>, trace: &Path) -> Result<Option<Scenario>, Failure> {
    if let Some(spec) = spec {
        return resolve_scenario(spec).map(Some);
    }
    let sibling = trace.parent().unwrap_or(Path::new(".")).join("scenario.json");
    if sibling.is_file() {
        resolve_scenario(&sibling.to_string_lossy()).map(Some)
    } else {
        Ok(None)
    }
}

fn read_trace_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_FAILURE, format!("cannot read {}: {e}", path.display())))
}

fn cmd_replay(args: &ReplayArgs) -> Result<(), Failure> {
    let format = TraceFormat::from_path(&args.trace).ok_or_else(|| {
        Failure::new(
            EXIT_INVALID,
            format!("{}: expected a .jsonl or .csv trace", args.trace.display()),
        )
    })?;
    let recorded = read_trace_text(&args.trace)?;
    let scenario = scenario_for_trace(args.scenario.as_deref(), &args.trace)?.ok_or_else(|| {
        Failure::new(
            EXIT_INVALID,
            format!(
                "no --scenario given and no scenario.json beside {}",
                args.trace.display()
            ),
        )
    })?;
    let scenario = match args.seed {
        Some(seed) => scenario.with_seed(seed),
        None => scenario,
    };
    let out = run(&scenario)?;
    let replayed = encode(&out.trace, format);
    if recorded == replayed {
        println!(
            "{}: {} records reproduced (seed {})",
            args.trace.display(),
            out.trace.len(),
            scenario.seed
        );
        return Ok(());
    }
    let line = recorded
        .lines()
        .zip(replayed.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| recorded.lines().count().min(replayed.lines().count()))
        + 1;
    let msg = format!("{}: differs from re-simulation at line {line}", args.trace.display());
    if args.verify {
        Err(Failure::new(EXIT_MISMATCH, msg))
    } else {
        println!("{msg}");
        Ok(())
    }
}

fn cmd_metrics(args: &MetricsArgs) -> Result<(), Failure> {
    if TraceFormat::from_path(&args.trace) != Some(TraceFormat::Jsonl) {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("{}: metrics need a .jsonl trace", args.trace.display()),
        ));
    }
    let file = fs::File::open(&args.trace)
        .map_err(|e| Failure::new(EXIT_FAILURE, format!("cannot read {}: {e}", args.trace.display())))?;
    let trace = read_jsonl(BufReader::new(file))
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", args.trace.display())))?;
    let bounds = scenario_for_trace(args.scenario.as_deref(), &args.trace)?
        .map(|s| MetricBounds::from_scenario(&s))
        .unwrap_or_default();
    print!("{}", compute_metrics(&trace, &bounds).to_json());
    Ok(())
}

fn cmd_serve(args: &ServeArgs) -> Result<(), Failure> {
    let scenario = resolve_scenario(&args.scenario)?;
    let scenario = match args.seed {
        Some(seed) => scenario.with_seed(seed),
        None => scenario,
    };
    let config = ServeConfig {
        tick_rate: args.tick_rate,
        start_paused: args.paused,
        wait_for_viewer: args.wait_for_viewer,
    };
    let addr = SocketAddr::new(args.host, args.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
    runtime.block_on(async move {
        let server = Server::bind(addr, scenario, config).await.map_err(|e| match e {
            ServeError::Scenario(e) => Failure::from(e),
            ServeError::TickRate(_) => Failure::new(EXIT_INVALID, e.to_string()),
            other => Failure::new(EXIT_FAILURE, other.to_string()),
        })?;
        let bound = server
            .local_addr()
            .map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
        eprintln!("serving ws://{bound}/ws");
        server
            .run_until(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))
    })
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Replay(args) => cmd_replay(args),
        Cmd::Metrics(args) => cmd_metrics(args),
        Cmd::Serve(args) => cmd_serve(args),
        Cmd::ListScenarios => {
            for name in builtin_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn parser_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("1..11").unwrap().seeds(), (1..11).collect::<Vec<_>>());
        assert_eq!(parse_seed_range("1..=10").unwrap().seeds(), (1..11).collect::<Vec<_>>());
        assert!(parse_seed_range("5..5").is_err());
        assert!(parse_seed_range("5").is_err());
        assert!(parse_seed_range("a..3").is_err());
    }

    #[test]
    fn seed_and_seeds_conflict() {
        let r = Cli::try_parse_from([
            "motivsim",
            "run",
            "--scenario",
            "empty",
            "--seed",
            "3",
            "--seeds",
            "1..3",
        ]);
        assert!(r.is_err());
    }
}
