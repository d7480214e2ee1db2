use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{debug, info};

use forcing_lab::scenario::{self, Kind, Overrides, Report, Scenario, SchemaError};

#[derive(Parser)]
#[command(name = "forcing-lab", version, about = "Run forcing-lab scenarios and write JSON reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file, or `-` for stdin
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized kinds; overrides the scenario's own seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    retry_cap: Option<u32>,

    #[arg(long, global = true)]
    exhaustive_cap: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Slalom,
    Refine,
    Extend,
    GenericRun,
    Smz,
    Rapid,
    Diagram,
    /// Run the bundled acceptance suite, or the fixture given with --input
    Selftest,
    /// Run a full scenario document of any kind
    Run,
}

impl Command {
    fn kind(self) -> Option<Kind> {
        Some(match self {
            Command::Slalom => Kind::Slalom,
            Command::Refine => Kind::Refine,
            Command::Extend => Kind::Extend,
            Command::GenericRun => Kind::GenericRun,
            Command::Smz => Kind::Smz,
            Command::Rapid => Kind::Rapid,
            Command::Diagram => Kind::Diagram,
            Command::Selftest => Kind::Selftest,
            Command::Run => return None,
        })
    }
}

enum Failure {
    Schema(SchemaError),
    Io(String),
}

fn read_input(path: &Option<PathBuf>) -> Result<Option<String>, Failure> {
    match path {
        None => Ok(None),
        Some(p) if p.as_os_str() == "-" => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            Ok(Some(text))
        }
        Some(p) => fs::read_to_string(p).map(Some).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
    }
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let text = read_input(&cli.input)?;
    if let Command::Selftest = cli.command {
        return scenario::selftest(text.as_deref()).map_err(Failure::Schema);
    }
    let text = text.ok_or_else(|| Failure::Schema(SchemaError("--input is required".into())))?;
    let scenario = Scenario::parse(&text, cli.command.kind()).map_err(Failure::Schema)?;
    let overrides = Overrides { seed: cli.seed, retry_cap: cli.retry_cap, exhaustive_cap: cli.exhaustive_cap };
    debug!("running {} scenario", scenario.kind);
    scenario::run(&scenario, &overrides).map_err(Failure::Schema)
}

/// A closed pipe (e.g. `| head`) should not turn into a panic.
fn emit(mut sink: impl Write, text: &str) {
    let _ = sink.write_all(text.as_bytes()).and_then(|()| sink.flush());
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FORCING_LAB_LOG")).init();
    let cli = Cli::parse();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(Failure::Schema(e)) => {
            eprintln!("schema error: {e}");
            return ExitCode::from(2);
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let summary = report.summary();
    match (&cli.out, cli.command) {
        (Some(path), _) => {
            if let Err(e) = fs::write(path, json + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
            info!("report written to {}", path.display());
            if let Command::Selftest = cli.command {
                emit(io::stdout(), &summary);
            } else {
                emit(io::stderr(), &summary);
            }
        }
        (None, Command::Selftest) => emit(io::stdout(), &summary),
        (None, _) => {
            emit(io::stdout(), &(json + "\n"));
            emit(io::stderr(), &summary);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
