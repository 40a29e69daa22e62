//! `selflink`: self-linking numbers of framed space curves from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use selflink_core::invariant::Epsilon;

use commands::{ComputeArgs, Failure, Outcome, Target};
use config::Format;

#[derive(Parser)]
#[command(name = "selflink", version, about = "Self-linking numbers of framed closed space curves")]
struct Cli {
    /// Worker threads; 1 selects the bit-reproducible reference summation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the self-linking report for each fixture in a config.
    Compute {
        config: PathBuf,
        /// Quadrature grid size.
        #[arg(long)]
        n: Option<usize>,
        /// Pushoff distance, a number or "auto".
        #[arg(long, value_parser = parse_epsilon)]
        epsilon: Option<Epsilon>,
        /// Skip the pushoff linking-number check.
        #[arg(long)]
        no_oracle: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a verification suite: calugareanu, invariance, frenet, blackboard, twist-shift.
    Verify {
        suite: String,
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        /// Print verdicts as JSON on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate an integral against grid size as CSV.
    Converge {
        #[arg(value_enum)]
        target: Target,
        config: PathBuf,
        /// Comma-separated, strictly increasing even grid sizes.
        #[arg(long, default_value = "128,256,512,1024")]
        n_list: String,
        #[arg(long)]
        fixture: Option<String>,
    },
    /// Project a curve (and its partner, if any) and list the crossings.
    Crossings {
        config: PathBuf,
        #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
        direction: String,
        /// Polyline resolution of the projection.
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long)]
        fixture: Option<String>,
    },
}

fn parse_epsilon(s: &str) -> Result<Epsilon, String> {
    serde_json::from_str(s)
        .or_else(|_| serde_json::from_value(serde_json::Value::String(s.to_string())))
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Outcome {
    let threads = cli.threads;
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Input(format!("thread pool: {e}")))?;
    }
    let load = |path: &PathBuf| -> Result<Vec<config::Fixture>, Failure> {
        let mut fixtures = config::load(path).map_err(Failure::Input)?;
        if threads == Some(1) {
            for fx in &mut fixtures {
                fx.config.quadrature.parallel = false;
            }
        }
        Ok(fixtures)
    };
    match cli.command {
        Command::Compute { config, n, epsilon, no_oracle, output, format } => {
            commands::compute(&mut load(&config)?, &ComputeArgs { n, epsilon, no_oracle, output, format })
        }
        Command::Verify { suite, config, n, json } => {
            if !commands::SUITES.contains(&suite.as_str()) {
                return commands::verify(&suite, &mut [], n, json);
            }
            commands::verify(&suite, &mut load(&config)?, n, json)
        }
        Command::Converge { target, config, n_list, fixture } => {
            let n_list = commands::parse_n_list(&n_list)?;
            let fixtures = load(&config)?;
            let fx = pick(&fixtures, fixture.as_deref())?;
            commands::converge(target, fx, &n_list)
        }
        Command::Crossings { config, direction, n, fixture } => {
            let direction = commands::parse_direction(&direction)?;
            let fixtures = load(&config)?;
            commands::crossings(pick(&fixtures, fixture.as_deref())?, direction, n)
        }
    }
}

fn pick<'a>(fixtures: &'a [config::Fixture], name: Option<&str>) -> Result<&'a config::Fixture, Failure> {
    match name {
        None => Ok(&fixtures[0]),
        Some(n) => fixtures.iter().find(|f| f.name == n).ok_or_else(|| {
            let names: Vec<&str> = fixtures.iter().map(|f| f.name.as_str()).collect();
            Failure::Input(format!("no fixture named \"{n}\"; available: {}", names.join(", ")))
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
