//! `mqs`: command-line driver for the bath, sampling, dynamics and figure
//! pipelines.

mod commands;
mod config;
mod error;
mod manifest;
mod svg;

use clap::{Args, Parser, Subcommand};
use commands::{Common, Format, SampleOptions};
use config::{CommandKind, Config};
use error::CliError;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mqs",
    version,
    about = "Quantum and Bohmian dissipation in a harmonic bath"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// `key = value` configuration file; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Disable colored log output.
    #[arg(long)]
    plain: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Discretize the bath and write frequencies, couplings and normal modes.
    Bath(CommonArgs),
    /// Tabulate the discrete and continuum memory kernels.
    Kernel(CommonArgs),
    /// Sample the ground state and check its statistics.
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        dump_samples: bool,
        /// Include momenta in samples.csv.
        #[arg(long)]
        with_momenta: bool,
    },
    /// Integrate the system with one or more methods.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated subset of full,gle,markov_quantum,bohmian.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        methods: Option<Vec<String>>,
    },
    /// Compare two trajectory files.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Quantum vs Bohmian damped oscillation.
    Figure1(CommonArgs),
}

/// Progress messages on stderr.
pub struct Log {
    color: bool,
}

impl Log {
    fn new(plain: bool) -> Self {
        let color =
            !plain && std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
        Self { color }
    }

    pub fn info(&self, msg: &str) {
        let mut err = std::io::stderr().lock();
        let _ = if self.color {
            writeln!(err, "\x1b[36mmqs\x1b[0m {msg}")
        } else {
            writeln!(err, "mqs: {msg}")
        };
    }

    fn error(&self, e: &CliError) {
        let mut err = std::io::stderr().lock();
        let _ = if self.color {
            writeln!(err, "\x1b[31merror\x1b[0m {e}")
        } else {
            writeln!(err, "error: {e}")
        };
    }
}

fn load(cmd: CommandKind, args: &CommonArgs) -> Result<Config, CliError> {
    let mut cfg = Config::load(cmd, args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate(cmd)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = match &cli.command {
        Command::Bath(a) => (CommandKind::Bath, a),
        Command::Kernel(a) => (CommandKind::Kernel, a),
        Command::Sample { common, .. } => (CommandKind::Sample, common),
        Command::Simulate { common, .. } => (CommandKind::Simulate, common),
        Command::Compare { common, .. } => (CommandKind::Compare, common),
        Command::Figure1(a) => (CommandKind::Figure1, a),
    };
    let log = Log::new(args.plain);
    let result = (|| {
        let cfg = load(kind, args)?;
        let common = Common {
            out_dir: &args.out_dir,
            format: args.format,
            log: &log,
        };
        match &cli.command {
            Command::Bath(_) => commands::bath(&cfg, &common),
            Command::Kernel(_) => commands::kernel(&cfg, &common),
            Command::Sample {
                dump_samples,
                with_momenta,
                ..
            } => commands::sample(
                &cfg,
                &SampleOptions {
                    dump_samples: *dump_samples,
                    with_momenta: *with_momenta,
                },
                &common,
            ),
            Command::Simulate { methods, .. } => {
                let methods = commands::parse_methods(methods.as_deref())?;
                commands::simulate(&cfg, &methods, &common)
            }
            Command::Compare { a, b, .. } => commands::compare(&cfg, a, b, &common),
            Command::Figure1(_) => commands::figure1(&cfg, &common),
        }
    })();
    if let Err(e) = &result {
        log.error(e);
    }
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(e.exit_code()),
    }
}
