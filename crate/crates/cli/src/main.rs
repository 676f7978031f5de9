use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqms::linalg::Config;
use dqms::{io::parse_channel, Error};
use dqms_cli::gen::Generator;
use dqms_cli::report::analyze;
use dqms_cli::verify::{render_table, run_suite};

/// Zero-error and index analysis of finite-dimensional quantum channels.
#[derive(Parser)]
#[command(name = "dqms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a channel given as JSON (`-` reads stdin).
    Analyze {
        path: String,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Shorthand for `--format json`.
        #[arg(long, conflicts_with_all = ["md", "format"])]
        json: bool,
        /// Shorthand for `--format md`.
        #[arg(long)]
        md: bool,
        /// Horizon for verifying the peripheral zero-error code.
        #[arg(long)]
        horizon: Option<usize>,
        #[command(flatten)]
        opts: ConfigArgs,
    },
    /// Print a named example channel as JSON.
    Gen {
        #[command(subcommand)]
        which: GenCommand,
    },
    /// Run the acceptance suite.
    Verify {
        /// Comma-separated criterion ids or tags (indices, opsys, duc,
        /// spectral, capacity, classical), or `all`.
        #[arg(long, default_value = "all")]
        filter: String,
        #[command(flatten)]
        opts: ConfigArgs,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The extremal classical chain A_d.
    Ad { d: usize },
    /// The qutrit algebra-chain example.
    M3,
    /// The 4×4 irreducible non-scrambling classical example.
    Firr4,
    /// The 5×5 scrambling matrix whose square is not positive.
    Scr5,
    /// The cyclic permutation on d states.
    Cycle { d: usize },
    /// A random channel from a Haar isometry.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        kraus: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    rank_eps: Option<f64>,
    #[arg(long)]
    eig_eps: Option<f64>,
    #[arg(long)]
    peripheral_eps: Option<f64>,
    #[arg(long)]
    subspace_eps: Option<f64>,
    #[arg(long)]
    angle_max_den: Option<u64>,
    /// Random restarts for the scrambling searches.
    #[arg(long)]
    budget: Option<usize>,
}

impl ConfigArgs {
    fn config(&self) -> Config {
        let mut c = Config::default();
        c.search.seed = self.seed;
        if let Some(v) = self.rank_eps {
            c.tol.rank_eps = v;
        }
        if let Some(v) = self.eig_eps {
            c.tol.eig_eps = v;
        }
        if let Some(v) = self.peripheral_eps {
            c.tol.peripheral_eps = v;
        }
        if let Some(v) = self.subspace_eps {
            c.tol.subspace_eps = v;
        }
        if self.angle_max_den.is_some() {
            c.tol.angle_max_den = self.angle_max_den;
        }
        if let Some(v) = self.budget {
            c.search.restarts = v;
        }
        c
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_validation() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

/// Writes to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn read_input(path: &str) -> Result<String, Error> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    Ok(text)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Analyze {
            path,
            format,
            json,
            md: _,
            horizon,
            opts,
        } => {
            let config = opts.config();
            let report = read_input(&path)
                .and_then(|text| parse_channel(&text, &config.tol))
                .and_then(|ch| analyze(&ch, &config, horizon));
            match report {
                Ok(r) if json || format == Format::Json => emit(&(r.to_json() + "\n")),
                Ok(r) => emit(&r.to_markdown()),
                Err(e) => return fail(&e),
            }
            ExitCode::SUCCESS
        }
        Command::Gen { which } => {
            let g = match which {
                GenCommand::Ad { d } => Generator::Ad(d),
                GenCommand::M3 => Generator::M3,
                GenCommand::Firr4 => Generator::Firr4,
                GenCommand::Scr5 => Generator::Scr5,
                GenCommand::Cycle { d } => Generator::Cycle(d),
                GenCommand::Random { dim, kraus, seed } => Generator::Random { dim, kraus, seed },
            };
            match g.to_json() {
                Ok(text) => {
                    emit(&(text + "\n"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { filter, opts } => {
            let outcomes = run_suite(&filter, &opts.config());
            if outcomes.is_empty() {
                eprintln!("error: no criterion matches filter {filter:?}");
                return ExitCode::from(2);
            }
            emit(&render_table(&outcomes));
            if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
