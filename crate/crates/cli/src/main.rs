use clap::{Args, Parser, Subcommand};
use mla_cli::{dispatch, parse_config, parse_overrides, CliError, Command};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Near-field modular-array simulator.
///
/// Configuration is read from `--config` (`key = value` lines) and any
/// `--key value` pair after the universal flags overrides the file.
#[derive(Parser)]
#[command(name = "mla", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact gain over an xz grid.
    Beampattern(Common),
    /// Cross-range gain, envelope and half-power markers at the focus.
    Cutline(Common),
    /// Closed-form depth gain with exact overlay, optionally over chained foci.
    Depth(Common),
    /// Smallest sub-array count with a single focal lobe, per antenna count.
    Design(Common),
    /// Monte-Carlo localization accuracy.
    Localize(Common),
    /// Spectral efficiency over transmit power.
    Se(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed for random draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-key overrides, e.g. `--aperture_m 2 --antennas 16`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, common) = match cli.command {
        Sub::Beampattern(c) => (Command::Beampattern, c),
        Sub::Cutline(c) => (Command::Cutline, c),
        Sub::Depth(c) => (Command::Depth, c),
        Sub::Design(c) => (Command::Design, c),
        Sub::Localize(c) => (Command::Localize, c),
        Sub::Se(c) => (Command::Se, c),
    };
    // Universal flags given after the first override land in the trailing list.
    let mut overrides = Vec::new();
    let (mut config, mut out_path) = (common.config, common.out);
    for (k, v) in parse_overrides(&common.overrides)? {
        match k.as_str() {
            "config" => config = Some(v.into()),
            "out" => out_path = Some(v.into()),
            _ => overrides.push((k, v)),
        }
    }
    if let Some(seed) = common.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    let text = match &config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let cfg = parse_config(command, &text, &overrides)?;

    let stdout = io::stdout();
    match &out_path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            dispatch(&cfg, &mut file, &mut stdout.lock())?;
            file.flush()?;
        }
        // The design table is the primary output; its CSV needs --out.
        None if command == Command::Design => dispatch(&cfg, &mut io::sink(), &mut stdout.lock())?,
        None => {
            let mut out = stdout.lock();
            dispatch(&cfg, &mut out, &mut io::stderr().lock())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mla: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
