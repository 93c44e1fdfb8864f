use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qfed1d_cli::{parse_config, run, CliError, Command};

/// Thermal field observables of one-dimensional layered media.
#[derive(Debug, Parser)]
#[command(name = "qfed1d", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation("--threads", e))?;
    }
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Io {
        path: args.config.display().to_string(),
        source,
    })?;
    let config = parse_config(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", args.config.display())),
        other => other,
    })?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.directory));
    let summary = run(&config, args.command, &out)?;
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {}", e.kind(), message);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
