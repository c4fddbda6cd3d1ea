use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use penscat::{configure_threads, parse_config, run, CliError};

/// Two-dimensional transmission scattering experiments.
#[derive(Debug, Parser)]
#[command(name = "penscat", version, about)]
struct Args {
    /// TOML run configuration.
    config: PathBuf,
    /// Output directory; overrides `output` in the configuration.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("penscat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    configure_threads()?;
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let cfg = parse_config(&text)?;
    let out = args.output.clone().unwrap_or_else(|| cfg.output.clone());
    run(&cfg, &out)
}
