use std::process::ExitCode;

use clap::Parser;
use safekeeper_cli::args::Cli;
use safekeeper_cli::exit::ExitClass;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitClass::Usage.into()
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    safekeeper_cli::run(cli)
}
