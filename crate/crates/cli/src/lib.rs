//! The `safekeeper` command line: service, store maintenance, tool keys,
//! queries and the end-to-end demo.

pub mod args;
pub mod commands;
pub mod demo;
pub mod exit;
pub mod output;

use std::io::Write;
use std::process::ExitCode;

use args::{Cli, Command, Format};
use exit::{CliError, CliResult};
use output::Output;

fn dispatch(cli: &Cli) -> CliResult<Option<Output>> {
    let out = match &cli.command {
        Command::Serve(args) => {
            let format = cli.format;
            commands::serve(args, |addr| {
                let url = format!("http://{addr}");
                let line = match format {
                    Format::Json => serde_json::json!({ "listening": url }).to_string(),
                    Format::Human => format!("listening on {url}"),
                };
                // Scripts wait for this line to learn the bound port.
                let mut stdout = std::io::stdout();
                let _ = writeln!(stdout, "{line}");
                let _ = stdout.flush();
            })?;
            return Ok(None);
        }
        Command::Verify(args) => commands::verify(args)?,
        Command::Tamper(args) => commands::tamper(args)?,
        Command::Demo(args) => demo::demo(args)?,
        Command::Query(args) => commands::query(args)?,
        Command::Overview(args) => commands::overview(args)?,
        Command::Head(args) => commands::head(args)?,
        Command::Keygen(args) => commands::keygen(args)?,
        Command::RegisterTool(args) => commands::register_tool(args)?,
        Command::Tools(args) => commands::tools(args)?,
        Command::Fixture(args) => commands::fixture(args)?,
    };
    Ok(Some(out))
}

/// Runs a parsed command line, printing its output, and returns the exit
/// code.
pub fn run(cli: Cli) -> ExitCode {
    match dispatch(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(out)) => {
            let text = match cli.format {
                Format::Json if out.json.is_null() => String::new(),
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.json).expect("json value")),
                Format::Human => out.human,
            };
            let mut stdout = std::io::stdout();
            let _ = stdout.write_all(text.as_bytes());
            let _ = stdout.flush();
            out.failure.map_or(ExitCode::SUCCESS, ExitCode::from)
        }
        Err(err) => report_error(&cli, &err),
    }
}

fn report_error(cli: &Cli, err: &CliError) -> ExitCode {
    match cli.format {
        Format::Json => eprintln!(
            "{}",
            serde_json::json!({ "error": format!("{err}"), "exit_code": err.class as u8 })
        ),
        Format::Human => eprintln!("error: {err}"),
    }
    err.class.into()
}
