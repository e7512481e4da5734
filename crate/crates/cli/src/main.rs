mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let result = commands::run(&cli).and_then(|out| {
        output::emit(&out.text, cli.output.as_deref())?;
        out.verdict.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
