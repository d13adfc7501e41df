use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use omnirep::cli::{self, CliArgs};

fn main() -> ExitCode {
    match CliArgs::try_parse() {
        Ok(args) => cli::main(args),
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", CliArgs::command().render_usage());
            }
            ExitCode::from(2)
        }
    }
}
