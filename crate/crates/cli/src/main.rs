mod args;
mod run;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run::run(&cli, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    ExitCode::from(code)
}
