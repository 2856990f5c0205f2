//! `asian`: price, greeks, compare, grid and selftest from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical
//! failure, 4 an engine comparison outside tolerance.

mod args;
mod commands;
mod config;
mod output;

use clap::Parser;
use std::io::Write;

use args::Cli;
use config::Failure;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(&cli));
}

fn run(cli: &Cli) -> i32 {
    let result = config::resolve(cli.command.name(), cli.command.args()).and_then(|r| {
        let (report, code) = commands::run(&r)?;
        let mut out = std::io::stdout().lock();
        report
            .write(r.format, &mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Numerical(format!("writing output: {e}")))?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("asian: {}", f.message());
            f.code()
        }
    }
}
