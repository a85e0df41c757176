mod args;
mod commands;
mod config;
mod exit;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use crate::args::{Cli, Command};
use crate::commands::Output;
use crate::config::Config;
use crate::exit::{Exit, Failure};

fn report_failure(failure: &Failure, json: bool) {
    eprintln!("ore: {failure}");
    if json {
        let error = json!({
            "error": {
                "exit_code": failure.code(),
                "kind": failure.exit.kind(),
                "message": failure.message,
            }
        });
        println!("{error:#}");
    }
}

fn run(cli: Cli) -> Result<Exit, Failure> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let out = Output { json: cli.json };
    match cli.command {
        Command::Validate(args) => commands::validate_cmd(args, &config, &out),
        Command::Convert(args) => commands::convert_cmd(args, &config, &out),
        Command::Build(args) => commands::build_cmd(args, &config, &out),
        Command::Serve(args) => commands::serve_cmd(args, &config, &out),
        Command::Crawl(args) => commands::crawl_cmd(args, &config, &out),
        Command::Fixture(args) => commands::fixture_cmd(args, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            if std::env::args().any(|a| a == "--json") {
                let message = e.kind().as_str().unwrap_or("invalid arguments");
                report_failure(&Failure::usage(message), true);
            }
            return ExitCode::from(Exit::Usage.code());
        }
    };

    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let json = cli.json;
    match run(cli) {
        Ok(exit) => ExitCode::from(exit.code()),
        Err(failure) => {
            report_failure(&failure, json);
            ExitCode::from(failure.code())
        }
    }
}
