mod args;
mod commands;
mod corpus;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use report::{exit, OutputFormat, Report};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let mut r = Report::new("usage");
            r.push("error", "usage")
                .push("message", e.to_string().lines().next().unwrap_or(""));
            print!("{}", r.render(OutputFormat::Text));
            return ExitCode::from(exit::USAGE);
        }
    };
    let (code, report) = commands::execute(&cli, std::path::Path::new("."));
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.render(cli.format).as_bytes());
    ExitCode::from(code)
}
