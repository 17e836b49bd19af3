//! The `check` pipeline driven from code; prints the JSON report.

use decaycert::cli::{execute, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse_from(["decaycert", "check", "--generate", "damped-wave", "--n", "5", "--gamma", "0.05", "--d", "4"]);
    let outcome = execute(&cli);
    let report = outcome.report.expect("check always produces a report");
    println!("{}", report.to_json().expect("finite report"));
    for line in &outcome.messages {
        eprintln!("{line}");
    }
    eprintln!("exit code {}", outcome.exit_code);
}
