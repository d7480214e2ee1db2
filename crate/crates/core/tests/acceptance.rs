//! Runs every acceptance criterion on the bundled fixture and prints one
//! line per criterion. Uses its own `main` so the lines are never captured.

use std::process::ExitCode;

use forcing_lab::acceptance::{run_all, Fixture};

fn main() -> ExitCode {
    let results = run_all(&Fixture::bundled());
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    println!("acceptance: {} of {} criteria pass", results.len() - failed.len(), results.len());
    if results.len() != 11 || !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
