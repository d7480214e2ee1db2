// A generic run that avoids two small null-set covers, with certificates.
//
// Run with `cargo run --example null_avoidance_run`.

use std::error::Error;

use forcing_lab::poset::{generic_run, Action, ExtendConfig, ScheduleEntry};
use forcing_lab::{plane, rat};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let schedule = vec![
        ScheduleEntry { cover: plane(&[("000", "1"), ("101", "1")]), epsilon: rat(1, 2), at_step: 0 },
        ScheduleEntry { cover: plane(&[("11", "11")]), epsilon: rat(1, 4), at_step: 2 },
    ];
    let run = generic_run(&schedule, 4, 2024, &ExtendConfig::default())?;
    for entry in &run.trace {
        let action = match entry.action {
            Action::Attach { index } => format!("attach G{index}"),
            Action::Extend { .. } => "extend".to_string(),
        };
        let certs: Vec<String> = entry
            .certificates
            .iter()
            .map(|c| format!("G{}: inside {} scoreF {}", c.index, c.certificate.inside, c.certificate.score_f))
            .collect();
        println!("step {} {action:<9} depth {:>2}  {}", entry.step, entry.depth, certs.join("; "));
    }
    println!("all certificates above 1 - eps: {}", run.all_hold());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
