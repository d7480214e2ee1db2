// One randomized extension step on a condition with two weight functions.
//
// Run with `cargo run --example extend_condition`.

use std::error::Error;

use forcing_lab::poset::{
    extend, extension_delta, one_bit_growth, phi_from_clopen, Condition, ExtendConfig, WeightFunction,
};
use forcing_lab::{plane, rat};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let seed = 17;
    let phi = phi_from_clopen(&plane(&[("0", "1"), ("1", "")]))?;
    let p = Condition::trivial().attach_weight(rat(1, 2), WeightFunction::full())?.attach_weight(rat(1, 2), phi)?;
    println!("p: depth {}, scores {:?}", p.depth(), p.scores().iter().map(|s| s.to_string()).collect::<Vec<_>>());
    println!("delta = {}", extension_delta(&p).expect("p has weights"));

    let mut q = p.clone();
    for step in 0..3 {
        let (next, report) = extend(&q, seed + step, &ExtendConfig::default())?;
        assert!(next.extends(&q) && one_bit_growth(&q.stem, &next.stem));
        println!(
            "step {step}: depth {} -> {}, mean draws {:.2}, exhaustive {}",
            report.from_depth,
            report.to_depth,
            report.mean_attempts(),
            report.exhaustive
        );
        q = next;
    }
    println!("scores after three steps: {:?}", q.scores().iter().map(|s| s.to_string()).collect::<Vec<_>>());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
