// Countable centered pieces: conditions with the same index merge.
//
// Run with `cargo run --example centered_pieces`.

use std::error::Error;

use forcing_lab::poset::{merge_same_stem, sigma_centered_index, Condition, WeightFunction};
use forcing_lab::{rat, sample};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = Condition::trivial().attach_weight(rat(1, 2), WeightFunction::full())?;
    let index = sigma_centered_index(&p)?;
    println!("<trivial, [<1/2, phi_full>]>: n = {}, k = {}", index.n, index.k);

    let mut rng = sample::rng(8);
    for (a, b) in sample::centered_pairs(&mut rng, 3) {
        let ia = sigma_centered_index(&a)?;
        let merged = merge_same_stem(&a, &b)?;
        println!(
            "shared index (n = {}, k = {}, depth {}): merged {} weights, valid = {}",
            ia.n,
            ia.k,
            ia.stem.depth(),
            merged.weights.len(),
            merged.validate().is_ok()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
