// Translating cover scales and flattening heavy intervals into one sequence.
//
// Run with `cargo run --example smz_cover`.

use std::error::Error;

use forcing_lab::smz_rapid::{cover_translate, flatten_heavy_intervals, IntervalSpec};
use forcing_lab::Rational;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let horizon = 4;
    let eps: Vec<Rational> = (0..40).map(Rational::pow2_neg).collect();
    let scales = cover_translate(&eps, horizon)?;
    for n in 0..horizon {
        println!("n = {n}: delta = {}, delta' = {}", scales.delta[n], scales.delta_prime[n]);
    }
    // The most each level may hold: (n+1)^2 - 1 grid cells of width delta'_n.
    let mut heavy: Vec<Vec<IntervalSpec>> = Vec::new();
    for n in 0..horizon {
        let mut level = Vec::new();
        for k in 0..((n + 1) * (n + 1) - 1) as u64 {
            level.push(IntervalSpec::grid(&scales.delta_prime[n], k)?);
        }
        heavy.push(level);
    }
    let j = flatten_heavy_intervals(&heavy, &scales.delta_prime, &eps)?;
    println!("{} intervals, first three:", j.len());
    for (i, interval) in j.iter().take(3).enumerate() {
        println!(
            "  J_{i} = [{}, {}), length {} <= eps_{i} = {}",
            interval.left(),
            interval.right(),
            interval.length(),
            eps[i]
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
