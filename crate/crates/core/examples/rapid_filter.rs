// Block densities of thin sets, partial products and the rapidity transfer.
//
// Run with `cargo run --example rapid_filter`.

use std::collections::BTreeSet;
use std::error::Error;

use forcing_lab::sample;
use forcing_lab::smz_rapid::{density_profile, product_bound, rapidity_check, thin_set_bound_check};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cubes: BTreeSet<u64> = (0..=100u64).map(|k| k * k * k).collect();
    let profile = density_profile(&cubes, 10);
    println!("cube densities, m < 10: {:?}", profile.values().iter().map(|v| v.to_string()).collect::<Vec<_>>());
    let verdict = thin_set_bound_check(&cubes, 1000)?;
    println!("thin bound for m < 1000: holds = {}, max ratio = {}", verdict.holds, verdict.max_ratio);

    let x: BTreeSet<u64> = (2..40).collect();
    for big_m in [10, 20, 40] {
        println!("product over X up to {big_m}: {}", product_bound(&cubes, &x, 2, big_m));
    }

    let x: BTreeSet<u64> = [1, 10, 100, 1000].into();
    let f: Vec<u64> = (0..12).map(|n| 1 << n).collect();
    let r = sample::block_choice(&mut sample::rng(1), 1001);
    let a: Vec<u64> = x.iter().map(|&n| r[n as usize]).collect();
    let verdict = rapidity_check(&r, &x, &f)?;
    println!("A = r[X] = {a:?}, |A ∩ f(n)| <= n for all n < 12: {}", verdict.holds);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
