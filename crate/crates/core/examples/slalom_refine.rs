// Slalom extraction from a finite name and tail-sum refinement of a condition.
//
// Run with `cargo run --example slalom_refine`.

use std::error::Error;

use forcing_lab::name_calculus::{make_name, refine_condition, slalom_extract, Cell};
use forcing_lab::{clopen, sample, ClopenSet};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = make_name(vec![
        vec![Cell::new(0, ClopenSet::full())],
        vec![
            Cell::new(0, clopen(&["0"])),
            Cell::new(1, clopen(&["10"])),
            Cell::new(2, clopen(&["110"])),
            Cell::new(3, clopen(&["111"])),
        ],
    ])?;
    let s = slalom_extract(&g);
    // 1/4 is not strictly above the threshold 1/4, so only 0 is caught.
    println!("S(0) = {:?}, S(1) = {:?}", s.slot(0), s.slot(1));

    let mut rng = sample::rng(3);
    let g = sample::name(&mut rng, 12, 5);
    let slalom = slalom_extract(&g);
    let f = sample::avoiding_sequence(&mut rng, &g, 1);
    let p = clopen(&["0", "11"]);
    let r = refine_condition(&p, &g, &f, 1)?;
    println!(
        "random name, horizon {}: |S(n)| = {:?}",
        g.horizon(),
        slalom.slots().iter().map(|x| x.len()).collect::<Vec<_>>()
    );
    println!("f = {f:?}");
    println!("mu(p) = {}, refined from n = {}: mu(q) = {} >= {}", p.measure(), r.n, r.q.measure(), r.lower_bound);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
