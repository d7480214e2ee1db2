// Exact Boolean algebra on clopen subsets of Cantor space and the plane.
//
// Run with `cargo run --example clopen_algebra`.

use std::error::Error;

use forcing_lab::{bs, clopen, plane, ClopenPlaneSet};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = clopen(&["00", "01"]);
    let b = clopen(&["0", "10"]);
    println!("{{00, 01}} canonicalizes to {:?}", a.generators());
    println!("mu({{0, 10}}) = {}", b.measure());
    println!("complement of {{0, 10}} = {:?}", b.complement().generators());
    println!("full minus {{11}} = {:?}", forcing_lab::ClopenSet::full().difference(&clopen(&["11"])).generators());
    assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());

    let h = plane(&[("0", "1"), ("10", "01")]);
    println!("mu2(H) = {}", h.measure());
    for s in ["00", "10", "11"] {
        println!("section of H at [{s}] = {:?}", h.section_x(&bs(s))?.generators());
    }
    let rect = ClopenPlaneSet::rectangle(bs("1"), bs("01"));
    println!("mu2([1] x [01]) = {}", rect.measure());
    println!("H meets [1] x [01]: {}", h.meets_rect(&bs("1"), &bs("01")));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
