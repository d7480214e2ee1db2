// Checking assignments against Cichoń's diagram and the random-extension rules.
//
// Run with `cargo run --example cichon_diagram`.

use std::error::Error;

use forcing_lab::diagram::{
    check_assignment, check_extension_pair, random_extension_constraints, render_violations, CardinalLabel,
    DiagramAssignment, Node,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a1 = CardinalLabel::ALEPH_1;
    let a2 = CardinalLabel::aleph(2).expect("label");

    let bad = DiagramAssignment::constant(a2).with(Node::CovN, a1);
    print!("{}", render_violations(&check_assignment(&bad)));
    let bad = DiagramAssignment::constant(a1).with(Node::CovM, a2).with(Node::AddM, a2);
    print!("{}", render_violations(&check_assignment(&bad)));

    let ground = DiagramAssignment::constant(a1)
        .with(Node::B, a2)
        .with(Node::D, a2)
        .with(Node::NonM, a2)
        .with(Node::CofM, a2)
        .with(Node::NonN, a2)
        .with(Node::CofN, a2)
        .with(Node::CovStarN, a2);
    println!("constraints on a random extension:");
    for c in random_extension_constraints(&ground)? {
        println!("  {c}");
    }

    let ground = DiagramAssignment::constant(a1)
        .with(Node::CovStarN, a2)
        .with(Node::NonM, a2)
        .with(Node::D, a2)
        .with(Node::CofM, a2)
        .with(Node::CofN, a2);
    let ext = ground.clone().with(Node::CovN, a2);
    println!("cov(N) raised to cov*(N): accepted = {}", check_extension_pair(&ground, &ext).accepted());
    let ext = ext.with(Node::B, a2);
    println!("b moved as well: accepted = {}", check_extension_pair(&ground, &ext).accepted());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
