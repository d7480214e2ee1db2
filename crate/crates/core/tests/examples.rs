//! Every example under `examples/` runs to completion.

#[allow(dead_code)]
mod clopen_algebra {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/clopen_algebra.rs"));
}

#[test]
fn clopen_algebra_runs() {
    clopen_algebra::run_example().expect("clopen_algebra example runs");
}

#[allow(dead_code)]
mod slalom_refine {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/slalom_refine.rs"));
}

#[test]
fn slalom_refine_runs() {
    slalom_refine::run_example().expect("slalom_refine example runs");
}

#[allow(dead_code)]
mod extend_condition {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/extend_condition.rs"));
}

#[test]
fn extend_condition_runs() {
    extend_condition::run_example().expect("extend_condition example runs");
}

#[allow(dead_code)]
mod null_avoidance_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/null_avoidance_run.rs"));
}

#[test]
fn null_avoidance_run_runs() {
    null_avoidance_run::run_example().expect("null_avoidance_run example runs");
}

#[allow(dead_code)]
mod centered_pieces {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/centered_pieces.rs"));
}

#[test]
fn centered_pieces_runs() {
    centered_pieces::run_example().expect("centered_pieces example runs");
}

#[allow(dead_code)]
mod smz_cover {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/smz_cover.rs"));
}

#[test]
fn smz_cover_runs() {
    smz_cover::run_example().expect("smz_cover example runs");
}

#[allow(dead_code)]
mod rapid_filter {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rapid_filter.rs"));
}

#[test]
fn rapid_filter_runs() {
    rapid_filter::run_example().expect("rapid_filter example runs");
}

#[allow(dead_code)]
mod cichon_diagram {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cichon_diagram.rs"));
}

#[test]
fn cichon_diagram_runs() {
    cichon_diagram::run_example().expect("cichon_diagram example runs");
}
