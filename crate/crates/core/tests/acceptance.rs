//! The ten acceptance criteria at their stated tolerances and sample budgets.
//!
//! Run with `cargo test -p anticonc --test acceptance -- --nocapture` to see
//! one line per criterion.

use anticonc::verify::{run_criterion, Profile};

const SEED: u64 = 20_240_601;

#[test]
fn acceptance_criteria() {
    let profile = Profile::ACCEPTANCE;
    let mut failed = Vec::new();
    for id in 1..=10 {
        let start = std::time::Instant::now();
        let outcome = run_criterion(id, &profile, SEED);
        println!("{outcome}  [{:.1}s]", start.elapsed().as_secs_f64());
        if !outcome.passed {
            println!("    details: {}", outcome.details);
            failed.push(id);
        }
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
