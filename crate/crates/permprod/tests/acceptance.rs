//! Runs the full check suite and prints one line per check. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines live.

use permprod::verify;

#[test]
fn full_suite_passes() {
    let outcomes = verify::run_all();
    assert_eq!(outcomes.len(), 11);
    let mut failed = Vec::new();
    for o in &outcomes {
        println!(
            "[{}] {:<32} {:>6} ms  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.millis,
            o.detail
        );
        if !o.passed {
            failed.push(o.name);
        }
    }
    assert!(failed.is_empty(), "failed checks: {failed:?}");
}
