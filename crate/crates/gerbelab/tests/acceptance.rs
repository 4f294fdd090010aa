//! End-to-end acceptance run: executes the full property suite and prints one
//! status line per check.

use gerbelab::suite::{render_report, run_all};

#[test]
fn acceptance_suite() {
    let outcomes = run_all();
    print!("{}", render_report(&outcomes));
    assert_eq!(outcomes.len(), 12);
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name.as_str())
        .collect();
    assert!(failed.is_empty(), "failing checks: {failed:?}");
}
