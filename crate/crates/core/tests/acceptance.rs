//! End-to-end acceptance gate: runs every verification criterion at its
//! stated regime and prints one pass/fail line per criterion. Run with
//! `cargo test -p teamlog --test acceptance -- --nocapture` to see the
//! report; the CLI exposes the same suite as `teamlog suite acceptance`.

use teamlog::suite;

/// The informational performance ladder's top size inside `cargo test`;
/// `teamlog suite perf` runs the full ladder to n = 30. Override with
/// TEAMLOG_PERF_MAX_N.
fn perf_max_n() -> u32 {
    std::env::var("TEAMLOG_PERF_MAX_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(14)
}

#[test]
fn acceptance_criteria() {
    let results = suite::run_all(perf_max_n());
    let mut failed = Vec::new();
    for r in &results {
        let status = if r.passed {
            "PASS"
        } else if r.informational {
            "INFO(failed)"
        } else {
            "FAIL"
        };
        println!(
            "[{status}] criterion {:2} ({} ms): {} — {}",
            r.id, r.millis, r.name, r.detail
        );
        if !r.passed && !r.informational {
            failed.push(r.id);
        }
    }
    assert!(
        failed.is_empty(),
        "acceptance criteria failed: {failed:?}"
    );
    // The informational perf probe must still have produced a report (its
    // guard-trip half is a real check).
    let perf = results.iter().find(|r| r.id == 10).expect("perf entry");
    assert!(perf.passed, "perf probe failed: {}", perf.detail);
}
