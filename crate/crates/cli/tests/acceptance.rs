//! One PASS/FAIL line per acceptance criterion.
//!
//! A suite that errors always fails the target. Failed criteria fail it only
//! with `SRRW_ACCEPTANCE_STRICT=1`; `srrw verify all` gives the strict exit
//! status directly.

use std::process::ExitCode;

use srrw_cli::suites::{run_suite, DEFAULT_SEED, SUITES};

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful for this target.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let strict = std::env::var("SRRW_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let (mut failed, mut errored) = (0, 0);
    for suite in SUITES {
        match run_suite(suite, DEFAULT_SEED) {
            Ok(report) => {
                let total = report.rows.len();
                let ok = report.rows.iter().filter(|r| r.pass).count();
                let verdict = if report.pass() { "PASS" } else { "FAIL" };
                println!("{verdict} {:<4} {:<15} {ok}/{total} checks  {:.1}s", report.label, report.name, report.seconds);
                for row in report.failures() {
                    println!("      failed: {} expected {} observed {} tolerance {}", row.criterion, row.expected, row.observed, row.tolerance);
                }
                if !report.pass() {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL {:<4} {:<15} error: {e:#}", suite.label, suite.name);
                failed += 1;
                errored += 1;
            }
        }
    }
    println!("{} of {} criteria passed", SUITES.len() - failed, SUITES.len());
    if errored == 0 && (failed == 0 || !strict) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
