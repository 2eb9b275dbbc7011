//! The eleven acceptance criteria, one pass/fail line each. Runs without the
//! libtest harness so the lines always reach the output.

use std::process::ExitCode;

use scattered_core::selftest::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failures = Vec::new();
    for (id, _, _) in CRITERIA {
        let r = run_criterion(id, false).expect("known criterion");
        println!("{}", r.line());
        let in_time = r.limit.is_none_or(|limit| r.elapsed <= limit);
        if !r.passed || !in_time {
            failures.push(id);
        }
    }
    if failures.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failures:?}");
        ExitCode::FAILURE
    }
}
