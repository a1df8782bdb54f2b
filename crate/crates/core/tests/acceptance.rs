//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use gwp_core::selftest::{run_all, SelftestOptions};

fn main() -> ExitCode {
    let start = Instant::now();
    let outcomes = run_all(&SelftestOptions::default());
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "{} of {} criteria passed in {elapsed:.2}s",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed == 0 && elapsed < 60.0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
