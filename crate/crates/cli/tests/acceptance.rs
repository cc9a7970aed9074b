//! Acceptance run: one line per criterion, exit status nonzero if any fails.
//!
//! Criteria 1 to 11 are the seeded property suites; 12 runs the binary twice
//! and compares the bytes. The seed comes from `BISIMKIT_SEED` (default 7).

use std::process::{Command, ExitCode};
use std::time::Instant;

use bisimkit_core::verify::Suite;

const CRITERIA: [&str; 12] = [
    "lifting oracle equivalence",
    "greatest bisimulation soundness and maximality",
    "expansion: bisimilar iff equal canonical forms",
    "rank coherence",
    "tree isomorphism cross-validation",
    "tail-rank recursion",
    "E0 reduction",
    "substructure up and down",
    "sum-process transfer",
    "uniform pipeline",
    "UMLTS pipeline",
    "end-to-end determinism",
];

fn seed() -> u64 {
    std::env::var("BISIMKIT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7)
}

fn verify_bytes(seed: u64) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bisimkit"))
        .args(["verify", "--suite", "all", "--seed", &seed.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!("verify exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn main() -> ExitCode {
    let seed = seed();
    let mut failed = 0;
    for (suite, title) in Suite::ALL.iter().zip(CRITERIA) {
        let start = Instant::now();
        let report = suite.run(seed);
        let verdict = if report.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {:>2} {title}: {} cases, {} failures ({:.2}s)",
            suite.id(),
            report.cases,
            report.failures,
            start.elapsed().as_secs_f64()
        );
        for f in &report.first_failures {
            println!("       {f}");
        }
        if !report.passed {
            failed += 1;
        }
    }
    let det = match (verify_bytes(seed), verify_bytes(seed)) {
        (Ok(a), Ok(b)) if a == b => Ok(a.len()),
        (Ok(_), Ok(_)) => Err("reports differ".to_string()),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    match det {
        Ok(len) => println!("PASS criterion 12 {}: two runs, {len} identical bytes", CRITERIA[11]),
        Err(e) => {
            failed += 1;
            println!("FAIL criterion 12 {}: {e}", CRITERIA[11]);
        }
    }
    println!("{} of 12 criteria passed (seed {seed})", 12 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
