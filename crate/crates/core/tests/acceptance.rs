//! Runs every acceptance criterion and prints one line per criterion.

use std::time::Instant;

use hcft::verify::{run, Suite, VerifyOptions};

const CRITERIA: [(u32, Suite); 12] = [
    (1, Suite::Clifford),
    (2, Suite::Trace),
    (3, Suite::PbwOracle),
    (4, Suite::PropInversion),
    (5, Suite::ThmIntertwine),
    (6, Suite::ThmConvft),
    (7, Suite::ConvTwoPath),
    (8, Suite::DeltaIdentity),
    (9, Suite::ThmBanach),
    (10, Suite::Pw),
    (11, Suite::ProductFt),
    (12, Suite::IntegralInvariance),
];

fn main() {
    let opts = VerifyOptions { n_max: 5, tol: None, seed: 0 };
    let start = Instant::now();
    let mut failed = Vec::new();
    for (id, suite) in CRITERIA {
        let report = run(suite, &opts).unwrap_or_else(|e| panic!("criterion {id} ({suite}) errored: {e}"));
        println!(
            "criterion {id:>2} {:<20} {}  {}/{} checks  {:.2} s",
            suite.name(),
            if report.pass { "PASS" } else { "FAIL" },
            report.checks.iter().filter(|c| c.pass).count(),
            report.checks.len(),
            report.seconds
        );
        if !report.pass {
            print!("{}", report.table());
            failed.push(id);
        }
    }
    let total = start.elapsed().as_secs_f64();
    let in_time = total < 180.0;
    println!("total time {total:.1} s (< 180 s): {}", if in_time { "PASS" } else { "FAIL" });
    if !failed.is_empty() || !in_time {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
