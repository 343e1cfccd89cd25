//! Runs every claim at its stated tolerance and prints one line per check.
//! Lines go straight to stderr so they show up even when the test passes.

use std::io::Write;

use tiltscale::verify::{run_claim, VerifyConfig, CLAIM_KEYS};

#[test]
fn acceptance() {
    let cfg = VerifyConfig::default();
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for key in CLAIM_KEYS {
        let r = run_claim(key, &cfg).unwrap_or_else(|e| panic!("{key}: {e}"));
        writeln!(err, "{}", r.summary_line()).unwrap();
        for line in r.check_lines() {
            writeln!(err, "    {line}").unwrap();
        }
        for rep in r.reports() {
            writeln!(
                err,
                "        seed {}: statistic {:.6} threshold {:.6} {}",
                rep.seed,
                rep.statistic,
                rep.threshold,
                if rep.passed { "ok" } else { "fail" }
            )
            .unwrap();
        }
        if !r.passed {
            failed.push(key);
        }
    }
    assert!(failed.is_empty(), "failed claims: {failed:?}");
}
