//! The invariant suite behind `winf selftest`.

use winf::selftest::{run_selftest, SelftestOptions};

fn main() {
    let rep = run_selftest(&SelftestOptions { plan_seeds: 2, ..SelftestOptions::default() });
    for c in &rep.checks {
        println!("{:<4} {:<4} {}", if c.passed { "ok" } else { "FAIL" }, c.instance, c.check);
    }
    println!("all passed: {}", rep.passed);
}
