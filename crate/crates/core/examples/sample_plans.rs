//! Random optimal plans assembled from the decomposition, validated and
//! checked against the minimal displacement sets.

use winf::instances::e4;
use winf::structure::{decompose_measures, minimal_set_inclusion, sample_optimal_plan, validate_plan};
use winf::REPORT_TOL;

fn main() -> winf::Result<()> {
    let inst = e4();
    let dec = decompose_measures(&inst.mu, &inst.nu)?;
    let n = 500;
    for seed in 0..4 {
        let plan = sample_optimal_plan(&dec, n, seed)?;
        let rep = validate_plan(&plan, &dec, REPORT_TOL);
        let cover = minimal_set_inclusion(&plan, &dec.sets, 2.0 * dec.diameter() / n as f64);
        println!(
            "seed {seed}: valid = {}, max displacement {:.4}, source KS {:.4}, covers M± = {}",
            rep.passed, rep.max_displacement, rep.source_ks, cover.covered
        );
    }
    Ok(())
}
