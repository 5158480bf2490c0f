//! ∞-cyclical monotonicity of a sampled monotone plan and of a transposition.

use winf::coupling::monotone_coupling;
use winf::instances::e4;
use winf::structure::{infcm_check, DiscretePlan, PlanAtom};

fn main() -> winf::Result<()> {
    let inst = e4();
    let plan = monotone_coupling(&inst.mu, &inst.nu)?;
    let atoms = plan.sample_pairs(200).into_iter().map(|(x, y)| PlanAtom { x, y, w: 1.0 / 200.0 }).collect();
    let rep = infcm_check(&DiscretePlan::new(atoms), 4)?;
    println!("monotone plan, 200 atoms: passed = {}", rep.passed);

    let swapped = DiscretePlan::new(vec![PlanAtom { x: 0.0, y: 2.0, w: 0.5 }, PlanAtom { x: 1.0, y: 1.0, w: 0.5 }]);
    let rep = infcm_check(&swapped, 4)?;
    println!("transposition: passed = {}, violating tuple {:?}", rep.passed, rep.violating_tuple);
    Ok(())
}
