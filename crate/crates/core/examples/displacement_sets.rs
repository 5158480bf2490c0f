//! Where the monotone plan moves mass by exactly `±λ_C`.

use winf::coupling::{maximal_displacement_sets, monotone_coupling};
use winf::instances::builtin;

fn main() -> winf::Result<()> {
    for inst in builtin() {
        let sets = maximal_displacement_sets(&monotone_coupling(&inst.mu, &inst.nu)?)?;
        println!("{}: λ_C = {}", inst.name, sets.lambda_c);
        println!("  M+ = {:?}", sets.m_plus.components());
        println!("  M- = {:?}", sets.m_minus.components());
        println!("  M+ ∩ M- = {:?}", sets.crossing_points().components());
    }
    Ok(())
}
