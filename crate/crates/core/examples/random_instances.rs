//! Reproducible random instances, with a custom shape.

use winf::coupling::{maximal_displacement_sets, monotone_coupling};
use winf::instances::{random_instance, random_instance_with, RandomShape};

fn main() -> winf::Result<()> {
    let inst = random_instance(7);
    println!("{}: μ has {} pieces, ν has {}", inst.name, inst.mu.pieces().len(), inst.nu.pieces().len());

    let shape = RandomShape { max_pieces: 2, gap: (0.0, 0.0), ..RandomShape::default() };
    for seed in 0..3 {
        let inst = random_instance_with(seed, &shape);
        let sets = maximal_displacement_sets(&monotone_coupling(&inst.mu, &inst.nu)?)?;
        println!(
            "{}: λ_C = {:.4}, M+ = {:?}, M- = {:?}",
            inst.name,
            sets.lambda_c,
            sets.m_plus.components(),
            sets.m_minus.components()
        );
    }
    Ok(())
}
