//! Critical distance `W∞(μ, ν)` of the built-in instances and a random one.

use winf::coupling::{monotone_coupling, winf_value};
use winf::instances::{builtin, random_instance};

fn main() -> winf::Result<()> {
    let mut all = builtin();
    all.push(random_instance(42));
    for inst in all {
        let plan = monotone_coupling(&inst.mu, &inst.nu)?;
        println!("{:<10} W∞ = {}", inst.name, winf_value(&plan));
    }
    Ok(())
}
