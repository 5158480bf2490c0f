//! Dual feasibility of the potentials on a batch of random instances, and a
//! band that is too wide for them.

use winf::instances::{e4, random_instance};
use winf::potentials::{check_dual_feasibility, kantorovich_pair, FeasibilityOptions, RhoConfig};

fn main() -> winf::Result<()> {
    let opts = FeasibilityOptions::default();
    for seed in 0..5 {
        let inst = random_instance(seed);
        let k = kantorovich_pair(&inst.mu, &inst.nu, &RhoConfig::default())?;
        let rep = check_dual_feasibility(&k.phi, &k.psi, k.lambda, &inst.mu, &inst.nu, &opts);
        println!(
            "{}: λ_C = {:.4}, feasible = {}, worst φ+ψ = {:.2e}, dual value = {:.2e}",
            inst.name, k.lambda, rep.feasible, rep.worst_violation, rep.dual_value
        );
    }

    let inst = e4();
    let k = kantorovich_pair(&inst.mu, &inst.nu, &RhoConfig::default())?;
    let rep = check_dual_feasibility(&k.phi, &k.psi, 1.0, &inst.mu, &inst.nu, &opts);
    println!("E4 with λ = 1: feasible = {}, worst pair {:?}", rep.feasible, rep.violating_pair);
    Ok(())
}
