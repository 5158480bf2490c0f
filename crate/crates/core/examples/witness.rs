//! Below the critical distance an indicator pair certifies infeasibility.

use winf::coupling::{monotone_coupling, winf_value};
use winf::instances::{e1, e2};
use winf::potentials::criticality_witness;

fn main() -> winf::Result<()> {
    for inst in [e1(), e2()] {
        let lambda = winf_value(&monotone_coupling(&inst.mu, &inst.nu)?);
        for factor in [0.5, 0.9, 1.0] {
            match criticality_witness(&inst.mu, &inst.nu, factor * lambda, 1e-2) {
                Ok(w) => println!(
                    "{} at {factor}·λ_C: S = [{:.3}, {:.3}] on the {:?} side, value {:.4}",
                    inst.name, w.lo, w.hi, w.side, w.value
                ),
                Err(e) => println!("{} at {factor}·λ_C: {e}", inst.name),
            }
        }
    }
    Ok(())
}
