//! The set `B_r(x)` of partners that saturate the potentials, on and off `M⁺`.

use winf::instances::e4;
use winf::potentials::{b_r_set, kantorovich_pair, RhoConfig};

fn main() -> winf::Result<()> {
    let inst = e4();
    let k = kantorovich_pair(&inst.mu, &inst.nu, &RhoConfig::default())?;
    for x in [0.5, 1.0, 1.5, 1.75, 2.0] {
        let b = b_r_set(&k.phi, &k.psi, k.lambda, x);
        println!("B_r({x}) = {:?}", b.components());
    }
    Ok(())
}
