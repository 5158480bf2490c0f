//! Non-trivial Kantorovich potentials, printed as breakpoint tables.

use winf::instances::e4;
use winf::potentials::{kantorovich_pair, RhoConfig};

fn main() -> winf::Result<()> {
    let inst = e4();
    let k = kantorovich_pair(&inst.mu, &inst.nu, &RhoConfig::default())?;
    println!("λ_C = {}", k.lambda);
    for (name, f) in [("phi", &k.phi), ("psi", &k.psi)] {
        println!("{name}: {} on the far left", f.left_value());
        for b in f.breakpoints() {
            println!("  from x = {:<6} value {:+.4}, slope {:+.4}, jump {:+.4}", b.x, b.value, b.slope, f.jump_at(b.x));
        }
    }
    println!("∫φ dμ = {:+.6}", inst.mu.integrate(&k.phi));
    println!("∫ψ dν = {:+.6}", inst.nu.integrate(&k.psi));
    Ok(())
}
