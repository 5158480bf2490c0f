//! Rigid parts and free components shared by every optimal plan.

use winf::instances::{e3, e4, random_instance};
use winf::structure::{decompose_measures, partition_residual, target_disjointness_violation};

fn main() -> winf::Result<()> {
    for inst in [e3(), e4(), random_instance(4)] {
        let dec = decompose_measures(&inst.mu, &inst.nu)?;
        println!("{}: rigid mass {:.4} (+) and {:.4} (-)", inst.name, dec.rigid_plus_mass, dec.rigid_minus_mass);
        for c in &dec.components {
            println!("  ]{:.4}, {:.4}[ → [{:.4}, {:.4}], mass {:.4}", c.a, c.b, c.c, c.d, c.mu.mass());
        }
        println!(
            "  residuals {:?}, disjoint targets: {}",
            partition_residual(&dec, 1000),
            target_disjointness_violation(&dec).is_none()
        );
    }
    Ok(())
}
