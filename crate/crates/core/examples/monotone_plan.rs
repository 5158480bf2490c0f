//! The monotone (quantile) coupling of a split target, segment by segment.

use winf::coupling::monotone_coupling;
use winf::instances::e2;

fn main() -> winf::Result<()> {
    let inst = e2();
    let plan = monotone_coupling(&inst.mu, &inst.nu)?;
    for s in plan.segments() {
        println!(
            "t ∈ [{:.3}, {:.3}]: x {:.3} → {:.3}, y {:.3} → {:.3}, displacement {:+.3} → {:+.3}",
            s.t0,
            s.t1,
            s.x0,
            s.x1,
            s.y0,
            s.y1,
            s.displacement_start(),
            s.displacement_end()
        );
    }
    for x in [0.25, 0.99, 1.0, 1.5] {
        println!("T({x}) = {}", plan.map(x));
    }
    Ok(())
}
