//! Two bottleneck matchings of equi-quantile samples against the exact value.

use winf::coupling::{monotone_coupling, winf_value};
use winf::instances::random_instance;
use winf::oracle::{sample_quantile_grid, sorted_matching_bottleneck, threshold_matching_bottleneck};
use winf::structure::support_diameter;

fn main() -> winf::Result<()> {
    let n = 1000;
    for seed in 0..5 {
        let inst = random_instance(seed);
        let xs = sample_quantile_grid(&inst.mu, n)?;
        let ys = sample_quantile_grid(&inst.nu, n)?;
        let exact = winf_value(&monotone_coupling(&inst.mu, &inst.nu)?);
        println!(
            "{}: exact {:.6}, sorted {:.6}, threshold {:.6}, allowed gap {:.4}",
            inst.name,
            exact,
            sorted_matching_bottleneck(&xs, &ys)?,
            threshold_matching_bottleneck(&xs, &ys)?,
            2.0 * support_diameter(&inst.mu, &inst.nu) / n as f64
        );
    }
    Ok(())
}
