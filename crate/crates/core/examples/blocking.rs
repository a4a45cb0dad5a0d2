//! Blocking probability under a fidelity threshold for both weight mappings.
//!
//! cargo run --release --example blocking

use qrepnet::experiment::{study_blocking, xi_grid, ExperimentConfig, Mapping};
use qrepnet::Topology;

fn main() -> anyhow::Result<()> {
    let cfg = ExperimentConfig {
        topology: Topology::Cylinder(5),
        xi_values: xi_grid(5).into_iter().step_by(3).collect(),
        ..Default::default()
    };
    let points = study_blocking(
        &cfg,
        &[Mapping::NoiseUnaware, Mapping::aware()],
        &[0.53, 0.7, 0.8],
    )?;
    println!(
        "{:>8} {:>6} {:>6} {:>8}",
        "mapping", "f_bar", "xi", "p_block"
    );
    for p in points {
        println!(
            "{:>8} {:>6.2} {:>6.2} {:>8.4}",
            p.mapping, p.f_bar, p.xi, p.blocking_probability
        );
    }
    Ok(())
}
