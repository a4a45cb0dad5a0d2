//! Fidelity against HQ fraction on the grid and the cylinder.
//!
//! cargo run --release --example topology_study

use qrepnet::experiment::{sweep_xi, ExperimentConfig};
use qrepnet::Topology;

fn main() -> anyhow::Result<()> {
    for topology in [Topology::Grid(5), Topology::Cylinder(5)] {
        let cfg = ExperimentConfig {
            topology,
            ..Default::default()
        };
        let s = sweep_xi(&cfg)?;
        println!(
            "{topology}: blocking {:.4}, mean fidelity {:.4}, mean path {:.3} nodes",
            s.blocking_probability,
            s.mean_fidelity.unwrap_or(f64::NAN),
            s.mean_path_len.unwrap_or(f64::NAN)
        );
        println!("{:>6} {:>8} {:>8} {:>8}", "xi", "mean", "median", "block");
        for p in s.points.iter().step_by(2) {
            let (mean, median) = p
                .all
                .as_ref()
                .map_or((f64::NAN, f64::NAN), |b| (b.mean, b.median));
            println!(
                "{:>6.2} {mean:>8.4} {median:>8.4} {:>8.4}",
                p.xi, p.blocking_probability
            );
        }
        println!();
    }
    Ok(())
}
