//! Per-theta mean fidelity for noise-unaware and noise-aware routing.
//!
//! cargo run --release --example noise_awareness

use qrepnet::experiment::{study_noise_awareness, ExperimentConfig, Mapping};
use qrepnet::Topology;

fn main() -> anyhow::Result<()> {
    let xis = [0.2, 0.4, 0.6, 0.8];
    let cfg = ExperimentConfig {
        topology: Topology::Cylinder(5),
        xi_values: xis.to_vec(),
        ..Default::default()
    };
    let mappings = [Mapping::NoiseUnaware, Mapping::aware()];
    let study = study_noise_awareness(&cfg, &mappings)?;
    for m in mappings {
        println!("{}", m.name());
        for xi in xis {
            let row: Vec<String> = (1..=5)
                .map(|t| {
                    study
                        .mean(m.name(), xi, t)
                        .map_or("-".into(), |v| format!("{v:.4}"))
                })
                .collect();
            println!("  xi {xi:.1}  theta 1..5: {}", row.join(" "));
        }
    }
    Ok(())
}
