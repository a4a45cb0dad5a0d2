//! How the LQ noise rate changes fidelity on 7- and 11-node paths.
//!
//! cargo run --release --example lq_sensitivity

use qrepnet::experiment::{sweep_eta_l, ExperimentConfig};
use qrepnet::Topology;

fn main() -> anyhow::Result<()> {
    let cfg = ExperimentConfig {
        topology: Topology::Cylinder(5),
        ..Default::default()
    };
    for s in sweep_eta_l(&cfg, &[0.99, 0.8])? {
        println!("eta_l = {}", s.eta_l);
        for p in s.points.iter().step_by(5) {
            let cols: Vec<String> = p
                .by_path_len
                .iter()
                .map(|(len, b)| format!("len {len}: {:.4}", b.mean))
                .collect();
            println!("  xi {:.2}  {}", p.xi, cols.join("  "));
        }
    }
    Ok(())
}
