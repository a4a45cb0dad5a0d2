//! One time slot of sequential path allocation, with and without noise-aware
//! weights.
//!
//! cargo run --example route_single_slot

use qrepnet::experiment::draw_pairing;
use qrepnet::rng::{substream, Purpose};
use qrepnet::routing::{allocate_batch, shuffle_requests, Outcome, WeightMapping};
use qrepnet::{LinkFidelity, NetworkGraph, NoiseClass, Topology};

fn main() -> anyhow::Result<()> {
    let mut g = NetworkGraph::build(Topology::Cylinder(5))?;
    let mut rng = substream(3, Purpose::Trial, 0, 0, 0);
    g.assign_classes(
        0.6,
        &NoiseClass::new("HQ", 0.999)?,
        &NoiseClass::new("LQ", 0.8)?,
        &mut rng,
    )?;

    let pairing = draw_pairing(5, 3, 0);
    let pairs: Vec<_> = pairing
        .iter()
        .enumerate()
        .map(|(i, &j)| (g.source(i), g.destination(j)))
        .collect();
    let requests = shuffle_requests(&pairs, &mut rng)?;
    let link = LinkFidelity::default();

    for mapping in [
        WeightMapping::NoiseUnaware,
        WeightMapping::noise_aware(0.8, 100.0)?,
    ] {
        println!("{}:", mapping.name());
        let batch = allocate_batch(&g, &requests, &mapping, 0.0, link)?;
        for a in &batch.allocations {
            let r = a.request;
            match &a.outcome {
                Outcome::Allocated {
                    path,
                    composition,
                    fidelity,
                } => println!(
                    "  theta {} {}->{}: {} nodes, {} LQ, F = {fidelity:.4}",
                    r.theta,
                    r.source.index(),
                    r.destination.index(),
                    path.len(),
                    composition.count_of("LQ"),
                ),
                Outcome::Blocked(reason) => println!(
                    "  theta {} {}->{}: blocked ({reason})",
                    r.theta,
                    r.source.index(),
                    r.destination.index()
                ),
            }
        }
        println!("  residual edges: {}", batch.residual.edge_count());
    }
    Ok(())
}
