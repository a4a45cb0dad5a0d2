//! Builds a network, assigns noise classes and prints its edge list.
//!
//! cargo run --example build_topology -- [grid|cylinder] [n] [xi]

use qrepnet::rng::{substream, Purpose};
use qrepnet::{NetworkGraph, NoiseClass, Topology};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("cylinder");
    let n: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let xi: f64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(0.5);

    let mut g = NetworkGraph::build(Topology::from_name(name, n)?)?;
    let mut rng = substream(7, Purpose::Trial, 0, 0, 0);
    let hq = NoiseClass::new("HQ", 0.999)?;
    let lq = NoiseClass::new("LQ", 0.8)?;
    let placed = g.assign_classes(xi, &hq, &lq, &mut rng)?;

    eprintln!(
        "{}: {} nodes, {} edges, {placed} HQ of {} transport nodes",
        g.topology(),
        g.node_count(),
        g.edge_count(),
        g.transport_count()
    );
    g.write_edge_list(std::io::stdout().lock())?;
    Ok(())
}
