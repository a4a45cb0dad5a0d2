//! End-to-end fidelity of a repeater chain as HQ nodes are swapped for LQ ones.
//!
//! cargo run --example fidelity_chain

use qrepnet::fidelity::{end_to_end_fidelity, iterate_swaps, LinkFidelity, PathComposition};
use qrepnet::NoiseClass;

fn main() -> anyhow::Result<()> {
    let link = LinkFidelity::new(0.975)?;
    let hq = NoiseClass::new("HQ", 0.999)?;
    let lq = NoiseClass::new("LQ", 0.8)?;

    println!("7-node path, link F = {}", link.value());
    println!("{:>4} {:>4} {:>10}", "n_h", "n_l", "F");
    for n_l in 0..=7 {
        let comp = PathComposition::new().with(&hq, 7 - n_l).with(&lq, n_l);
        println!(
            "{:>4} {:>4} {:>10.6}",
            7 - n_l,
            n_l,
            end_to_end_fidelity(&comp, link)
        );
    }

    // Swapping one node at a time gives the same number.
    let etas = [0.999, 0.8, 0.999, 0.999, 0.8, 0.999, 0.999];
    println!(
        "\nsequential swaps over {etas:?}: {:.6}",
        iterate_swaps(&etas, link)?
    );
    Ok(())
}
