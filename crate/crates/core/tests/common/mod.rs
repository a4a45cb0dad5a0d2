//! Test-only oracles, independent of the library's routing code.
#![allow(dead_code)]

use qrepnet::topology::{NetworkGraph, NodeId, NodeKind};

/// Every simple path from `s` to `d` whose interior is made of transport
/// nodes, found by depth-first enumeration.
pub fn all_simple_paths(g: &NetworkGraph, s: NodeId, d: NodeId) -> Vec<Vec<NodeId>> {
    fn dfs(g: &NetworkGraph, d: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let cur = *path.last().unwrap();
        if cur == d {
            out.push(path.clone());
            return;
        }
        for v in g.neighbors(cur) {
            if path.contains(&v) {
                continue;
            }
            if v != d && g.kind(v) != NodeKind::Transport {
                continue;
            }
            path.push(v);
            dfs(g, d, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    dfs(g, d, &mut vec![s], &mut out);
    out
}

/// Minimum cost over all simple paths and the lexicographically smallest
/// path achieving it (costs compared with a small tolerance).
pub fn brute_force_shortest(
    g: &NetworkGraph,
    weights: &[f64],
    s: NodeId,
    d: NodeId,
) -> Option<(f64, Vec<NodeId>)> {
    let paths = all_simple_paths(g, s, d);
    let cost = |p: &[NodeId]| p.iter().map(|v| weights[v.0]).sum::<f64>();
    let best = paths.iter().map(|p| cost(p)).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let argmin = paths
        .into_iter()
        .filter(|p| (cost(p) - best).abs() <= 1e-9 * (1.0 + best))
        .min()
        .unwrap();
    Some((best, argmin))
}
