//! Sequential path selection for a batch of source–destination requests.
//!
//! Requests are served in shuffled order. Each one gets the minimum-weight
//! path on the residual graph, where a path's weight is the sum of the
//! node weights `f(η)` of its transport nodes. The path is accepted only if
//! its end-to-end fidelity reaches the threshold; accepted paths consume
//! their edges, blocked requests consume nothing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fidelity::{end_to_end_fidelity, LinkFidelity, PathComposition};
use crate::topology::{NetworkGraph, NodeId, NodeKind};

/// Map from a node's noise rate to its routing weight.
#[derive(Clone)]
pub enum WeightMapping {
    /// Every transport node weighs 1: shortest path in transport hops.
    NoiseUnaware,
    /// Nodes whose noise rate equals `eta_l` weigh `lq_weight`, all others 1.
    NoiseAware { eta_l: f64, lq_weight: f64 },
    /// Arbitrary mapping; must return a finite positive weight.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl WeightMapping {
    pub fn noise_aware(eta_l: f64, lq_weight: f64) -> Result<Self> {
        if !(lq_weight.is_finite() && lq_weight > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise-aware weight must be positive, got {lq_weight}"
            )));
        }
        Ok(WeightMapping::NoiseAware { eta_l, lq_weight })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        WeightMapping::Custom(Arc::new(f))
    }

    pub fn weight(&self, eta: f64) -> f64 {
        match self {
            WeightMapping::NoiseUnaware => 1.0,
            WeightMapping::NoiseAware { eta_l, lq_weight } => {
                if (eta - eta_l).abs() <= 1e-12 {
                    *lq_weight
                } else {
                    1.0
                }
            }
            WeightMapping::Custom(f) => f(eta),
        }
    }

    /// Short name used in output tables.
    pub fn name(&self) -> &'static str {
        match self {
            WeightMapping::NoiseUnaware => "unaware",
            WeightMapping::NoiseAware { .. } => "aware",
            WeightMapping::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for WeightMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightMapping::NoiseUnaware => f.write_str("NoiseUnaware"),
            WeightMapping::NoiseAware { eta_l, lq_weight } => f
                .debug_struct("NoiseAware")
                .field("eta_l", eta_l)
                .field("lq_weight", lq_weight)
                .finish(),
            WeightMapping::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Node weights of the working graph. Source and destination nodes weigh 0.
pub fn node_weights(g: &NetworkGraph, f: &WeightMapping) -> Result<Vec<f64>> {
    (0..g.node_count())
        .map(NodeId)
        .map(|v| match g.kind(v) {
            NodeKind::Transport => {
                let class = g.class(v).ok_or_else(|| {
                    Error::InvalidParameter(format!("transport node {v} has no noise class"))
                })?;
                let w = f.weight(class.eta());
                if w.is_finite() && w > 0.0 {
                    Ok(w)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "weight mapping gave {w} for eta {}",
                        class.eta()
                    )))
                }
            }
            NodeKind::Source | NodeKind::Destination => Ok(0.0),
        })
        .collect()
}

/// Sum of the weights of the nodes on `path`.
pub fn path_cost(weights: &[f64], path: &[NodeId]) -> f64 {
    path.iter().map(|v| weights[v.0]).sum()
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Minimum-weight path from `s` to `d` on the (residual) graph, or `None`
/// if `d` is unreachable.
///
/// Only transport nodes may appear strictly inside a path. Among all paths
/// of minimum weight, the lexicographically smallest node-id sequence is
/// returned.
///
/// Node weights are handled as arc weights on the split graph: entering
/// node `v` costs `weights[v]`. A Dijkstra pass from `d` yields, for every
/// node, the cheapest remaining cost to reach `d`; the path is then traced
/// forward from `s` taking the smallest-id neighbour that stays on a
/// cheapest route.
pub fn shortest_path_weighted(
    g: &NetworkGraph,
    weights: &[f64],
    s: NodeId,
    d: NodeId,
) -> Option<Vec<NodeId>> {
    if s == d {
        return Some(vec![s]);
    }
    let usable = |v: NodeId| v == s || v == d || g.kind(v) == NodeKind::Transport;

    // to_dest[v]: minimum weight of a path v..d, counting v and d.
    let mut to_dest = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    to_dest[d.0] = weights[d.0];
    heap.push(HeapEntry {
        cost: to_dest[d.0],
        node: d,
    });
    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > to_dest[node.0] {
            continue;
        }
        if node == s {
            continue;
        }
        for v in g.neighbors(node) {
            if !usable(v) || v == d {
                continue;
            }
            let cand = cost + weights[v.0];
            if cand < to_dest[v.0] {
                to_dest[v.0] = cand;
                heap.push(HeapEntry {
                    cost: cand,
                    node: v,
                });
            }
        }
    }
    if !to_dest[s.0].is_finite() {
        return None;
    }

    let mut path = vec![s];
    let mut cur = s;
    while cur != d {
        let remaining = to_dest[cur.0] - weights[cur.0];
        let next = g
            .neighbors(cur)
            .filter(|&v| usable(v) && v != s && !path.contains(&v))
            .find(|&v| to_dest[v.0].is_finite() && nearly_equal(to_dest[v.0], remaining))?;
        path.push(next);
        cur = next;
    }
    Some(path)
}

/// Minimum-weight path under the weight mapping `f`. Fails only if a
/// transport node has no class or `f` yields a non-positive weight.
pub fn shortest_path(
    g: &NetworkGraph,
    s: NodeId,
    d: NodeId,
    f: &WeightMapping,
) -> Result<Option<Vec<NodeId>>> {
    if !g.contains(s) || !g.contains(d) {
        return Err(Error::InvalidParameter(format!(
            "endpoint {s} or {d} not in graph"
        )));
    }
    let weights = node_weights(g, f)?;
    Ok(shortest_path_weighted(g, &weights, s, d))
}

/// A request with its position `theta` (1-based) in the service order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingRequest {
    pub source: NodeId,
    pub destination: NodeId,
    pub theta: usize,
}

/// Randomly permutes the pairs and numbers them 1..=P in the new order.
pub fn shuffle_requests<R: Rng + ?Sized>(
    pairs: &[(NodeId, NodeId)],
    rng: &mut R,
) -> Result<Vec<RoutingRequest>> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter(
            "no source-destination pairs".into(),
        ));
    }
    let mut order = pairs.to_vec();
    order.shuffle(rng);
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(i, (source, destination))| RoutingRequest {
            source,
            destination,
            theta: i + 1,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockReason {
    NoPath,
    BelowThreshold,
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockReason::NoPath => "no_path",
            BlockReason::BelowThreshold => "below_threshold",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Allocated {
        path: Vec<NodeId>,
        composition: PathComposition,
        fidelity: f64,
    },
    Blocked(BlockReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathAllocation {
    pub request: RoutingRequest,
    pub outcome: Outcome,
}

impl PathAllocation {
    pub fn is_allocated(&self) -> bool {
        matches!(self.outcome, Outcome::Allocated { .. })
    }

    pub fn fidelity(&self) -> Option<f64> {
        match &self.outcome {
            Outcome::Allocated { fidelity, .. } => Some(*fidelity),
            Outcome::Blocked(_) => None,
        }
    }

    pub fn path(&self) -> Option<&[NodeId]> {
        match &self.outcome {
            Outcome::Allocated { path, .. } => Some(path),
            Outcome::Blocked(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    /// One entry per request, in service (theta) order.
    pub allocations: Vec<PathAllocation>,
    pub blocked: usize,
    /// Edge set left after all allocations.
    pub residual: NetworkGraph,
}

/// Composition of the swapping (transport) nodes of a path.
pub fn path_composition(g: &NetworkGraph, path: &[NodeId]) -> PathComposition {
    PathComposition::from_classes(
        path.iter()
            .filter(|&&v| g.kind(v) == NodeKind::Transport)
            .filter_map(|&v| g.class(v)),
    )
}

/// Serves `requests` in theta order on a copy of `g`.
pub fn allocate_batch(
    g: &NetworkGraph,
    requests: &[RoutingRequest],
    f: &WeightMapping,
    f_bar: f64,
    link: LinkFidelity,
) -> Result<BatchResult> {
    let mut order = requests.to_vec();
    order.sort_by_key(|r| r.theta);
    if order.iter().enumerate().any(|(i, r)| r.theta != i + 1) {
        return Err(Error::InvalidParameter(
            "request thetas must be a permutation of 1..=P".into(),
        ));
    }
    for r in &order {
        if !g.contains(r.source)
            || !g.contains(r.destination)
            || g.kind(r.source) != NodeKind::Source
            || g.kind(r.destination) != NodeKind::Destination
        {
            return Err(Error::InvalidParameter(format!(
                "request {} -> {} does not join a source to a destination",
                r.source, r.destination
            )));
        }
    }

    let weights = node_weights(g, f)?;
    let mut residual = g.clone();
    let mut allocations = Vec::with_capacity(order.len());
    let mut blocked = 0;
    for request in order {
        let outcome = match shortest_path_weighted(
            &residual,
            &weights,
            request.source,
            request.destination,
        ) {
            None => Outcome::Blocked(BlockReason::NoPath),
            Some(path) => {
                let composition = path_composition(g, &path);
                let fidelity = end_to_end_fidelity(&composition, link);
                if fidelity >= f_bar {
                    for hop in path.windows(2) {
                        residual.remove_edge(hop[0], hop[1]);
                    }
                    Outcome::Allocated {
                        path,
                        composition,
                        fidelity,
                    }
                } else {
                    Outcome::Blocked(BlockReason::BelowThreshold)
                }
            }
        };
        if let Outcome::Blocked(_) = outcome {
            blocked += 1;
        }
        allocations.push(PathAllocation { request, outcome });
    }
    Ok(BatchResult {
        allocations,
        blocked,
        residual,
    })
}
