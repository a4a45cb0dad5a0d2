//! Engineered quantum network topologies.
//!
//! The transport core is an `n × n` lattice of repeaters. Node ids are dense
//! and assigned row-major for the core (`row * n + col`), then the `n`
//! sources, then the `n` destinations. Source `i` hangs off core node
//! `(i, 0)`, destination `j` off core node `(j, n - 1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fidelity::check_eta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Source,
    Destination,
    Transport,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Source => "source",
            NodeKind::Destination => "destination",
            NodeKind::Transport => "transport",
        })
    }
}

/// A repeater quality class with its noise rate `η ∈ (0.5, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseClass {
    label: String,
    eta: f64,
}

impl NoiseClass {
    pub fn new(label: impl Into<String>, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self {
            label: label.into(),
            eta,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Grid(usize),
    Cylinder(usize),
}

impl Topology {
    pub fn side(self) -> usize {
        match self {
            Topology::Grid(n) | Topology::Cylinder(n) => n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Grid(_) => "grid",
            Topology::Cylinder(_) => "cylinder",
        }
    }

    /// Parses `grid` or `cylinder` with the given side.
    pub fn from_name(name: &str, n: usize) -> Result<Self> {
        match name {
            "grid" => Ok(Topology::Grid(n)),
            "cylinder" => Ok(Topology::Cylinder(n)),
            other => Err(Error::InvalidParameter(format!(
                "unknown topology '{other}' (expected grid or cylinder)"
            ))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.side())
    }
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    class: Option<NoiseClass>,
}

/// Undirected simple graph of transport nodes plus source/destination tiers.
///
/// The edge set is mutable so that a copy can serve as the residual graph
/// during path allocation.
#[derive(Debug, Clone)]
pub struct NetworkGraph {
    topology: Topology,
    nodes: Vec<Node>,
    adj: Vec<BTreeSet<NodeId>>,
}

impl NetworkGraph {
    pub fn build(topology: Topology) -> Result<Self> {
        let n = topology.side();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "core side must be at least 2, got {n}"
            )));
        }
        if matches!(topology, Topology::Cylinder(_)) && n < 3 {
            // With two rows the wrap edge would duplicate the vertical edge.
            return Err(Error::InvalidParameter(
                "cylinder core side must be at least 3".into(),
            ));
        }

        let core = n * n;
        let mut nodes = Vec::with_capacity(core + 2 * n);
        nodes.extend((0..core).map(|_| Node {
            kind: NodeKind::Transport,
            class: None,
        }));
        nodes.extend((0..n).map(|_| Node {
            kind: NodeKind::Source,
            class: None,
        }));
        nodes.extend((0..n).map(|_| Node {
            kind: NodeKind::Destination,
            class: None,
        }));

        let mut graph = Self {
            topology,
            adj: vec![BTreeSet::new(); nodes.len()],
            nodes,
        };

        for row in 0..n {
            for col in 0..n {
                let u = graph.core_node(row, col);
                if col + 1 < n {
                    graph.add_edge(u, graph.core_node(row, col + 1));
                }
                if row + 1 < n {
                    graph.add_edge(u, graph.core_node(row + 1, col));
                }
            }
        }
        if let Topology::Cylinder(_) = topology {
            for col in 0..n {
                graph.add_edge(graph.core_node(0, col), graph.core_node(n - 1, col));
            }
        }
        for i in 0..n {
            graph.add_edge(graph.source(i), graph.core_node(i, 0));
            graph.add_edge(graph.destination(i), graph.core_node(i, n - 1));
        }
        Ok(graph)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn side(&self) -> usize {
        self.topology.side()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn transport_count(&self) -> usize {
        self.side() * self.side()
    }

    pub fn core_node(&self, row: usize, col: usize) -> NodeId {
        let n = self.side();
        debug_assert!(row < n && col < n);
        NodeId(row * n + col)
    }

    /// `(row, col)` of a transport node.
    pub fn core_position(&self, id: NodeId) -> Option<(usize, usize)> {
        let n = self.side();
        (id.0 < n * n).then(|| (id.0 / n, id.0 % n))
    }

    pub fn source(&self, i: usize) -> NodeId {
        NodeId(self.transport_count() + i)
    }

    pub fn destination(&self, j: usize) -> NodeId {
        NodeId(self.transport_count() + self.side() + j)
    }

    pub fn sources(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.side()).map(|i| self.source(i))
    }

    pub fn destinations(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.side()).map(|j| self.destination(j))
    }

    pub fn transport_nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.transport_count()).map(NodeId)
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id.0].kind
    }

    pub fn class(&self, id: NodeId) -> Option<&NoiseClass> {
        self.nodes[id.0].class.as_ref()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 < self.nodes.len()
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[id.0].iter().copied()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adj[id.0].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.0].contains(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.range(NodeId(u + 1)..).map(move |&v| (NodeId(u), v)))
    }

    fn add_edge(&mut self, u: NodeId, v: NodeId) {
        debug_assert_ne!(u, v);
        self.adj[u.0].insert(v);
        self.adj[v.0].insert(u);
    }

    /// Removes an edge from the residual set; returns whether it was present.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        let removed = self.adj[u.0].remove(&v);
        self.adj[v.0].remove(&u);
        removed
    }

    /// Gives exactly `round(xi · n²)` transport nodes, drawn uniformly
    /// without replacement, the class `hq`; all other transport nodes get `lq`.
    pub fn assign_classes<R: Rng + ?Sized>(
        &mut self,
        xi: f64,
        hq: &NoiseClass,
        lq: &NoiseClass,
        rng: &mut R,
    ) -> Result<usize> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::InvalidParameter(format!("xi {xi} outside [0, 1]")));
        }
        let total = self.transport_count();
        let num_hq = (xi * total as f64).round() as usize;
        for node in self.nodes.iter_mut().take(total) {
            node.class = Some(lq.clone());
        }
        for idx in rand::seq::index::sample(rng, total, num_hq) {
            self.nodes[idx].class = Some(hq.clone());
        }
        Ok(num_hq)
    }

    /// Sets the class of one transport node.
    pub fn set_class(&mut self, id: NodeId, class: NoiseClass) -> Result<()> {
        if self.kind(id) != NodeKind::Transport {
            return Err(Error::InvalidParameter(format!(
                "node {id} is a {} node and cannot carry a noise class",
                self.kind(id)
            )));
        }
        self.nodes[id.0].class = Some(class);
        Ok(())
    }

    pub fn count_class(&self, label: &str) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.class.as_ref().is_some_and(|c| c.label() == label))
            .count()
    }

    /// Writes the node table followed by the edge list.
    ///
    /// ```text
    /// # nodes: id kind class
    /// 0 transport HQ
    /// 25 source -
    /// # edges: u v
    /// 0 1
    /// ```
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# nodes: id kind class")?;
        for (id, node) in self.nodes.iter().enumerate() {
            let class = node.class.as_ref().map_or("-", NoiseClass::label);
            writeln!(out, "{id} {} {class}", node.kind)?;
        }
        writeln!(out, "# edges: u v")?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}
