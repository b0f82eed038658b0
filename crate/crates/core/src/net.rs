//! Graph representation of multi-antenna wireless networks: antenna-level
//! directed edges between super-nodes, min-cut and edge-disjoint paths via
//! unit-capacity max-flow, cut enumeration, cut transfer patterns, and the
//! structural checks (shortcuts, cycles, duplex schedules).

use crate::poly::{Poly, PolyMatrix, Var};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

/// Hard cap on super-node count for exhaustive cut enumeration.
pub const CUT_ENUM_NODE_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("node {0:?} is unknown")]
    UnknownNode(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("node {0:?} must have at least one antenna")]
    NoAntennas(String),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {edge} uses antenna {antenna} beyond node {node:?}'s antenna count")]
    AntennaOutOfRange { edge: usize, node: String, antenna: usize },
    #[error("expected exactly one {0} node, found {1}")]
    WrongTerminalCount(&'static str, usize),
    #[error("cut enumeration over {0} super-nodes would be exponential (limit {CUT_ENUM_NODE_LIMIT})")]
    TooManyNodesForCuts(usize),
    #[error("path is not a directed path of this network")]
    InvalidPath,
    #[error("edge index {0} out of range")]
    BadEdgeIndex(usize),
    #[error("invalid network description: {0}")]
    BadDescription(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Relay,
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Duplex {
    Full,
    Half,
}

/// A terminal: a node with one or more antennas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperNode {
    pub id: String,
    pub antennas: usize,
    pub role: Role,
    pub duplex: Duplex,
}

/// An antenna-level endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Antenna {
    pub node: usize,
    pub index: usize,
}

/// A directed antenna-level edge carrying one i.i.d. fading variable.
/// The variable id doubles as the edge id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: Antenna,
    pub to: Antenna,
    pub var: Var,
}

/// A source/sink-separating partition of the super-nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub source_side: BTreeSet<usize>,
    /// Indices of edges crossing from the source side to its complement.
    pub crossing_edges: Vec<usize>,
}

/// Result of the min-cut computation; an unreachable sink is a distinguished
/// outcome rather than an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinCut {
    Connected(usize),
    Disconnected,
}

impl MinCut {
    pub fn value(self) -> usize {
        match self {
            MinCut::Connected(m) => m,
            MinCut::Disconnected => 0,
        }
    }
}

/// Symbolic cut transfer matrix together with its antenna labels.
#[derive(Debug, Clone)]
pub struct CutPattern {
    /// Rows: receiving antennas (heads of crossing edges), sorted.
    pub rx: Vec<Antenna>,
    /// Columns: transmitting antennas (tails of crossing edges), sorted.
    pub tx: Vec<Antenna>,
    pub matrix: PolyMatrix,
}

/// Immutable network graph; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGraph {
    nodes: Vec<SuperNode>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl NetworkGraph {
    pub fn new(nodes: Vec<SuperNode>, ends: Vec<(Antenna, Antenna)>) -> Result<Self, NetError> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n.id.clone()) {
                return Err(NetError::DuplicateNode(n.id.clone()));
            }
            if n.antennas == 0 {
                return Err(NetError::NoAntennas(n.id.clone()));
            }
        }
        let mut edges = Vec::with_capacity(ends.len());
        for (i, (from, to)) in ends.into_iter().enumerate() {
            if from.node == to.node {
                return Err(NetError::SelfLoop(i));
            }
            for a in [from, to] {
                let n = nodes.get(a.node).ok_or_else(|| NetError::BadDescription(
                    format!("edge {i} references node index {}", a.node),
                ))?;
                if a.index >= n.antennas {
                    return Err(NetError::AntennaOutOfRange {
                        edge: i,
                        node: n.id.clone(),
                        antenna: a.index,
                    });
                }
            }
            edges.push(Edge { from, to, var: i as Var });
        }
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from.node].push(i);
            in_edges[e.to.node].push(i);
        }
        Ok(NetworkGraph { nodes, edges, out_edges, in_edges })
    }

    pub fn nodes(&self) -> &[SuperNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, id: &str) -> Result<usize, NetError> {
        self.nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| NetError::UnknownNode(id.to_string()))
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    pub fn is_full_duplex(&self) -> bool {
        self.nodes.iter().all(|n| n.duplex == Duplex::Full)
    }

    fn terminal(&self, role: Role, name: &'static str) -> Result<usize, NetError> {
        let found: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].role == role)
            .collect();
        if found.len() != 1 {
            return Err(NetError::WrongTerminalCount(name, found.len()));
        }
        Ok(found[0])
    }

    pub fn source(&self) -> Result<usize, NetError> {
        self.terminal(Role::Source, "source")
    }

    pub fn sink(&self) -> Result<usize, NetError> {
        self.terminal(Role::Sink, "sink")
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].role == Role::Sink)
            .collect()
    }

    /// Minimum number of antenna-level edges over all source/sink cuts,
    /// computed as a unit-capacity max-flow.
    pub fn min_cut_edges(&self) -> Result<MinCut, NetError> {
        let (s, t) = (self.source()?, self.sink()?);
        Ok(self.min_cut_between(s, t))
    }

    pub fn min_cut_between(&self, s: usize, t: usize) -> MinCut {
        let mut flow = FlowNet::new(self, s, t);
        match flow.max_flow() {
            0 => MinCut::Disconnected,
            m => MinCut::Connected(m),
        }
    }

    /// A maximum set of pairwise edge-disjoint source→sink paths, each path
    /// a list of edge indices. Deterministic: augmenting and decomposition
    /// both walk edges in increasing edge-id order.
    pub fn edge_disjoint_paths(&self) -> Result<Vec<Vec<usize>>, NetError> {
        let (s, t) = (self.source()?, self.sink()?);
        let mut flow = FlowNet::new(self, s, t);
        let m = flow.max_flow();
        Ok(flow.decompose(m))
    }

    /// All source/sink-separating cuts. Errors above the node-count cap.
    pub fn enumerate_cuts(&self) -> Result<Vec<Cut>, NetError> {
        let (s, t) = (self.source()?, self.sink()?);
        self.enumerate_cuts_between(s, t)
    }

    pub fn enumerate_cuts_between(&self, s: usize, t: usize) -> Result<Vec<Cut>, NetError> {
        if self.nodes.len() > CUT_ENUM_NODE_LIMIT {
            return Err(NetError::TooManyNodesForCuts(self.nodes.len()));
        }
        let middle: Vec<usize> = (0..self.nodes.len()).filter(|&i| i != s && i != t).collect();
        let mut cuts = Vec::with_capacity(1 << middle.len());
        for mask in 0u64..(1u64 << middle.len()) {
            let mut side: BTreeSet<usize> = BTreeSet::new();
            side.insert(s);
            for (bit, &n) in middle.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    side.insert(n);
                }
            }
            let crossing = self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| side.contains(&e.from.node) && !side.contains(&e.to.node))
                .map(|(i, _)| i)
                .collect();
            cuts.push(Cut { source_side: side, crossing_edges: crossing });
        }
        Ok(cuts)
    }

    /// Symbolic transfer matrix of a cut: rows are the receiving antennas on
    /// the sink side, columns the transmitting antennas on the source side;
    /// an entry is the edge's fading variable where the edge exists and a
    /// structural zero otherwise.
    pub fn cut_transfer_pattern(&self, cut: &Cut) -> CutPattern {
        let mut rx: Vec<Antenna> = Vec::new();
        let mut tx: Vec<Antenna> = Vec::new();
        for &ei in &cut.crossing_edges {
            rx.push(self.edges[ei].to);
            tx.push(self.edges[ei].from);
        }
        rx.sort();
        rx.dedup();
        tx.sort();
        tx.dedup();
        let mut matrix = PolyMatrix::new(rx.len(), tx.len());
        for &ei in &cut.crossing_edges {
            let e = &self.edges[ei];
            let r = rx.binary_search(&e.to).unwrap();
            let c = tx.binary_search(&e.from).unwrap();
            matrix.set(r, c, Poly::var(e.var));
        }
        CutPattern { rx, tx, matrix }
    }

    /// Super-node sequence visited by a directed path of edge indices.
    pub fn path_nodes(&self, path: &[usize]) -> Result<Vec<usize>, NetError> {
        if path.is_empty() {
            return Err(NetError::InvalidPath);
        }
        let mut nodes = Vec::with_capacity(path.len() + 1);
        for (i, &ei) in path.iter().enumerate() {
            let e = self.edges.get(ei).ok_or(NetError::BadEdgeIndex(ei))?;
            if i == 0 {
                nodes.push(e.from.node);
            } else if nodes[nodes.len() - 1] != e.from.node {
                return Err(NetError::InvalidPath);
            }
            nodes.push(e.to.node);
        }
        Ok(nodes)
    }

    /// A path has a shortcut when a single network edge connects two
    /// non-consecutive super-nodes of the path (in either direction).
    pub fn path_has_shortcut(&self, path: &[usize]) -> Result<bool, NetError> {
        let nodes = self.path_nodes(path)?;
        let pos = |n: usize| nodes.iter().position(|&x| x == n);
        for e in &self.edges {
            if let (Some(i), Some(j)) = (pos(e.from.node), pos(e.to.node)) {
                if i.abs_diff(j) >= 2 {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Topological-sort acyclicity over super-nodes.
    pub fn is_acyclic(&self) -> bool {
        self.topo_order().is_some()
    }

    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to.node] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &ei in &self.out_edges[v] {
                let w = self.edges[ei].to.node;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Check per-slot live-edge sets against the half-duplex constraint:
    /// no half-duplex node may have both an incoming and an outgoing live
    /// edge in the same slot.
    pub fn validate_slots(&self, slots: &[Vec<usize>]) -> Result<(), ScheduleViolation> {
        for (slot, live) in slots.iter().enumerate() {
            let mut rx = vec![false; self.nodes.len()];
            let mut tx = vec![false; self.nodes.len()];
            for &ei in live {
                let e = self
                    .edges
                    .get(ei)
                    .ok_or(ScheduleViolation::UnknownEdge { slot, edge: ei })?;
                tx[e.from.node] = true;
                rx[e.to.node] = true;
            }
            for (node, sn) in self.nodes.iter().enumerate() {
                if sn.duplex == Duplex::Half && rx[node] && tx[node] {
                    return Err(ScheduleViolation::HalfDuplex {
                        slot,
                        node: sn.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, NetError> {
        let desc: NetDescription = serde_json::from_str(text)
            .map_err(|e| NetError::BadDescription(e.to_string()))?;
        desc.build()
    }

    pub fn to_json(&self) -> String {
        let desc = NetDescription {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDescription {
                    id: n.id.clone(),
                    antennas: n.antennas,
                    role: n.role,
                    duplex: n.duplex,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDescription {
                    from: (self.nodes[e.from.node].id.clone(), e.from.index),
                    to: (self.nodes[e.to.node].id.clone(), e.to.index),
                    bidirectional: false,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&desc).expect("network description serializes")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleViolation {
    #[error("slot {slot}: half-duplex node {node:?} both listens and transmits")]
    HalfDuplex { slot: usize, node: String },
    #[error("slot {slot}: unknown edge index {edge}")]
    UnknownEdge { slot: usize, edge: usize },
}

// --- JSON description ------------------------------------------------------

fn default_antennas() -> usize {
    1
}

fn default_duplex() -> Duplex {
    Duplex::Full
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDescription {
    id: String,
    #[serde(default = "default_antennas")]
    antennas: usize,
    role: Role,
    #[serde(default = "default_duplex")]
    duplex: Duplex,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDescription {
    from: (String, usize),
    to: (String, usize),
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    bidirectional: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetDescription {
    nodes: Vec<NodeDescription>,
    edges: Vec<EdgeDescription>,
}

impl NetDescription {
    fn build(self) -> Result<NetworkGraph, NetError> {
        let nodes: Vec<SuperNode> = self
            .nodes
            .into_iter()
            .map(|n| SuperNode {
                id: n.id,
                antennas: n.antennas,
                role: n.role,
                duplex: n.duplex,
            })
            .collect();
        let index = |id: &str| -> Result<usize, NetError> {
            nodes
                .iter()
                .position(|n| n.id == id)
                .ok_or_else(|| NetError::UnknownNode(id.to_string()))
        };
        let mut ends = Vec::new();
        for e in self.edges {
            let from = Antenna { node: index(&e.from.0)?, index: e.from.1 };
            let to = Antenna { node: index(&e.to.0)?, index: e.to.1 };
            ends.push((from, to));
            if e.bidirectional {
                ends.push((to, from));
            }
        }
        NetworkGraph::new(nodes, ends)
    }
}

// --- Unit-capacity max-flow -------------------------------------------------

/// Edmonds-Karp on the super-node multigraph: one unit-capacity arc per
/// antenna-level edge. BFS scans arcs in edge-id order, which makes both the
/// flow and its path decomposition deterministic.
struct FlowNet<'a> {
    net: &'a NetworkGraph,
    s: usize,
    t: usize,
    /// flow[i] = 1 when original edge i carries flow
    flow: Vec<bool>,
}

impl<'a> FlowNet<'a> {
    fn new(net: &'a NetworkGraph, s: usize, t: usize) -> Self {
        FlowNet { net, s, t, flow: vec![false; net.edges.len()] }
    }

    fn max_flow(&mut self) -> usize {
        let mut total = 0;
        while self.augment() {
            total += 1;
        }
        total
    }

    /// One BFS augmentation over the residual graph.
    fn augment(&mut self) -> bool {
        let n = self.net.nodes.len();
        // parent arc: (edge index, forward?)
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.s] = true;
        let mut queue = VecDeque::from([self.s]);
        'bfs: while let Some(v) = queue.pop_front() {
            for &ei in &self.net.out_edges[v] {
                let w = self.net.edges[ei].to.node;
                if !self.flow[ei] && !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((ei, true));
                    if w == self.t {
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
            for &ei in &self.net.in_edges[v] {
                let w = self.net.edges[ei].from.node;
                if self.flow[ei] && !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((ei, false));
                    if w == self.t {
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if !seen[self.t] {
            return false;
        }
        let mut v = self.t;
        while v != self.s {
            let (ei, forward) = parent[v].unwrap();
            self.flow[ei] = forward;
            v = if forward { self.net.edges[ei].from.node } else { self.net.edges[ei].to.node };
        }
        true
    }

    /// Decompose an integral flow of value `m` into `m` edge-disjoint
    /// paths, lowest edge ids first, cancelling any flow cycles met on the
    /// way.
    fn decompose(&mut self, m: usize) -> Vec<Vec<usize>> {
        let mut paths = Vec::with_capacity(m);
        for _ in 0..m {
            loop {
                let mut path: Vec<usize> = Vec::new();
                let mut at_node: Vec<Option<usize>> = vec![None; self.net.nodes.len()];
                let mut v = self.s;
                at_node[v] = Some(0);
                let mut cancelled = false;
                while v != self.t {
                    let ei = *self.net.out_edges[v]
                        .iter()
                        .find(|&&ei| self.flow[ei])
                        .expect("flow conservation guarantees an outgoing flow edge");
                    path.push(ei);
                    v = self.net.edges[ei].to.node;
                    if let Some(pos) = at_node[v] {
                        // cancel the cycle and retry this path
                        for &ce in &path[pos..] {
                            self.flow[ce] = false;
                        }
                        cancelled = true;
                        break;
                    }
                    at_node[v] = Some(path.len());
                }
                if cancelled {
                    continue;
                }
                for &ei in &path {
                    self.flow[ei] = false;
                }
                paths.push(path);
                break;
            }
        }
        paths
    }
}

// --- Builders used across the crate and its tests ---------------------------

/// Convenience builder for programmatic construction.
pub struct NetBuilder {
    nodes: Vec<SuperNode>,
    ends: Vec<(Antenna, Antenna)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        NetBuilder { nodes: Vec::new(), ends: Vec::new() }
    }

    pub fn node(mut self, id: &str, antennas: usize, role: Role) -> Self {
        self.nodes.push(SuperNode {
            id: id.to_string(),
            antennas,
            role,
            duplex: Duplex::Full,
        });
        self
    }

    pub fn half_duplex(mut self, id: &str) -> Self {
        if let Some(n) = self.nodes.iter_mut().find(|n| n.id == id) {
            n.duplex = Duplex::Half;
        }
        self
    }

    pub fn edge(mut self, from: (&str, usize), to: (&str, usize)) -> Self {
        let idx = |id: &str| {
            self.nodes
                .iter()
                .position(|n| n.id == id)
                .unwrap_or_else(|| panic!("unknown node {id}"))
        };
        let e = (
            Antenna { node: idx(from.0), index: from.1 },
            Antenna { node: idx(to.0), index: to.1 },
        );
        self.ends.push(e);
        self
    }

    /// All antenna pairs between two nodes.
    pub fn full_link(mut self, from: &str, to: &str) -> Self {
        let idx = |id: &str| {
            self.nodes
                .iter()
                .position(|n| n.id == id)
                .unwrap_or_else(|| panic!("unknown node {id}"))
        };
        let (f, t) = (idx(from), idx(to));
        for a in 0..self.nodes[f].antennas {
            for b in 0..self.nodes[t].antennas {
                self.ends.push((
                    Antenna { node: f, index: a },
                    Antenna { node: t, index: b },
                ));
            }
        }
        self
    }

    pub fn build(self) -> Result<NetworkGraph, NetError> {
        NetworkGraph::new(self.nodes, self.ends)
    }
}

impl Default for NetBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Single-antenna chain s -> r1 -> ... -> sink.
pub fn chain(hops: usize) -> NetworkGraph {
    assert!(hops >= 1);
    let mut b = NetBuilder::new().node("s", 1, Role::Source);
    for i in 1..hops {
        b = b.node(&format!("r{i}"), 1, Role::Relay);
    }
    b = b.node("t", 1, Role::Sink);
    let mut names: Vec<String> = vec!["s".into()];
    names.extend((1..hops).map(|i| format!("r{i}")));
    names.push("t".into());
    for w in names.windows(2) {
        b = b.edge((&w[0], 0), (&w[1], 0));
    }
    b.build().expect("chain is valid")
}

/// Two-relay single-antenna diamond without a direct link.
pub fn diamond() -> NetworkGraph {
    NetBuilder::new()
        .node("s", 1, Role::Source)
        .node("r1", 1, Role::Relay)
        .node("r2", 1, Role::Relay)
        .node("t", 1, Role::Sink)
        .edge(("s", 0), ("r1", 0))
        .edge(("s", 0), ("r2", 0))
        .edge(("r1", 0), ("t", 0))
        .edge(("r2", 0), ("t", 0))
        .build()
        .expect("diamond is valid")
}

/// The two-relay multi-antenna layered network: source and sink with 2
/// antennas, two 3-antenna relays, full bipartite links on both stages.
/// Its min-cut is 12 and its min-cut structural rank is 2.
pub fn two_relay_layered() -> NetworkGraph {
    NetBuilder::new()
        .node("s", 2, Role::Source)
        .node("r1", 3, Role::Relay)
        .node("r2", 3, Role::Relay)
        .node("t", 2, Role::Sink)
        .full_link("s", "r1")
        .full_link("s", "r2")
        .full_link("r1", "t")
        .full_link("r2", "t")
        .build()
        .expect("layered network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> NetworkGraph {
        NetBuilder::new()
            .node("s", 1, Role::Source)
            .node("t", 1, Role::Sink)
            .edge(("s", 0), ("t", 0))
            .build()
            .unwrap()
    }

    #[test]
    fn min_cut_examples() {
        assert_eq!(single_edge().min_cut_edges().unwrap(), MinCut::Connected(1));
        assert_eq!(
            two_relay_layered().min_cut_edges().unwrap(),
            MinCut::Connected(12)
        );
        assert_eq!(chain(3).min_cut_edges().unwrap(), MinCut::Connected(1));
        assert_eq!(diamond().min_cut_edges().unwrap(), MinCut::Connected(2));
    }

    #[test]
    fn disconnected_is_distinguished() {
        let net = NetBuilder::new()
            .node("s", 1, Role::Source)
            .node("a", 1, Role::Relay)
            .node("t", 1, Role::Sink)
            .edge(("s", 0), ("a", 0))
            .build()
            .unwrap();
        assert_eq!(net.min_cut_edges().unwrap(), MinCut::Disconnected);
        assert_eq!(net.min_cut_edges().unwrap().value(), 0);
    }

    #[test]
    fn paths_match_min_cut() {
        let p = chain(2).edge_disjoint_paths().unwrap();
        assert_eq!(p, vec![vec![0, 1]]);
        let p = diamond().edge_disjoint_paths().unwrap();
        assert_eq!(p.len(), 2);
        let p = two_relay_layered().edge_disjoint_paths().unwrap();
        assert_eq!(p.len(), 12);
        // pairwise edge-disjoint
        let mut used = BTreeSet::new();
        for path in &p {
            for &e in path {
                assert!(used.insert(e));
            }
        }
    }

    #[test]
    fn cut_enumeration_counts() {
        assert_eq!(chain(2).enumerate_cuts().unwrap().len(), 2);
        assert_eq!(diamond().enumerate_cuts().unwrap().len(), 4);
        assert_eq!(chain(4).enumerate_cuts().unwrap().len(), 8);
    }

    #[test]
    fn cut_enumeration_cap() {
        let mut b = NetBuilder::new().node("s", 1, Role::Source);
        for i in 0..20 {
            b = b.node(&format!("r{i}"), 1, Role::Relay);
        }
        let net = b.node("t", 1, Role::Sink).edge(("s", 0), ("t", 0)).build().unwrap();
        assert!(matches!(
            net.enumerate_cuts(),
            Err(NetError::TooManyNodesForCuts(22))
        ));
    }

    #[test]
    fn min_cut_equals_enumeration() {
        for net in [single_edge(), chain(3), diamond(), two_relay_layered()] {
            let enumerated = net
                .enumerate_cuts()
                .unwrap()
                .iter()
                .map(|c| c.crossing_edges.len())
                .min()
                .unwrap();
            assert_eq!(net.min_cut_edges().unwrap().value(), enumerated);
        }
    }

    #[test]
    fn pattern_examples() {
        // one-edge cut: 1x1 [h_0]
        let net = single_edge();
        let cuts = net.enumerate_cuts().unwrap();
        let p = net.cut_transfer_pattern(&cuts[0]);
        assert_eq!((p.matrix.rows(), p.matrix.cols()), (1, 1));
        assert_eq!(p.matrix.get(0, 0), Some(&Poly::var(0)));

        // 2x2 full bipartite crossing: 4 distinct variables
        let net = NetBuilder::new()
            .node("s", 2, Role::Source)
            .node("t", 2, Role::Sink)
            .full_link("s", "t")
            .build()
            .unwrap();
        let cuts = net.enumerate_cuts().unwrap();
        let p = net.cut_transfer_pattern(&cuts[0]);
        assert_eq!((p.matrix.rows(), p.matrix.cols()), (2, 2));
        let mut vars = BTreeSet::new();
        p.matrix.collect_vars(&mut vars);
        assert_eq!(vars.len(), 4);
    }

    #[test]
    fn pattern_vars_unique_and_dims_match() {
        let net = two_relay_layered();
        for cut in net.enumerate_cuts().unwrap() {
            let p = net.cut_transfer_pattern(&cut);
            assert_eq!(p.matrix.rows(), p.rx.len());
            assert_eq!(p.matrix.cols(), p.tx.len());
            let mut count = 0usize;
            for (_, _, poly) in p.matrix.entries() {
                count += poly.num_terms();
            }
            // each fading variable appears at most once per pattern
            assert_eq!(count, cut.crossing_edges.len());
        }
    }

    #[test]
    fn wireline_zeroing_matches_removed_edges() {
        // drop one bipartite edge and the pattern gains exactly one
        // structural zero in its place
        let full = NetBuilder::new()
            .node("s", 2, Role::Source)
            .node("t", 2, Role::Sink)
            .full_link("s", "t")
            .build()
            .unwrap();
        let pruned = NetBuilder::new()
            .node("s", 2, Role::Source)
            .node("t", 2, Role::Sink)
            .edge(("s", 0), ("t", 0))
            .edge(("s", 0), ("t", 1))
            .edge(("s", 1), ("t", 1))
            .build()
            .unwrap();
        let pf = full.cut_transfer_pattern(&full.enumerate_cuts().unwrap()[0]);
        let pp = pruned.cut_transfer_pattern(&pruned.enumerate_cuts().unwrap()[0]);
        assert_eq!(pf.matrix.num_entries(), 4);
        assert_eq!(pp.matrix.num_entries(), 3);
        assert!(pp.matrix.get(0, 1).is_none()); // removed (s,1)->(t,0)
    }

    #[test]
    fn shortcut_detection() {
        let net = NetBuilder::new()
            .node("s", 1, Role::Source)
            .node("a", 1, Role::Relay)
            .node("b", 1, Role::Relay)
            .node("t", 1, Role::Sink)
            .edge(("s", 0), ("a", 0))
            .edge(("a", 0), ("b", 0))
            .edge(("b", 0), ("t", 0))
            .edge(("s", 0), ("b", 0))
            .build()
            .unwrap();
        // path s->a->b->t with extra edge s->b
        assert!(net.path_has_shortcut(&[0, 1, 2]).unwrap());

        let plain = chain(2);
        assert!(!plain.path_has_shortcut(&[0, 1]).unwrap());
        assert!(matches!(
            plain.path_has_shortcut(&[1, 0]),
            Err(NetError::InvalidPath)
        ));
    }

    #[test]
    fn acyclicity() {
        assert!(chain(3).is_acyclic());
        let net = NetBuilder::new()
            .node("s", 1, Role::Source)
            .node("t", 1, Role::Sink)
            .edge(("s", 0), ("t", 0))
            .edge(("t", 0), ("s", 0))
            .build()
            .unwrap();
        assert!(!net.is_acyclic());
    }

    #[test]
    fn schedule_validation() {
        let net = chain(2); // s -e0-> r1 -e1-> t
        // full-duplex chain, all slots live: ok
        assert!(net.validate_slots(&[vec![0, 1], vec![0, 1]]).is_ok());

        let hd = NetBuilder::new()
            .node("s", 1, Role::Source)
            .node("r", 1, Role::Relay)
            .node("t", 1, Role::Sink)
            .half_duplex("r")
            .edge(("s", 0), ("r", 0))
            .edge(("r", 0), ("t", 0))
            .build()
            .unwrap();
        let err = hd.validate_slots(&[vec![0, 1]]).unwrap_err();
        assert_eq!(
            err,
            ScheduleViolation::HalfDuplex { slot: 0, node: "r".into() }
        );
        // one edge at a time is fine
        assert!(hd.validate_slots(&[vec![0], vec![1]]).is_ok());
    }

    #[test]
    fn json_round_trip_and_bidirectional() {
        let text = r#"{
            "nodes": [
                {"id": "s", "antennas": 2, "role": "source", "duplex": "full"},
                {"id": "r1", "antennas": 1, "role": "relay", "duplex": "half"},
                {"id": "t", "role": "sink"}
            ],
            "edges": [
                {"from": ["s", 0], "to": ["r1", 0]},
                {"from": ["r1", 0], "to": ["t", 0], "bidirectional": true}
            ]
        }"#;
        let net = NetworkGraph::from_json(text).unwrap();
        assert_eq!(net.nodes().len(), 3);
        assert_eq!(net.edges().len(), 3); // bidirectional expands to two
        assert_eq!(net.nodes()[2].antennas, 1); // default
        let round = NetworkGraph::from_json(&net.to_json()).unwrap();
        assert_eq!(round, net);
    }

    #[test]
    fn validation_errors() {
        let bad = NetBuilder::new()
            .node("s", 1, Role::Source)
            .node("t", 1, Role::Sink)
            .edge(("s", 0), ("t", 5))
            .build();
        assert!(matches!(bad, Err(NetError::AntennaOutOfRange { .. })));

        let two_sources = NetBuilder::new()
            .node("a", 1, Role::Source)
            .node("b", 1, Role::Source)
            .node("t", 1, Role::Sink)
            .edge(("a", 0), ("t", 0))
            .build()
            .unwrap();
        assert!(matches!(
            two_sources.min_cut_edges(),
            Err(NetError::WrongTerminalCount("source", 2))
        ));
    }
}
