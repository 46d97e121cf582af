//! Domain types for the stochastic time-dependent network and the JSON
//! network-file format.
//!
//! Edges are undirected and traversable in both directions with identical
//! attributes. Reliability is stored internally as a fraction in (0, 1];
//! network files carry it as a percent (`reliability_pct`). An edge may be
//! marked `unverified` when its endpoints are not corroborated by trip data;
//! unverified edges participate in routing like any other edge and the flag
//! is purely informational.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = u32;
pub type EdgeId = u32;

/// Discretization of the planning horizon into `intervals` slots of width
/// `delta`. Arc travel times are constant within a slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Time units per interval. Strictly positive.
    pub delta: f64,
    /// Number of intervals K >= 1.
    pub intervals: usize,
}

impl TimeGrid {
    pub fn new(delta: f64, intervals: usize) -> Result<Self, NetworkError> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(NetworkError::BadDelta(delta));
        }
        if intervals < 1 {
            return Err(NetworkError::BadIntervalCount(intervals));
        }
        Ok(TimeGrid { delta, intervals })
    }

    /// 1-based interval of a departure instant: `floor(t/delta) + 1`, clamped
    /// to `[1, K]`. A departure exactly on a boundary belongs to the later
    /// interval (t = delta maps to interval 2).
    pub fn forward_index(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 1;
        }
        let idx = (t / self.delta).floor() as i64 + 1;
        idx.clamp(1, self.intervals as i64) as usize
    }

    /// 1-based interval of an arrival instant: `ceil(a/delta)`, clamped to
    /// `[1, K]`. An arrival exactly on a boundary belongs involves the earlier
    /// interval (a = 2*delta maps to interval 2); a <= 0 maps to interval 1.
    pub fn backward_index(&self, a: f64) -> usize {
        if a <= 0.0 {
            return 1;
        }
        let idx = (a / self.delta).ceil() as i64;
        idx.clamp(1, self.intervals as i64) as usize
    }

    /// Start time of the 1-based interval `k`, i.e. the boundary `(k-1)*delta`.
    pub fn interval_start(&self, k: usize) -> f64 {
        (k as f64 - 1.0) * self.delta
    }

    /// End boundary of the 1-based interval `k`, i.e. `k*delta`.
    pub fn interval_end(&self, k: usize) -> f64 {
        k as f64 * self.delta
    }
}

/// An undirected road segment with per-interval travel times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    /// Energy to traverse, in percent of full battery capacity.
    pub energy: f64,
    /// Probability of an incident-free traversal, as a fraction in (0, 1].
    pub reliability: f64,
    /// Travel time per interval, length == `TimeGrid::intervals`.
    pub times: Vec<f64>,
    /// Endpoints not corroborated by trip data; informational only.
    pub unverified: bool,
}

impl Edge {
    /// The opposite endpoint, if `node` is an endpoint at all.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if node == self.u {
            Some(self.v)
        } else if node == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        node == self.u || node == self.v
    }
}

/// Traversal direction of an undirected edge relative to its declared
/// `(u, v)` endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// u -> v
    Forward,
    /// v -> u
    Reverse,
}

/// An ordered walk through the network, as `(edge, direction)` steps from a
/// start node. The selection indicator of the energy constraint is implicitly
/// 1 for every listed edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSelection {
    pub start: NodeId,
    pub steps: Vec<(EdgeId, Direction)>,
}

impl PathSelection {
    pub fn new(start: NodeId) -> Self {
        PathSelection { start, steps: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Node sequence visited by the walk, starting with `start`.
    /// Fails if a step's edge is unknown or does not chain onto the previous
    /// node.
    pub fn nodes(&self, net: &Network) -> Result<Vec<NodeId>, NetworkError> {
        let mut seq = vec![self.start];
        let mut at = self.start;
        for &(eid, dir) in &self.steps {
            let edge = net.edge(eid)?;
            let (from, to) = match dir {
                Direction::Forward => (edge.u, edge.v),
                Direction::Reverse => (edge.v, edge.u),
            };
            if from != at {
                return Err(NetworkError::BrokenWalk { edge: eid, at });
            }
            seq.push(to);
            at = to;
        }
        Ok(seq)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().map(|&(e, _)| e)
    }
}

/// Immutable, validated network. Construct through [`Network::new`] or
/// [`parse_network`]; all operations are pure and the value is safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub grid: TimeGrid,
    nodes: BTreeSet<NodeId>,
    stations: BTreeSet<NodeId>,
    edges: BTreeMap<EdgeId, Edge>,
    /// node -> sorted (neighbor, edge id) incidence list
    adjacency: BTreeMap<NodeId, Vec<(NodeId, EdgeId)>>,
}

impl Network {
    pub fn new(
        grid: TimeGrid,
        nodes: impl IntoIterator<Item = (NodeId, bool)>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, NetworkError> {
        let mut node_set = BTreeSet::new();
        let mut stations = BTreeSet::new();
        for (id, charging) in nodes {
            node_set.insert(id);
            if charging {
                stations.insert(id);
            }
        }
        let mut edge_map: BTreeMap<EdgeId, Edge> = BTreeMap::new();
        for edge in edges {
            if edge.times.len() != grid.intervals {
                return Err(NetworkError::TimesLengthMismatch {
                    edge: edge.id,
                    expected: grid.intervals,
                    got: edge.times.len(),
                });
            }
            if edge.times.iter().any(|&t| !t.is_finite() || t <= 0.0) {
                return Err(NetworkError::NonpositiveTime(edge.id));
            }
            if !(edge.reliability > 0.0 && edge.reliability <= 1.0) {
                return Err(NetworkError::BadReliability { edge: edge.id, value: edge.reliability });
            }
            if !edge.energy.is_finite() || edge.energy < 0.0 {
                return Err(NetworkError::NegativeEnergy(edge.id));
            }
            for endpoint in [edge.u, edge.v] {
                if !node_set.contains(&endpoint) {
                    return Err(NetworkError::UnknownEndpoint { edge: edge.id, node: endpoint });
                }
            }
            if edge_map.insert(edge.id, edge.clone()).is_some() {
                return Err(NetworkError::DuplicateEdgeId(edge.id));
            }
        }
        let mut adjacency: BTreeMap<NodeId, Vec<(NodeId, EdgeId)>> =
            node_set.iter().map(|&n| (n, Vec::new())).collect();
        for edge in edge_map.values() {
            adjacency.get_mut(&edge.u).unwrap().push((edge.v, edge.id));
            adjacency.get_mut(&edge.v).unwrap().push((edge.u, edge.id));
        }
        for list in adjacency.values_mut() {
            list.sort_unstable();
        }
        Ok(Network { grid, nodes: node_set, stations, edges: edge_map, adjacency })
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_node(&self, id: NodeId) -> bool {
        self.nodes.contains(&id)
    }

    pub fn is_station(&self, id: NodeId) -> bool {
        self.stations.contains(&id)
    }

    pub fn stations(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.stations.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, NetworkError> {
        self.edges.get(&id).ok_or(NetworkError::UnknownEdge(id))
    }

    /// Sorted `(neighbor, edge)` pairs incident to `node`.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        self.adjacency.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Replace one edge's travel-time profile, returning a new network.
    /// Used by the replan machinery to apply live traffic updates.
    pub fn with_edge_times(&self, id: EdgeId, times: Vec<f64>) -> Result<Network, NetworkError> {
        self.edge(id)?;
        let mut copy = self.clone();
        if times.len() != copy.grid.intervals {
            return Err(NetworkError::TimesLengthMismatch {
                edge: id,
                expected: copy.grid.intervals,
                got: times.len(),
            });
        }
        if times.iter().any(|&t| !t.is_finite() || t <= 0.0) {
            return Err(NetworkError::NonpositiveTime(id));
        }
        copy.edges.get_mut(&id).unwrap().times = times;
        Ok(copy)
    }

    /// Restrict to the edges with the given ids (and the nodes they touch).
    /// Station flags are preserved for retained nodes.
    pub fn induced_subgraph(&self, edge_ids: &[EdgeId]) -> Result<Network, NetworkError> {
        let mut edges = Vec::new();
        let mut nodes = BTreeSet::new();
        for &id in edge_ids {
            let e = self.edge(id)?.clone();
            nodes.insert(e.u);
            nodes.insert(e.v);
            edges.push(e);
        }
        Network::new(
            self.grid,
            nodes.into_iter().map(|n| (n, self.is_station(n))),
            edges,
        )
    }
}

/// Connectivity diagnostics for a routing query. Produced by
/// [`validate_topology`]; never an error, even for unreachable pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub origin: NodeId,
    pub dest: NodeId,
    pub reachable: bool,
    /// Connected components as sorted node lists, sorted by smallest member.
    pub components: Vec<Vec<NodeId>>,
}

/// Reports whether `dest` is reachable from `origin` ignoring time and
/// energy, and lists the network's connected components.
pub fn validate_topology(net: &Network, origin: NodeId, dest: NodeId) -> TopologyReport {
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    let mut components = Vec::new();
    for start in net.nodes() {
        if seen.contains(&start) {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(n) = queue.pop_front() {
            component.push(n);
            for &(m, _) in net.neighbors(n) {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    let reachable = origin == dest
        || components.iter().any(|c| c.binary_search(&origin).is_ok() && c.binary_search(&dest).is_ok());
    TopologyReport { origin, dest, reachable, components }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("interval count must be at least 1, got {0}")]
    BadIntervalCount(usize),
    #[error("edge {edge}: times length mismatch, expected {expected}, got {got}")]
    TimesLengthMismatch { edge: EdgeId, expected: usize, got: usize },
    #[error("edge {0}: travel times must be positive")]
    NonpositiveTime(EdgeId),
    #[error("edge {edge}: reliability {value} outside (0, 1]")]
    BadReliability { edge: EdgeId, value: f64 },
    #[error("edge {0}: energy must be nonnegative")]
    NegativeEnergy(EdgeId),
    #[error("edge {edge}: endpoint {node} is not a declared node")]
    UnknownEndpoint { edge: EdgeId, node: NodeId },
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("walk breaks at node {at}: edge {edge} does not continue it")]
    BrokenWalk { edge: EdgeId, at: NodeId },
    #[error("malformed network file: {0}")]
    Malformed(#[from] serde_json::Error),
}

// --- network file format ---------------------------------------------------

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    time_grid: TimeGridFile,
    nodes: Vec<NodeFile>,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct TimeGridFile {
    delta: f64,
    intervals: usize,
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    id: NodeId,
    #[serde(default)]
    charging: bool,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    id: EdgeId,
    u: NodeId,
    v: NodeId,
    energy: f64,
    reliability_pct: f64,
    times: Vec<f64>,
    #[serde(default)]
    unverified: bool,
}

/// Parses and validates a UTF-8 JSON network file. Reliability percentages
/// (e.g. 96.5) are converted to fractions (0.965).
pub fn parse_network(text: &str) -> Result<Network, NetworkError> {
    let file: NetworkFile = serde_json::from_str(text)?;
    let grid = TimeGrid::new(file.time_grid.delta, file.time_grid.intervals)?;
    let edges = file
        .edges
        .into_iter()
        .map(|e| {
            if !(e.reliability_pct > 0.0 && e.reliability_pct <= 100.0) {
                return Err(NetworkError::BadReliability { edge: e.id, value: e.reliability_pct });
            }
            Ok(Edge {
                id: e.id,
                u: e.u,
                v: e.v,
                energy: e.energy,
                reliability: e.reliability_pct / 100.0,
                times: e.times,
                unverified: e.unverified,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Network::new(grid, file.nodes.into_iter().map(|n| (n.id, n.charging)), edges)
}

/// Renders a network back to the file format; `parse_network(render_network(net))`
/// reconstructs an identical network.
pub fn render_network(net: &Network) -> String {
    let file = NetworkFile {
        time_grid: TimeGridFile { delta: net.grid.delta, intervals: net.grid.intervals },
        nodes: net.nodes().map(|id| NodeFile { id, charging: net.is_station(id) }).collect(),
        edges: net
            .edges()
            .map(|e| EdgeFile {
                id: e.id,
                u: e.u,
                v: e.v,
                energy: e.energy,
                reliability_pct: e.reliability * 100.0,
                times: e.times.clone(),
                unverified: e.unverified,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("network file serialization cannot fail")
}
