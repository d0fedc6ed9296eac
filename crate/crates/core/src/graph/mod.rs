//! Problem instances, their bidirected view and shortest-path services.

mod bidirected;
mod distance;
mod stp;

pub use bidirected::{Arc, BidirectedView};
pub use distance::{DistanceOracle, ShortestPathTree, Unreachable};
pub use stp::{parse_stp, ParseStpError};

use std::fmt;

/// Internal node index, 0-based. SteinLib files and reports use `id + 1`.
pub type NodeId = usize;

/// Index into [`Instance::edges`].
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: f64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: NodeId) -> NodeId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum InstanceError {
    #[error("instance needs at least one node")]
    NoNodes,
    #[error("node {0} out of range 1..={1}")]
    NodeOutOfRange(usize, usize),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {0} has invalid cost {1}")]
    BadCost(usize, f64),
    #[error("instance has no terminals")]
    NoTerminals,
    #[error("terminal {0} listed twice")]
    DuplicateTerminal(usize),
    #[error("terminals {0} and {1} are not connected")]
    Disconnected(usize, usize),
}

/// An undirected, edge-weighted graph together with its terminal set.
///
/// Construction through [`Instance::new`] validates every invariant, so
/// solvers downstream may assume all terminals lie in one component.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: Option<String>,
    node_count: usize,
    edges: Vec<Edge>,
    terminals: Vec<NodeId>,
    integral: bool,
}

impl Instance {
    pub fn new(
        node_count: usize,
        edges: Vec<Edge>,
        terminals: Vec<NodeId>,
    ) -> Result<Self, InstanceError> {
        if node_count == 0 {
            return Err(InstanceError::NoNodes);
        }
        for (idx, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= node_count {
                    return Err(InstanceError::NodeOutOfRange(x + 1, node_count));
                }
            }
            if e.u == e.v {
                return Err(InstanceError::SelfLoop(idx + 1));
            }
            if e.cost.is_nan() || e.cost < 0.0 || e.cost.is_infinite() {
                return Err(InstanceError::BadCost(idx + 1, e.cost));
            }
        }
        if terminals.is_empty() {
            return Err(InstanceError::NoTerminals);
        }
        let mut seen = vec![false; node_count];
        for &t in &terminals {
            if t >= node_count {
                return Err(InstanceError::NodeOutOfRange(t + 1, node_count));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(InstanceError::DuplicateTerminal(t + 1));
            }
        }

        let mut comp = UnionFind::new(node_count);
        for e in &edges {
            comp.union(e.u, e.v);
        }
        let first = terminals[0];
        if let Some(&t) = terminals
            .iter()
            .find(|&&t| comp.find(t) != comp.find(first))
        {
            return Err(InstanceError::Disconnected(first + 1, t + 1));
        }

        let integral = edges
            .iter()
            .all(|e| e.cost.fract() == 0.0 && e.cost < 2f64.powi(52));
        Ok(Self {
            name: None,
            node_count,
            edges,
            terminals,
            integral,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Terminals in input order.
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.terminals.contains(&v)
    }

    /// True when every edge cost is an integer, so all sums the solvers
    /// form are exact in `f64`.
    pub fn has_integral_costs(&self) -> bool {
        self.integral
    }

    pub fn bidirect(&self) -> BidirectedView {
        BidirectedView::new(self)
    }

    /// Sum of the costs of the given edges.
    pub fn cost_of(&self, edges: impl IntoIterator<Item = EdgeId>) -> f64 {
        edges.into_iter().map(|e| self.edges[e].cost).sum()
    }

    /// Serializes to the SteinLib STP text format.
    pub fn to_stp(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "33D32945 STP File, STP Format Version 1.0")?;
        writeln!(f)?;
        writeln!(f, "SECTION Comment")?;
        if let Some(name) = &self.name {
            writeln!(f, "Name \"{name}\"")?;
        }
        writeln!(f, "END")?;
        writeln!(f)?;
        writeln!(f, "SECTION Graph")?;
        writeln!(f, "Nodes {}", self.node_count)?;
        writeln!(f, "Edges {}", self.edges.len())?;
        for e in &self.edges {
            writeln!(f, "E {} {} {}", e.u + 1, e.v + 1, e.cost)?;
        }
        writeln!(f, "END")?;
        writeln!(f)?;
        writeln!(f, "SECTION Terminals")?;
        writeln!(f, "Terminals {}", self.terminals.len())?;
        for t in &self.terminals {
            writeln!(f, "T {}", t + 1)?;
        }
        writeln!(f, "END")?;
        writeln!(f)?;
        writeln!(f, "EOF")
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
