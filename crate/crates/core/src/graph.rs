//! Immutable undirected graph with a label table and an optional taxonomy root.
//!
//! Adjacency is stored in compressed sparse row form. Node ids are assigned in
//! the order labels are first seen by the [`GraphBuilder`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Dense node identifier, `0..node_count`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bidirectional label <-> id table shared by graphs, datasets and embeddings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelTable {
    labels: Vec<String>,
    index: BTreeMap<String, NodeId>,
}

impl LabelTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from distinct, non-empty labels.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = Self::new();
        for label in labels {
            let label = label.into();
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if table.index.contains_key(&label) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "duplicate label `{label}`"
                )));
            }
            table.intern(label);
        }
        Ok(table)
    }

    /// Returns the id of `label`, assigning the next id if unseen.
    pub fn intern(&mut self, label: String) -> NodeId {
        if let Some(&id) = self.index.get(&label) {
            return id;
        }
        let id = NodeId::from_index(self.labels.len());
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn resolve(&self, label: &str) -> Result<NodeId> {
        self.get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (NodeId::from_index(i), l.as_str()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    labels: LabelTable,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Option<Vec<f64>>,
    root: Option<NodeId>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn label(&self, id: NodeId) -> &str {
        self.labels.label(id)
    }

    pub fn node(&self, label: &str) -> Result<NodeId> {
        self.labels.resolve(label)
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from_index)
    }

    /// Sorted neighbor list of `id`.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        let i = id.index();
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge weights parallel to [`Graph::neighbors`], or `None` for unit weights.
    pub fn neighbor_weights(&self, id: NodeId) -> Option<&[f64]> {
        let i = id.index();
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[i]..self.offsets[i + 1]])
    }

    pub fn degree(&self, id: NodeId) -> usize {
        let i = id.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn check_node(&self, id: NodeId) -> Result<()> {
        if id.index() < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode(id.index()))
        }
    }
}

/// Accumulates labelled edges and produces a validated [`Graph`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    labels: LabelTable,
    edges: BTreeMap<(NodeId, NodeId), Option<f64>>,
    root: Option<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a node without edges.
    pub fn add_node(&mut self, label: &str) -> Result<NodeId> {
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(self.labels.intern(label.to_string()))
    }

    /// Adds an undirected edge. Repeating an edge is allowed as long as the
    /// weights agree; a missing weight counts as 1.
    pub fn add_edge(&mut self, a: &str, b: &str, weight: Option<f64>) -> Result<()> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if a == b {
            return Err(Error::SelfLoop(a.to_string()));
        }
        if let Some(w) = weight {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight {
                    a: a.to_string(),
                    b: b.to_string(),
                    weight: w,
                });
            }
        }
        let ia = self.labels.intern(a.to_string());
        let ib = self.labels.intern(b.to_string());
        let key = if ia < ib { (ia, ib) } else { (ib, ia) };
        match self.edges.get(&key) {
            Some(&prev) => {
                let first = prev.unwrap_or(1.0);
                let second = weight.unwrap_or(1.0);
                if first != second {
                    return Err(Error::ConflictingWeight {
                        a: a.to_string(),
                        b: b.to_string(),
                        first,
                        second,
                    });
                }
                if prev.is_none() && weight.is_some() {
                    self.edges.insert(key, weight);
                }
            }
            None => {
                self.edges.insert(key, weight);
            }
        }
        Ok(())
    }

    pub fn set_root(&mut self, label: &str) {
        self.root = Some(label.to_string());
    }

    pub fn build(self) -> Result<Graph> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let root = match &self.root {
            Some(label) => Some(self.labels.resolve(label)?),
            None => None,
        };
        let weighted = self.edges.values().any(Option::is_some);

        let mut degree = alloc::vec![0usize; n];
        for &(a, b) in self.edges.keys() {
            degree[a.index()] += 1;
            degree[b.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = offsets[n];
        let mut adjacency: Vec<Vec<(NodeId, f64)>> =
            degree.iter().map(|&d| Vec::with_capacity(d)).collect();
        for (&(a, b), w) in &self.edges {
            let w = w.unwrap_or(1.0);
            adjacency[a.index()].push((b, w));
            adjacency[b.index()].push((a, w));
        }
        let mut neighbors = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(if weighted { total } else { 0 });
        for mut list in adjacency {
            list.sort_by_key(|&(v, _)| v);
            for (v, w) in list {
                neighbors.push(v);
                if weighted {
                    weights.push(w);
                }
            }
        }
        Ok(Graph {
            labels: self.labels,
            offsets,
            neighbors,
            weights: weighted.then_some(weights),
            root,
        })
    }
}
