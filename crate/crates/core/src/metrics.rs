//! Graph node similarity measures: inverted shortest path (ShP),
//! Leacock-Chodorow (LCH) and Wu-Palmer (WuP).

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::paths::{shortest_path_distance, shortest_paths_from};
use crate::taxonomy::{
    deepest_common_ancestor, deepest_common_ancestor_row, taxonomy_info, TaxonomyInfo,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Shp,
    Lch,
    Wup,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Shp => "shp",
            MetricKind::Lch => "lch",
            MetricKind::Wup => "wup",
        }
    }

    pub fn needs_taxonomy(self) -> bool {
        !matches!(self, MetricKind::Shp)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shp" => Ok(MetricKind::Shp),
            "lch" => Ok(MetricKind::Lch),
            "wup" => Ok(MetricKind::Wup),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown metric `{other}`"
            ))),
        }
    }
}

fn disconnected(g: &Graph, u: NodeId, v: NodeId) -> Error {
    Error::Disconnected(g.label(u).to_string(), g.label(v).to_string())
}

#[inline]
fn shp_from_distance(d: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else {
        1.0 / d
    }
}

#[inline]
fn lch_from_distance(d: f64, max_depth: u32) -> f64 {
    -libm::log((d + 1.0) / (2.0 * max_depth as f64))
}

#[inline]
fn wup_from_depths(lcs: u32, du: u32, dv: u32) -> f64 {
    2.0 * lcs as f64 / (du + dv) as f64
}

/// `1 / dist(u, v)`, and `1` for `u == v`.
pub fn shp_similarity(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    g.check_node(u)?;
    g.check_node(v)?;
    let d = shortest_path_distance(g, u, v);
    if d.is_infinite() {
        return Err(disconnected(g, u, v));
    }
    Ok(shp_from_distance(d))
}

/// `-ln((dist(u, v) + 1) / (2 D))` with `D` the taxonomy's maximum depth.
pub fn lch_similarity(g: &Graph, info: &TaxonomyInfo, u: NodeId, v: NodeId) -> Result<f64> {
    g.check_node(u)?;
    g.check_node(v)?;
    let d = shortest_path_distance(g, u, v);
    if d.is_infinite() {
        return Err(disconnected(g, u, v));
    }
    Ok(lch_from_distance(d, info.max_depth()))
}

/// `2 depth(lcs) / (depth(u) + depth(v))`, `lcs` the deepest common ancestor.
pub fn wup_similarity(g: &Graph, info: &TaxonomyInfo, u: NodeId, v: NodeId) -> Result<f64> {
    g.check_node(u)?;
    g.check_node(v)?;
    let lcs = deepest_common_ancestor(g, info, u, v);
    Ok(wup_from_depths(
        info.depth(lcs),
        info.depth(u),
        info.depth(v),
    ))
}

/// A similarity over the nodes of one graph, queried pairwise or one-vs-all.
///
/// Implementations must be symmetric and return strictly positive values for
/// pairs that are meant to end up in a training dataset.
pub trait NodeSimilarity {
    fn name(&self) -> &str;

    fn node_count(&self) -> usize;

    fn similarity(&self, u: NodeId, v: NodeId) -> Result<f64>;

    /// Similarities from `source` to every node, including itself.
    fn row(&self, source: NodeId) -> Result<Vec<f64>> {
        (0..self.node_count())
            .map(|v| self.similarity(source, NodeId::from_index(v)))
            .collect()
    }
}

/// One of the built-in metrics bound to a graph.
#[derive(Clone, Debug)]
pub struct GraphMetric<'g> {
    graph: &'g Graph,
    kind: MetricKind,
    taxonomy: Option<TaxonomyInfo>,
}

impl<'g> GraphMetric<'g> {
    /// Binds `kind` to `graph`, computing taxonomy depths when needed.
    pub fn new(graph: &'g Graph, kind: MetricKind) -> Result<Self> {
        let taxonomy = if kind.needs_taxonomy() {
            Some(taxonomy_info(graph)?)
        } else {
            None
        };
        Ok(Self {
            graph,
            kind,
            taxonomy,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn taxonomy(&self) -> Option<&TaxonomyInfo> {
        self.taxonomy.as_ref()
    }

    fn info(&self) -> &TaxonomyInfo {
        self.taxonomy.as_ref().expect("taxonomy computed in new")
    }
}

impl NodeSimilarity for GraphMetric<'_> {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Evaluates one pair with its own graph traversal.
    fn similarity(&self, u: NodeId, v: NodeId) -> Result<f64> {
        match self.kind {
            MetricKind::Shp => shp_similarity(self.graph, u, v),
            MetricKind::Lch => lch_similarity(self.graph, self.info(), u, v),
            MetricKind::Wup => wup_similarity(self.graph, self.info(), u, v),
        }
    }

    /// One traversal from `source` shared by all targets.
    fn row(&self, source: NodeId) -> Result<Vec<f64>> {
        let g = self.graph;
        g.check_node(source)?;
        match self.kind {
            MetricKind::Shp | MetricKind::Lch => {
                let dist = shortest_paths_from(g, source);
                if let Some(i) = dist.iter().position(|d| d.is_infinite()) {
                    return Err(disconnected(g, source, NodeId::from_index(i)));
                }
                Ok(match self.kind {
                    MetricKind::Shp => dist.into_iter().map(shp_from_distance).collect(),
                    _ => {
                        let max_depth = self.info().max_depth();
                        dist.into_iter()
                            .map(|d| lch_from_distance(d, max_depth))
                            .collect()
                    }
                })
            }
            MetricKind::Wup => {
                let info = self.info();
                let lcs = deepest_common_ancestor_row(g, info, source);
                let ds = info.depth(source);
                Ok(lcs
                    .iter()
                    .enumerate()
                    .map(|(v, &w)| {
                        wup_from_depths(info.depth(w), ds, info.depth(NodeId::from_index(v)))
                    })
                    .collect())
            }
        }
    }
}

/// A user-supplied symmetric similarity function.
pub struct CustomSimilarity<F> {
    name: String,
    node_count: usize,
    f: F,
}

impl<F> CustomSimilarity<F>
where
    F: Fn(NodeId, NodeId) -> f64,
{
    pub fn new(name: impl Into<String>, node_count: usize, f: F) -> Self {
        Self {
            name: name.into(),
            node_count,
            f,
        }
    }
}

impl<F> NodeSimilarity for CustomSimilarity<F>
where
    F: Fn(NodeId, NodeId) -> f64,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn node_count(&self) -> usize {
        self.node_count
    }

    fn similarity(&self, u: NodeId, v: NodeId) -> Result<f64> {
        Ok((self.f)(u, v))
    }
}
