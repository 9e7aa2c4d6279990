//! Depths and deepest common ancestors for rooted graphs.
//!
//! Edges are read as parent links toward the root: the parents of `x` are its
//! neighbors one layer closer to the root. A node with several parents takes
//! the minimum depth, and `w` is an ancestor of `x` iff
//! `depth(w) + dist(w, x) == depth(x)`, i.e. `w` lies on a shortest root path.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::paths::{hop_distances_from, UNREACHABLE_HOPS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaxonomyInfo {
    root: NodeId,
    depth: Vec<u32>,
    max_depth: u32,
    /// Nodes in nondecreasing depth order.
    order: Vec<NodeId>,
}

impl TaxonomyInfo {
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Depth with `depth(root) == 1`.
    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v.index()]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    fn parents<'g>(&'g self, g: &'g Graph, x: NodeId) -> impl Iterator<Item = NodeId> + 'g {
        let dx = self.depth(x);
        g.neighbors(x)
            .iter()
            .copied()
            .filter(move |&p| self.depth(p) + 1 == dx)
    }
}

pub fn taxonomy_info(g: &Graph) -> Result<TaxonomyInfo> {
    let root = g.root().ok_or(Error::NoRoot)?;
    let hops = hop_distances_from(g, root, None);
    if let Some(i) = hops.iter().position(|&h| h == UNREACHABLE_HOPS) {
        return Err(Error::UnreachableFromRoot(
            g.label(NodeId::from_index(i)).into(),
        ));
    }
    let depth: Vec<u32> = hops.iter().map(|h| h + 1).collect();
    let max_depth = depth.iter().copied().max().unwrap_or(1);
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|v| (depth[v.index()], *v));
    Ok(TaxonomyInfo {
        root,
        depth,
        max_depth,
        order,
    })
}

/// Membership mask of the ancestors of `x` (including `x` itself).
pub fn ancestors(g: &Graph, info: &TaxonomyInfo, x: NodeId) -> Vec<bool> {
    let mut mark = vec![false; g.node_count()];
    let mut stack = vec![x];
    mark[x.index()] = true;
    while let Some(w) = stack.pop() {
        for p in info.parents(g, w) {
            if !mark[p.index()] {
                mark[p.index()] = true;
                stack.push(p);
            }
        }
    }
    mark
}

/// Deeper candidate wins; equal depth goes to the smaller id.
#[inline]
fn better(info: &TaxonomyInfo, a: NodeId, b: NodeId) -> bool {
    let (da, db) = (info.depth(a), info.depth(b));
    da > db || (da == db && a < b)
}

/// The deepest common ancestor of `u` and `v`; ties go to the smallest id.
pub fn deepest_common_ancestor(g: &Graph, info: &TaxonomyInfo, u: NodeId, v: NodeId) -> NodeId {
    let au = ancestors(g, info, u);
    let av = ancestors(g, info, v);
    let mut best = info.root;
    for (i, (&a, &b)) in au.iter().zip(&av).enumerate() {
        let w = NodeId::from_index(i);
        if a && b && better(info, w, best) {
            best = w;
        }
    }
    best
}

/// Deepest common ancestor of `source` with every node, in one pass over the
/// nodes in depth order. Equals [`deepest_common_ancestor`] entry by entry.
pub fn deepest_common_ancestor_row(g: &Graph, info: &TaxonomyInfo, source: NodeId) -> Vec<NodeId> {
    let of_source = ancestors(g, info, source);
    let mut best = vec![info.root; g.node_count()];
    for &t in &info.order {
        if of_source[t.index()] {
            best[t.index()] = t;
            continue;
        }
        let mut pick: Option<NodeId> = None;
        for p in info.parents(g, t) {
            let cand = best[p.index()];
            pick = match pick {
                Some(cur) if !better(info, cand, cur) => Some(cur),
                _ => Some(cand),
            };
        }
        best[t.index()] = pick.unwrap_or(info.root);
    }
    best
}
