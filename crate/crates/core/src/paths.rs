//! Shortest-path machinery.
//!
//! Unweighted graphs use breadth-first search; weighted graphs use Dijkstra.
//! Every weight is positive, so the all-pairs table is Johnson's algorithm with
//! a trivial (zero) potential: one Dijkstra run per source.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Result;
use crate::graph::{Graph, NodeId};

/// Marker for unreachable nodes in hop-count tables.
pub const UNREACHABLE_HOPS: u32 = u32::MAX;

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on id
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances from `source` to every node; `f64::INFINITY` when unreachable.
pub fn shortest_paths_from(g: &Graph, source: NodeId) -> Vec<f64> {
    if g.is_weighted() {
        dijkstra(g, source, None)
    } else {
        hop_distances_from(g, source, None)
            .into_iter()
            .map(|h| {
                if h == UNREACHABLE_HOPS {
                    f64::INFINITY
                } else {
                    h as f64
                }
            })
            .collect()
    }
}

/// Point-to-point distance; the search stops as soon as `target` is settled.
pub fn shortest_path_distance(g: &Graph, source: NodeId, target: NodeId) -> f64 {
    if source == target {
        return 0.0;
    }
    if g.is_weighted() {
        return dijkstra(g, source, Some(target))[target.index()];
    }
    let n = g.node_count();
    let mut dist = vec![UNREACHABLE_HOPS; n];
    let mut queue = VecDeque::new();
    dist[source.index()] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u.index()] + 1;
        for &v in g.neighbors(u) {
            if dist[v.index()] == UNREACHABLE_HOPS {
                if v == target {
                    return next as f64;
                }
                dist[v.index()] = next;
                queue.push_back(v);
            }
        }
    }
    f64::INFINITY
}

/// Breadth-first hop counts from `source`, ignoring edge weights. When
/// `max_hops` is given, nodes farther away are left as [`UNREACHABLE_HOPS`].
pub fn hop_distances_from(g: &Graph, source: NodeId, max_hops: Option<u32>) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE_HOPS; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source.index()] = 0;
    queue.push_back(source);
    let limit = max_hops.unwrap_or(UNREACHABLE_HOPS - 1);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()];
        if du >= limit {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v.index()] == UNREACHABLE_HOPS {
                dist[v.index()] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn dijkstra(g: &Graph, source: NodeId, target: Option<NodeId>) -> Vec<f64> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if done[u.index()] {
            continue;
        }
        done[u.index()] = true;
        if Some(u) == target {
            break;
        }
        let weights = g.neighbor_weights(u);
        for (k, &v) in g.neighbors(u).iter().enumerate() {
            let w = weights.map_or(1.0, |w| w[k]);
            let nd = d + w;
            if nd < dist[v.index()] {
                dist[v.index()] = nd;
                heap.push(HeapEntry { dist: nd, node: v });
            }
        }
    }
    dist
}

/// Row-major table of distances from a set of sources to every node.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable {
    sources: Vec<NodeId>,
    node_count: usize,
    data: Vec<f64>,
}

impl DistanceTable {
    /// Assembles a table from per-source rows given in `sources` order.
    pub fn from_rows(sources: Vec<NodeId>, node_count: usize, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(sources.len(), rows.len());
        let mut data = Vec::with_capacity(sources.len() * node_count);
        for row in rows {
            assert_eq!(row.len(), node_count);
            data.extend_from_slice(&row);
        }
        Self {
            sources,
            node_count,
            data,
        }
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    /// Row for the `i`-th source.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.node_count..(i + 1) * self.node_count]
    }

    /// Distance from the `i`-th source to `v`.
    pub fn get(&self, i: usize, v: NodeId) -> f64 {
        self.data[i * self.node_count + v.index()]
    }
}

/// All-pairs (or subset-to-all) shortest path distances, sequentially.
///
/// Parallel drivers can call [`shortest_paths_from`] per source and assemble
/// the result with [`DistanceTable::from_rows`]; the output is identical.
pub fn all_pairs_shortest_paths(g: &Graph, sources: Option<&[NodeId]>) -> Result<DistanceTable> {
    let sources: Vec<NodeId> = match sources {
        Some(s) => {
            for &u in s {
                g.check_node(u)?;
            }
            s.to_vec()
        }
        None => g.nodes().collect(),
    };
    let rows = sources.iter().map(|&s| shortest_paths_from(g, s)).collect();
    Ok(DistanceTable::from_rows(sources, g.node_count(), rows))
}
