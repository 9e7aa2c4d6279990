//! Pairwise-similarity training corpora and stratified test samples.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelTable, NodeId};
use crate::metrics::NodeSimilarity;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SimilarityRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub s: f64,
}

impl SimilarityRecord {
    /// The pair with the smaller id first.
    pub fn unordered(&self) -> (NodeId, NodeId) {
        unordered(self.u, self.v)
    }
}

#[inline]
fn unordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityDataset {
    records: Vec<SimilarityRecord>,
    labels: LabelTable,
    metric: String,
}

impl SimilarityDataset {
    /// Validates and wraps `records`: ids in range, `u != v`, finite `s > 0`
    /// and no repeated unordered pair.
    pub fn new(
        labels: LabelTable,
        metric: impl Into<String>,
        records: Vec<SimilarityRecord>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut seen = BTreeSet::new();
        for r in &records {
            for id in [r.u, r.v] {
                if id.index() >= n {
                    return Err(Error::InvalidNode(id.index()));
                }
            }
            if r.u == r.v {
                return Err(Error::InvalidParameter(alloc::format!(
                    "self-pair `{}` in dataset",
                    labels.label(r.u)
                )));
            }
            if !(r.s.is_finite() && r.s > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "similarity {} for (`{}`, `{}`) must be positive",
                    r.s,
                    labels.label(r.u),
                    labels.label(r.v)
                )));
            }
            if !seen.insert(r.unordered()) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "duplicate pair (`{}`, `{}`)",
                    labels.label(r.u),
                    labels.label(r.v)
                )));
            }
        }
        Ok(Self {
            records,
            labels,
            metric: metric.into(),
        })
    }

    pub fn records(&self) -> &[SimilarityRecord] {
        &self.records
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn metric_name(&self) -> &str {
        &self.metric
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Set of unordered pairs, for exclusion checks.
    pub fn pair_set(&self) -> BTreeSet<(NodeId, NodeId)> {
        self.records
            .iter()
            .map(SimilarityRecord::unordered)
            .collect()
    }
}

/// The `k` most similar partners of `source`, by descending similarity and
/// then ascending id. Non-positive similarities are never kept.
pub fn top_k_row<M: NodeSimilarity + ?Sized>(
    metric: &M,
    source: NodeId,
    k: usize,
) -> Result<Vec<(NodeId, f64)>> {
    let row = metric.row(source)?;
    let mut scored: Vec<(NodeId, f64)> = row
        .into_iter()
        .enumerate()
        .map(|(v, s)| (NodeId::from_index(v), s))
        .filter(|&(v, s)| v != source && s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}

/// Merges per-source top-k rows into a dataset. Rows are visited in source
/// order and an unordered pair is kept from the first row that lists it, so
/// every node is the `u` side of at most `k` records. Output is sorted by
/// `(u, v)`.
pub fn assemble_dataset(
    labels: LabelTable,
    metric: &str,
    rows: impl IntoIterator<Item = (NodeId, Vec<(NodeId, f64)>)>,
) -> Result<SimilarityDataset> {
    let mut by_source: BTreeMap<NodeId, Vec<(NodeId, f64)>> = BTreeMap::new();
    for (u, row) in rows {
        by_source.insert(u, row);
    }
    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    for (u, row) in by_source {
        for (v, s) in row {
            if seen.insert(unordered(u, v)) {
                records.push(SimilarityRecord { u, v, s });
            }
        }
    }
    records.sort_by_key(|r| (r.u, r.v));
    SimilarityDataset::new(labels, metric.to_string(), records)
}

/// Builds the top-`k` pruned training corpus for `metric` on `g`.
///
/// `k >= |V| - 1` keeps every positive pair.
pub fn build_dataset<M: NodeSimilarity + ?Sized>(
    g: &Graph,
    metric: &M,
    k: usize,
) -> Result<SimilarityDataset> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if metric.node_count() != g.node_count() {
        return Err(Error::LabelMismatch);
    }
    let mut rows = Vec::with_capacity(g.node_count());
    for u in g.nodes() {
        rows.push((u, top_k_row(metric, u, k)?));
    }
    assemble_dataset(g.labels().clone(), metric.name(), rows)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathSample {
    pub u: NodeId,
    pub v: NodeId,
    pub length: u32,
}

/// Bounds for [`stratified_path_sample`].
#[derive(Copy, Clone, Debug)]
pub struct SamplingLimits {
    /// Random draws allowed before unfilled strata switch to enumeration.
    pub attempt_cap: u64,
    /// Graphs with at most this many unordered pairs are enumerated directly.
    pub exhaustive_pair_limit: u64,
}

impl Default for SamplingLimits {
    fn default() -> Self {
        Self {
            attempt_cap: 10_000_000,
            exhaustive_pair_limit: 1_000_000,
        }
    }
}

struct BoundedBfs {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    epoch: u32,
    queue: VecDeque<NodeId>,
}

impl BoundedBfs {
    fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            dist: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn start(&mut self, source: NodeId) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.queue.clear();
        self.visit(source, 0);
    }

    fn visit(&mut self, v: NodeId, d: u32) {
        self.stamp[v.index()] = self.epoch;
        self.dist[v.index()] = d;
        self.queue.push_back(v);
    }

    fn seen(&self, v: NodeId) -> bool {
        self.stamp[v.index()] == self.epoch
    }

    /// Hop distance from `u` to `v` if it is at most `limit`.
    fn distance(&mut self, g: &Graph, u: NodeId, v: NodeId, limit: u32) -> Option<u32> {
        self.start(u);
        while let Some(x) = self.queue.pop_front() {
            let d = self.dist[x.index()];
            if d >= limit {
                break;
            }
            for &y in g.neighbors(x) {
                if !self.seen(y) {
                    if y == v {
                        return Some(d + 1);
                    }
                    self.visit(y, d + 1);
                }
            }
        }
        None
    }

    /// Calls `f(v, d)` for every node within `limit` hops of `u`.
    fn ball(&mut self, g: &Graph, u: NodeId, limit: u32, mut f: impl FnMut(NodeId, u32)) {
        self.start(u);
        while let Some(x) = self.queue.pop_front() {
            let d = self.dist[x.index()];
            f(x, d);
            if d >= limit {
                continue;
            }
            for &y in g.neighbors(x) {
                if !self.seen(y) {
                    self.visit(y, d + 1);
                }
            }
        }
    }
}

/// Draws `per_length` unordered node pairs at each exact hop distance
/// `1..=max_length`, uniformly within each stratum and avoiding pairs in
/// `exclude`. Strata are returned in order, each sorted by `(u, v)`.
pub fn stratified_path_sample(
    g: &Graph,
    max_length: u32,
    per_length: usize,
    seed: u64,
    exclude: Option<&SimilarityDataset>,
    limits: SamplingLimits,
) -> Result<Vec<PathSample>> {
    if max_length == 0 {
        return Err(Error::InvalidParameter(
            "maximum path length must be at least 1".into(),
        ));
    }
    let n = g.node_count();
    let strata = max_length as usize;
    let excluded = exclude.map(SimilarityDataset::pair_set).unwrap_or_default();
    let mut chosen: Vec<BTreeSet<(NodeId, NodeId)>> = vec![BTreeSet::new(); strata];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bfs = BoundedBfs::new(n);
    let total_pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;

    if per_length > 0 && n >= 2 && total_pairs > limits.exhaustive_pair_limit {
        let mut missing = strata;
        let mut attempts = 0u64;
        while missing > 0 && attempts < limits.attempt_cap {
            attempts += 1;
            let a = NodeId::from_index(rng.gen_range(0..n));
            let b = NodeId::from_index(rng.gen_range(0..n));
            if a == b {
                continue;
            }
            let pair = unordered(a, b);
            if excluded.contains(&pair) {
                continue;
            }
            let Some(d) = bfs.distance(g, pair.0, pair.1, max_length) else {
                continue;
            };
            let stratum = &mut chosen[d as usize - 1];
            if stratum.len() < per_length && stratum.insert(pair) && stratum.len() == per_length {
                missing -= 1;
            }
        }
    }

    let unfilled: Vec<usize> = (0..strata)
        .filter(|&i| chosen[i].len() < per_length)
        .collect();
    if !unfilled.is_empty() {
        let mut candidates: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); strata];
        for u in g.nodes() {
            bfs.ball(g, u, max_length, |v, d| {
                if v > u && d >= 1 {
                    let i = d as usize - 1;
                    let pair = (u, v);
                    if chosen[i].len() < per_length
                        && !excluded.contains(&pair)
                        && !chosen[i].contains(&pair)
                    {
                        candidates[i].push(pair);
                    }
                }
            });
        }
        for &i in &unfilled {
            let need = per_length - chosen[i].len();
            let pool = &mut candidates[i];
            if pool.len() < need {
                return Err(Error::DeficientStratum {
                    length: i as u32 + 1,
                    needed: per_length,
                    found: chosen[i].len() + pool.len(),
                });
            }
            // partial Fisher-Yates
            for j in 0..need {
                let pick = rng.gen_range(j..pool.len());
                pool.swap(j, pick);
                chosen[i].insert(pool[j]);
            }
        }
    }

    Ok(chosen
        .into_iter()
        .enumerate()
        .flat_map(|(i, pairs)| {
            pairs.into_iter().map(move |(u, v)| PathSample {
                u,
                v,
                length: i as u32 + 1,
            })
        })
        .collect())
}
