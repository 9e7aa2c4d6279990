//! Fits node embeddings so that dot products approximate a similarity
//! dataset.
//!
//! Per batch of real pairs `(u, v, s)` the objective is
//!
//! ```text
//!   sum (v_u·v_v - s)^2  -  alpha * (v_u·v_n + v_v·v_m)      over real pairs
//! + sum (v_a·v_x)^2                                         over negatives
//! ```
//!
//! where `n` and `m` are graph neighbors of `u` and `v` drawn at random and
//! each real pair brings `negatives` zero-similarity pairs anchored
//! alternately at `u` and `v`. Parameters are updated with Adam; training
//! stops early on the validation mean squared error and the best snapshot is
//! returned.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{SimilarityDataset, SimilarityRecord};
use crate::embedding::{dot, init_embeddings, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingConfig {
    pub dim: usize,
    /// Weight of the adjacency regularizer.
    pub alpha: f64,
    /// Negative pairs per real pair.
    pub negatives: usize,
    /// Real pairs per batch.
    pub batch_size: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    /// Share of records held out for early stopping; 0 disables it.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            dim: 300,
            alpha: 0.01,
            negatives: 3,
            batch_size: 100,
            learning_rate: 0.001,
            max_epochs: 200,
            patience: 10,
            validation_fraction: 0.05,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad("alpha must be a nonnegative number");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if self.max_epochs == 0 {
            return bad("max epochs must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be positive");
        }
        if !(0.0..=0.5).contains(&self.validation_fraction) {
            return bad("validation fraction must lie in [0, 0.5]");
        }
        Ok(())
    }
}

/// A real pair together with its sampled graph neighbors.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PositiveSample {
    pub u: NodeId,
    pub v: NodeId,
    pub s: f64,
    /// Neighbor of `u`.
    pub n: NodeId,
    /// Neighbor of `v`.
    pub m: NodeId,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingBatch {
    pub positives: Vec<PositiveSample>,
    /// Zero-target pairs; entries `i*p..(i+1)*p` belong to `positives[i]`.
    pub negatives: Vec<(NodeId, NodeId)>,
}

impl TrainingBatch {
    /// Negatives per positive.
    pub fn negatives_per_positive(&self) -> usize {
        if self.positives.is_empty() {
            0
        } else {
            self.negatives.len() / self.positives.len()
        }
    }

    /// Splits into sub-batches of at most `size` positives, keeping each
    /// positive's negatives with it.
    pub fn split(&self, size: usize) -> Vec<TrainingBatch> {
        let p = self.negatives_per_positive();
        self.positives
            .chunks(size.max(1))
            .enumerate()
            .map(|(i, chunk)| {
                let start = i * size.max(1) * p;
                TrainingBatch {
                    positives: chunk.to_vec(),
                    negatives: self.negatives[start..start + chunk.len() * p].to_vec(),
                }
            })
            .collect()
    }
}

pub fn batch_loss(b: &TrainingBatch, e: &EmbeddingMatrix, alpha: f64) -> f64 {
    let mut loss = 0.0;
    for p in &b.positives {
        let err = e.similarity(p.u, p.v) - p.s;
        loss += err * err;
        loss -= alpha * (e.similarity(p.u, p.n) + e.similarity(p.v, p.m));
    }
    for &(a, x) in &b.negatives {
        let d = e.similarity(a, x);
        loss += d * d;
    }
    loss
}

/// Sparse gradient: one dense row per touched node.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    dim: usize,
    rows: BTreeMap<NodeId, Vec<f64>>,
}

impl Gradient {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `scale * x` to the row of `id`.
    pub fn axpy(&mut self, id: NodeId, scale: f64, x: &[f64]) {
        let dim = self.dim;
        let row = self.rows.entry(id).or_insert_with(|| vec![0.0; dim]);
        for (r, xi) in row.iter_mut().zip(x) {
            *r += scale * xi;
        }
    }

    pub fn row(&self, id: NodeId) -> Option<&[f64]> {
        self.rows.get(&id).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (NodeId, &[f64])> {
        self.rows.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    /// Accumulates another gradient into this one.
    pub fn merge(&mut self, other: &Gradient) {
        for (id, row) in other.rows() {
            self.axpy(id, 1.0, row);
        }
    }

    /// Dense copy, row-major over `node_count` rows.
    pub fn to_dense(&self, node_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; node_count * self.dim];
        for (id, row) in self.rows() {
            out[id.index() * self.dim..(id.index() + 1) * self.dim].copy_from_slice(row);
        }
        out
    }
}

/// Analytic gradient of [`batch_loss`] with respect to every touched row.
pub fn batch_gradient(b: &TrainingBatch, e: &EmbeddingMatrix, alpha: f64) -> Gradient {
    let mut g = Gradient::new(e.dim());
    for p in &b.positives {
        let (vu, vv) = (e.row(p.u), e.row(p.v));
        let c = 2.0 * (dot(vu, vv) - p.s);
        g.axpy(p.u, c, vv);
        g.axpy(p.v, c, vu);
        if alpha != 0.0 {
            g.axpy(p.u, -alpha, e.row(p.n));
            g.axpy(p.n, -alpha, vu);
            g.axpy(p.v, -alpha, e.row(p.m));
            g.axpy(p.m, -alpha, vv);
        }
    }
    for &(a, x) in &b.negatives {
        let (va, vx) = (e.row(a), e.row(x));
        let c = 2.0 * dot(va, vx);
        g.axpy(a, c, vx);
        g.axpy(x, c, va);
    }
    g
}

/// Adam over the full parameter matrix; rows absent from a gradient count as
/// zero gradient.
#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    beta1_t: f64,
    beta2_t: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    scratch: Vec<f64>,
}

impl Adam {
    pub fn new(len: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            beta1_t: 1.0,
            beta2_t: 1.0,
            m: vec![0.0; len],
            v: vec![0.0; len],
            scratch: vec![0.0; len],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &Gradient) {
        let dim = grad.dim();
        self.scratch.iter_mut().for_each(|x| *x = 0.0);
        for (id, row) in grad.rows() {
            self.scratch[id.index() * dim..(id.index() + 1) * dim].copy_from_slice(row);
        }
        self.beta1_t *= self.beta1;
        self.beta2_t *= self.beta2;
        let c1 = 1.0 - self.beta1_t;
        let c2 = 1.0 - self.beta2_t;
        for i in 0..params.len() {
            let g = self.scratch[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (libm::sqrt(v_hat) + self.eps);
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Sum of batch losses over the epoch, each taken before its update.
    pub train_loss: f64,
    /// `None` when early stopping is disabled.
    pub validation_mse: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainingRun {
    pub embeddings: EmbeddingMatrix,
    pub history: Vec<EpochStats>,
    /// Validation MSE of the initial embeddings.
    pub initial_validation_mse: Option<f64>,
    /// Epoch whose parameters were returned (0 = initial).
    pub best_epoch: usize,
    pub validation: Vec<SimilarityRecord>,
}

pub fn mean_squared_error(e: &EmbeddingMatrix, records: &[SimilarityRecord]) -> f64 {
    let sum: f64 = records
        .iter()
        .map(|r| {
            let d = e.similarity(r.u, r.v) - r.s;
            d * d
        })
        .sum();
    sum / records.len() as f64
}

/// Trains single-threaded with [`batch_gradient`]; bit-reproducible per seed.
pub fn train(
    g: &Graph,
    d: &SimilarityDataset,
    cfg: &TrainingConfig,
    progress: &mut dyn FnMut(&EpochStats),
) -> Result<EmbeddingMatrix> {
    train_with(g, d, cfg, progress, &batch_gradient).map(|run| run.embeddings)
}

/// Gradient routine plugged into [`train_with`].
pub type GradientFn<'a> = &'a dyn Fn(&TrainingBatch, &EmbeddingMatrix, f64) -> Gradient;

/// Full training loop with a caller-provided gradient routine.
pub fn train_with(
    g: &Graph,
    d: &SimilarityDataset,
    cfg: &TrainingConfig,
    progress: &mut dyn FnMut(&EpochStats),
    gradient: GradientFn<'_>,
) -> Result<TrainingRun> {
    cfg.validate()?;
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if d.labels() != g.labels() {
        return Err(Error::LabelMismatch);
    }
    let n = g.node_count();
    if cfg.negatives > 0 && n < 3 {
        return Err(Error::InvalidParameter(
            "negative sampling needs at least 3 nodes".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);

    let mut order: Vec<usize> = (0..d.len()).collect();
    order.shuffle(&mut rng);
    let n_val = (cfg.validation_fraction * d.len() as f64) as usize;
    if cfg.validation_fraction > 0.0 && n_val == 0 {
        return Err(Error::InvalidParameter(
            "validation split is empty; lower the fraction or add records".into(),
        ));
    }
    if n_val >= d.len() {
        return Err(Error::InvalidParameter(
            "no records left for training".into(),
        ));
    }
    let records = d.records();
    let validation: Vec<SimilarityRecord> = order[..n_val].iter().map(|&i| records[i]).collect();
    let mut train_idx: Vec<usize> = order[n_val..].to_vec();
    train_idx.sort_unstable();

    let mut emb = init_embeddings(g.labels().clone(), cfg.dim, cfg.seed)?;
    let mut adam = Adam::new(emb.as_slice().len(), cfg.learning_rate);

    let initial_validation_mse =
        (!validation.is_empty()).then(|| mean_squared_error(&emb, &validation));
    let mut best = emb.clone();
    let mut best_mse = initial_validation_mse.unwrap_or(f64::INFINITY);
    let mut best_epoch = 0;
    let mut stale = 0;
    let mut history = Vec::new();

    for epoch in 1..=cfg.max_epochs {
        train_idx.shuffle(&mut rng);
        let mut train_loss = 0.0;
        for chunk in train_idx.chunks(cfg.batch_size) {
            let batch = sample_batch(
                g,
                chunk.iter().map(|&i| records[i]),
                cfg.negatives,
                &mut rng,
            );
            train_loss += batch_loss(&batch, &emb, cfg.alpha);
            let grad = gradient(&batch, &emb, cfg.alpha);
            adam.step(emb.as_mut_slice(), &grad);
        }
        if !emb.is_finite() {
            return Err(Error::NonFinite(epoch));
        }
        let validation_mse =
            (!validation.is_empty()).then(|| mean_squared_error(&emb, &validation));
        let stats = EpochStats {
            epoch,
            train_loss,
            validation_mse,
        };
        progress(&stats);
        history.push(stats);

        match validation_mse {
            Some(mse) if mse < best_mse => {
                best_mse = mse;
                best = emb.clone();
                best_epoch = epoch;
                stale = 0;
            }
            Some(_) => {
                stale += 1;
                if stale >= cfg.patience {
                    break;
                }
            }
            None => {
                best_epoch = epoch;
            }
        }
    }

    let embeddings = if validation.is_empty() { emb } else { best };
    Ok(TrainingRun {
        embeddings,
        history,
        initial_validation_mse,
        best_epoch,
        validation,
    })
}

fn random_neighbor(g: &Graph, u: NodeId, rng: &mut ChaCha8Rng) -> NodeId {
    let nb = g.neighbors(u);
    if nb.is_empty() {
        u
    } else {
        nb[rng.gen_range(0..nb.len())]
    }
}

/// Uniform node other than `a` and `b`.
fn random_other(n: usize, a: NodeId, b: NodeId, rng: &mut ChaCha8Rng) -> NodeId {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let excluded = if lo == hi { 1 } else { 2 };
    let mut x = rng.gen_range(0..n - excluded);
    if x >= lo.index() {
        x += 1;
    }
    if lo != hi && x >= hi.index() {
        x += 1;
    }
    NodeId::from_index(x)
}

/// Attaches neighbors and fresh negatives to a run of real pairs.
pub fn sample_batch(
    g: &Graph,
    records: impl Iterator<Item = SimilarityRecord>,
    negatives: usize,
    rng: &mut ChaCha8Rng,
) -> TrainingBatch {
    let n = g.node_count();
    let mut batch = TrainingBatch::default();
    for r in records {
        let nu = random_neighbor(g, r.u, rng);
        let nv = random_neighbor(g, r.v, rng);
        batch.positives.push(PositiveSample {
            u: r.u,
            v: r.v,
            s: r.s,
            n: nu,
            m: nv,
        });
        for t in 0..negatives {
            let anchor = if t % 2 == 0 { r.u } else { r.v };
            batch
                .negatives
                .push((anchor, random_other(n, r.u, r.v, rng)));
        }
    }
    batch
}
