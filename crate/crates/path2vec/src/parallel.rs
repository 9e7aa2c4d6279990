//! Multi-threaded variants of the all-pairs, dataset and gradient drivers.
//!
//! Distance tables and datasets are assembled in source order and match the
//! serial results exactly. Parallel gradients sum per-chunk partial gradients
//! in chunk order: the outcome is fixed for a given thread count but is not
//! bit-identical to single-threaded training.

use path2vec_core::dataset::{assemble_dataset, top_k_row};
use path2vec_core::paths::shortest_paths_from;
use path2vec_core::trainer::{batch_gradient, Gradient, TrainingRun};
use path2vec_core::{
    train_with, DistanceTable, EmbeddingMatrix, EpochStats, Graph, NodeId, NodeSimilarity,
    SimilarityDataset, TrainingBatch, TrainingConfig,
};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Error, Result};

pub fn pool(threads: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start thread pool: {e}")))
}

pub fn all_pairs_shortest_paths(
    pool: &ThreadPool,
    g: &Graph,
    sources: Option<&[NodeId]>,
) -> Result<DistanceTable> {
    let sources: Vec<NodeId> = match sources {
        Some(s) => {
            for &u in s {
                g.check_node(u)?;
            }
            s.to_vec()
        }
        None => g.nodes().collect(),
    };
    let rows = pool.install(|| {
        sources
            .par_iter()
            .map(|&s| shortest_paths_from(g, s))
            .collect()
    });
    Ok(DistanceTable::from_rows(sources, g.node_count(), rows))
}

pub fn build_dataset<M: NodeSimilarity + Sync + ?Sized>(
    pool: &ThreadPool,
    g: &Graph,
    metric: &M,
    k: usize,
) -> Result<SimilarityDataset> {
    if k == 0 {
        return Err(path2vec_core::Error::InvalidParameter("k must be at least 1".into()).into());
    }
    if metric.node_count() != g.node_count() {
        return Err(path2vec_core::Error::LabelMismatch.into());
    }
    let nodes: Vec<NodeId> = g.nodes().collect();
    let rows = pool.install(|| {
        nodes
            .par_iter()
            .map(|&u| top_k_row(metric, u, k).map(|row| (u, row)))
            .collect::<path2vec_core::Result<Vec<_>>>()
    })?;
    Ok(assemble_dataset(g.labels().clone(), metric.name(), rows)?)
}

/// Splits a batch into one chunk per thread and merges the partial
/// gradients in chunk order.
pub fn batch_gradient_par(
    pool: &ThreadPool,
    b: &TrainingBatch,
    e: &EmbeddingMatrix,
    alpha: f64,
) -> Gradient {
    let threads = pool.current_num_threads().max(1);
    let size = b.positives.len().div_ceil(threads).max(1);
    let parts = b.split(size);
    let grads: Vec<Gradient> = pool.install(|| {
        parts
            .par_iter()
            .map(|p| batch_gradient(p, e, alpha))
            .collect()
    });
    let mut total = Gradient::new(e.dim());
    for g in &grads {
        total.merge(g);
    }
    total
}

/// Training with batch gradients computed on `pool`.
pub fn train(
    pool: &ThreadPool,
    g: &Graph,
    d: &SimilarityDataset,
    cfg: &TrainingConfig,
    progress: &mut dyn FnMut(&EpochStats),
) -> Result<TrainingRun> {
    let grad =
        |b: &TrainingBatch, e: &EmbeddingMatrix, alpha: f64| batch_gradient_par(pool, b, e, alpha);
    Ok(train_with(g, d, cfg, progress, &grad)?)
}
