//! Graph node similarity metrics and node embeddings whose dot products
//! approximate them.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, parallel
//! drivers, timing and the command line live in the `path2vec` crate.
//!
//! Pipeline: build a [`Graph`], pick a [`GraphMetric`], prune the all-pairs
//! similarities into a [`SimilarityDataset`] with [`build_dataset`], fit an
//! [`EmbeddingMatrix`] with [`train`], then query `v_u · v_v` in place of the
//! graph metric.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod metrics;
pub mod paths;
pub mod taxonomy;
pub mod trainer;
pub mod wsd;

pub use dataset::{
    build_dataset, stratified_path_sample, PathSample, SamplingLimits, SimilarityDataset,
    SimilarityRecord,
};
pub use embedding::{init_embeddings, EmbeddingMatrix};
pub use error::{Error, Result};
pub use eval::{
    evaluate_fit, evaluate_human, nearest_neighbors, spearman, JudgmentPair, SenseInventory,
};
pub use graph::{Graph, GraphBuilder, LabelTable, NodeId};
pub use metrics::{
    lch_similarity, shp_similarity, wup_similarity, CustomSimilarity, GraphMetric, MetricKind,
    NodeSimilarity,
};
pub use paths::{all_pairs_shortest_paths, shortest_paths_from, DistanceTable};
pub use taxonomy::{deepest_common_ancestor, taxonomy_info, TaxonomyInfo};
pub use trainer::{
    batch_gradient, batch_loss, train, train_with, EpochStats, TrainingBatch, TrainingConfig,
    TrainingRun,
};
pub use wsd::{disambiguate, score_f1, SenseAssignment, SenseSimilarity, WsdInstance, WsdToken};
