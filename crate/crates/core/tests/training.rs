mod common;

use std::collections::BTreeSet;

use common::random_connected;
use path2vec_core::trainer::{sample_batch, Gradient};
use path2vec_core::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_embeddings(labels: LabelTable, dim: usize, rng: &mut ChaCha8Rng) -> EmbeddingMatrix {
    let data = (0..labels.len() * dim)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    EmbeddingMatrix::new(labels, dim, data).unwrap()
}

/// Central finite differences of `batch_loss` over every parameter.
fn numeric_gradient(b: &TrainingBatch, e: &EmbeddingMatrix, alpha: f64, h: f64) -> Vec<f64> {
    let mut work = e.clone();
    (0..e.as_slice().len())
        .map(|i| {
            let x = e.as_slice()[i];
            work.as_mut_slice()[i] = x + h;
            let up = batch_loss(b, &work, alpha);
            work.as_mut_slice()[i] = x - h;
            let down = batch_loss(b, &work, alpha);
            work.as_mut_slice()[i] = x;
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn gradient_matches_finite_differences(
        n in 3usize..=20,
        dim in 1usize..=8,
        alpha in prop::sample::select(vec![0.0, 0.01, 0.1]),
        p in prop::sample::select(vec![0usize, 3]),
        seed: u64,
    ) {
        let (g, _) = random_connected(n, n / 3, seed);
        let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
        let d = build_dataset(&g, &metric, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let mut recs = d.records().to_vec();
        recs.shuffle(&mut rng);
        recs.truncate(6);
        let batch = sample_batch(&g, recs.into_iter(), p, &mut rng);
        let e = random_embeddings(g.labels().clone(), dim, &mut rng);
        let analytic = batch_gradient(&batch, &e, alpha).to_dense(n);
        let numeric = numeric_gradient(&batch, &e, alpha, 1e-5);
        prop_assert!(max_relative_error(&analytic, &numeric) < 1e-4);
    }

    #[test]
    fn full_batch_loss_is_non_increasing(n in 3usize..=15, seed: u64) {
        let (g, _) = random_connected(n, 2, seed);
        let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
        let d = build_dataset(&g, &metric, 6).unwrap();
        prop_assume!(d.len() <= 100);
        let cfg = TrainingConfig {
            dim: 8,
            alpha: 0.0,
            negatives: 0,
            batch_size: d.len(),
            learning_rate: 1e-3,
            max_epochs: 10,
            validation_fraction: 0.0,
            seed,
            ..Default::default()
        };
        let run = train_with(&g, &d, &cfg, &mut |_| {}, &batch_gradient).unwrap();
        prop_assert_eq!(run.history.len(), 10);
        for w in run.history.windows(2) {
            prop_assert!(w[1].train_loss <= w[0].train_loss + 1e-9);
        }
    }
}

#[test]
fn gradient_merge_equals_whole_batch() {
    let (g, _) = random_connected(12, 4, 1);
    let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
    let d = build_dataset(&g, &metric, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let batch = sample_batch(&g, d.records().iter().copied(), 3, &mut rng);
    let e = random_embeddings(g.labels().clone(), 4, &mut rng);
    let whole = batch_gradient(&batch, &e, 0.1).to_dense(12);
    let mut merged = Gradient::new(4);
    for part in batch.split(7) {
        merged.merge(&batch_gradient(&part, &e, 0.1));
    }
    for (a, b) in whole.iter().zip(merged.to_dense(12)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn batches_respect_invariants() {
    let (g, _) = random_connected(30, 5, 8);
    let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
    let d = build_dataset(&g, &metric, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let batch = sample_batch(&g, d.records().iter().copied(), 3, &mut rng);
    assert_eq!(batch.negatives.len(), 3 * batch.positives.len());
    for (i, p) in batch.positives.iter().enumerate() {
        assert!(g.has_edge(p.u, p.n));
        assert!(g.has_edge(p.v, p.m));
        for &(a, x) in &batch.negatives[3 * i..3 * i + 3] {
            assert!(a == p.u || a == p.v);
            assert!(x != p.u && x != p.v);
        }
    }
}

fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    common::from_edges(n, &edges, None)
}

#[test]
fn training_lowers_validation_error() {
    let g = path_graph(20);
    let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
    let d = build_dataset(&g, &metric, 10).unwrap();
    let cfg = TrainingConfig {
        dim: 32,
        validation_fraction: 0.1,
        seed: 4,
        ..Default::default()
    };
    let mut epochs = 0;
    let run = train_with(&g, &d, &cfg, &mut |_| epochs += 1, &batch_gradient).unwrap();
    let best = run.history[run.best_epoch - 1].validation_mse.unwrap();
    assert!(best < run.initial_validation_mse.unwrap());
    assert_eq!(epochs, run.history.len());
    assert!(run.embeddings.is_finite());
}

#[test]
fn training_is_bit_reproducible() {
    let g = path_graph(15);
    let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
    let d = build_dataset(&g, &metric, 6).unwrap();
    let cfg = TrainingConfig {
        dim: 8,
        max_epochs: 15,
        validation_fraction: 0.1,
        seed: 77,
        ..Default::default()
    };
    let a = train(&g, &d, &cfg, &mut |_| {}).unwrap();
    let b = train(&g, &d, &cfg, &mut |_| {}).unwrap();
    assert_eq!(a, b);
    let c = train(&g, &d, &TrainingConfig { seed: 78, ..cfg }, &mut |_| {}).unwrap();
    assert_ne!(a, c);
}

#[test]
fn training_rejects_bad_inputs() {
    let g = path_graph(5);
    let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
    let d = build_dataset(&g, &metric, 2).unwrap();
    let empty = SimilarityDataset::new(g.labels().clone(), "shp", vec![]).unwrap();
    let cfg = TrainingConfig::default();
    assert_eq!(
        train(&g, &empty, &cfg, &mut |_| {}).unwrap_err(),
        Error::EmptyDataset
    );
    let other = path_graph(6);
    assert_eq!(
        train(&other, &d, &cfg, &mut |_| {}).unwrap_err(),
        Error::LabelMismatch
    );
    // 5 % of a handful of records is below one validation pair
    assert!(train(&g, &d, &cfg, &mut |_| {}).is_err());
}

/// Random recursive tree on `n` nodes rooted at 0.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    random_connected(n, 0, seed).0
}

#[test]
fn fits_shortest_path_similarity_on_a_tree() {
    let g = random_tree(100, 2024);
    let metric = GraphMetric::new(&g, MetricKind::Shp).unwrap();
    let full = build_dataset(&g, &metric, 50).unwrap();
    // held-out pairs are drawn uniformly from all node pairs, not from the pruned set
    let mut pairs: Vec<(NodeId, NodeId)> = (0..100u32)
        .flat_map(|u| (u + 1..100).map(move |v| (NodeId(u), NodeId(v))))
        .collect();
    pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(11));
    pairs.truncate(300);
    let held: BTreeSet<_> = pairs.iter().copied().collect();
    let recs: Vec<_> = full
        .records()
        .iter()
        .filter(|r| !held.contains(&r.unordered()))
        .copied()
        .collect();
    let train_set = SimilarityDataset::new(g.labels().clone(), "shp", recs).unwrap();
    let cfg = TrainingConfig {
        dim: 64,
        seed: 1,
        ..Default::default()
    };
    let e = train(&g, &train_set, &cfg, &mut |_| {}).unwrap();
    let gold: Vec<_> = pairs
        .iter()
        .map(|&(u, v)| (u, v, metric.similarity(u, v).unwrap()))
        .collect();
    let rho = evaluate_fit(&e, &gold).unwrap();
    println!("held-out spearman {rho:.4}");
    assert!(rho >= 0.9, "rho = {rho}");
}
