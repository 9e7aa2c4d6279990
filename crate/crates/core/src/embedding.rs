//! Dense node embedding matrix; predicted similarity is the dot product.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{LabelTable, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    labels: LabelTable,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Wraps row-major `data` (`labels.len() * dim` finite values).
    pub fn new(labels: LabelTable, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if data.len() != labels.len() * dim {
            return Err(Error::LengthMismatch(data.len(), labels.len() * dim));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite embedding entry".into()));
        }
        Ok(Self { labels, dim, data })
    }

    pub fn zeros(labels: LabelTable, dim: usize) -> Self {
        let data = alloc::vec![0.0; labels.len() * dim];
        Self { labels, dim, data }
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, id: NodeId) -> &[f64] {
        let i = id.index() * self.dim;
        &self.data[i..i + self.dim]
    }

    pub fn row_mut(&mut self, id: NodeId) -> &mut [f64] {
        let i = id.index() * self.dim;
        &mut self.data[i..i + self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Predicted similarity `v_u · v_v`.
    #[inline]
    pub fn similarity(&self, u: NodeId, v: NodeId) -> f64 {
        dot(self.row(u), self.row(v))
    }

    /// Dot products of `source` with every row.
    pub fn similarity_row(&self, source: NodeId) -> Vec<f64> {
        let s = self.row(source);
        self.data
            .chunks_exact(self.dim)
            .map(|r| dot(s, r))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Random matrix with entries i.i.d. uniform in `[-0.5/dim, 0.5/dim]`.
pub fn init_embeddings(labels: LabelTable, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if dim == 0 || labels.is_empty() {
        return Err(Error::InvalidParameter(
            "node count and dimension must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 0.5 / dim as f64;
    let data = (0..labels.len() * dim)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    EmbeddingMatrix::new(labels, dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> LabelTable {
        LabelTable::from_labels((0..n).map(|i| alloc::format!("n{i}"))).unwrap()
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = init_embeddings(labels(3), 2, 42).unwrap();
        let b = init_embeddings(labels(3), 2, 42).unwrap();
        let c = init_embeddings(labels(3), 2, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.as_slice().len(), 6);
        assert!(a.as_slice().iter().all(|x| x.abs() <= 0.25));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(init_embeddings(labels(3), 0, 1).is_err());
        assert!(EmbeddingMatrix::new(labels(2), 2, alloc::vec![0.0; 3]).is_err());
        assert!(EmbeddingMatrix::new(labels(1), 1, alloc::vec![f64::NAN]).is_err());
    }

    #[test]
    fn similarity_is_dot() {
        let e = EmbeddingMatrix::new(labels(2), 2, alloc::vec![1.0, 2.0, 3.0, -1.0]).unwrap();
        assert_eq!(e.similarity(NodeId(0), NodeId(1)), 1.0);
        assert_eq!(e.similarity_row(NodeId(0)), alloc::vec![5.0, 1.0]);
    }
}
