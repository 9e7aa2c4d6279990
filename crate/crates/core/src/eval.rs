//! Rank-correlation evaluation of embeddings against gold similarities and
//! human judgments, plus nearest-neighbor queries.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Fractional ranks starting at 1; tied values share their average rank.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = alloc::vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewValues(x.len()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("NaN in correlation input".into()));
    }
    let rx = fractional_ranks(x);
    let ry = fractional_ranks(y);
    let mean = (x.len() + 1) as f64 / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman correlation of predicted (`v_u·v_v`) against gold similarities.
pub fn evaluate_fit(e: &EmbeddingMatrix, gold: &[(NodeId, NodeId, f64)]) -> Result<f64> {
    let mut predicted = Vec::with_capacity(gold.len());
    let mut expected = Vec::with_capacity(gold.len());
    for &(u, v, s) in gold {
        for id in [u, v] {
            if id.index() >= e.node_count() {
                return Err(Error::InvalidNode(id.index()));
            }
        }
        predicted.push(e.similarity(u, v));
        expected.push(s);
    }
    spearman(&predicted, &expected)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JudgmentPair {
    pub lemma_a: String,
    pub lemma_b: String,
    pub score: f64,
}

/// Lemma to candidate node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SenseInventory {
    senses: BTreeMap<String, Vec<NodeId>>,
}

impl SenseInventory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or extends a lemma's candidate list; duplicates are dropped and
    /// first-seen order is kept.
    pub fn insert(&mut self, lemma: &str, ids: impl IntoIterator<Item = NodeId>) -> Result<()> {
        if lemma.is_empty() {
            return Err(Error::EmptyLabel);
        }
        let list = self.senses.entry(lemma.to_string()).or_default();
        for id in ids {
            if !list.contains(&id) {
                list.push(id);
            }
        }
        if list.is_empty() {
            self.senses.remove(lemma);
            return Err(Error::InvalidParameter(alloc::format!(
                "lemma `{lemma}` has no senses"
            )));
        }
        Ok(())
    }

    pub fn senses(&self, lemma: &str) -> Option<&[NodeId]> {
        self.senses.get(lemma).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[NodeId])> {
        self.senses.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Errors if any id is outside `0..node_count`.
    pub fn check(&self, node_count: usize) -> Result<()> {
        for ids in self.senses.values() {
            if let Some(bad) = ids.iter().find(|id| id.index() >= node_count) {
                return Err(Error::InvalidNode(bad.index()));
            }
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct HumanEvaluation {
    pub rho: f64,
    pub used: usize,
    /// Pairs dropped because a lemma is missing from the inventory.
    pub skipped: usize,
}

/// Best dot product over all sense pairs of two lemmas.
pub fn max_sense_similarity(e: &EmbeddingMatrix, a: &[NodeId], b: &[NodeId]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &x in a {
        for &y in b {
            best = best.max(e.similarity(x, y));
        }
    }
    best
}

/// Spearman correlation of max-over-senses dot products with human scores.
pub fn evaluate_human(
    e: &EmbeddingMatrix,
    judgments: &[JudgmentPair],
    inv: &SenseInventory,
) -> Result<HumanEvaluation> {
    inv.check(e.node_count())?;
    let mut model = Vec::new();
    let mut human = Vec::new();
    let mut skipped = 0;
    for j in judgments {
        match (inv.senses(&j.lemma_a), inv.senses(&j.lemma_b)) {
            (Some(a), Some(b)) => {
                model.push(max_sense_similarity(e, a, b));
                human.push(j.score);
            }
            _ => skipped += 1,
        }
    }
    if model.len() < 2 {
        return Err(Error::TooFewValues(model.len()));
    }
    Ok(HumanEvaluation {
        rho: spearman(&model, &human)?,
        used: model.len(),
        skipped,
    })
}

/// Top-`k` nodes by dot product with `u`, excluding `u`; ties by smaller id.
pub fn nearest_neighbors(e: &EmbeddingMatrix, u: NodeId, k: usize) -> Result<Vec<(NodeId, f64)>> {
    if u.index() >= e.node_count() {
        return Err(Error::InvalidNode(u.index()));
    }
    let mut scored: Vec<(NodeId, f64)> = e
        .similarity_row(u)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (NodeId::from_index(i), s))
        .filter(|&(v, _)| v != u)
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}
