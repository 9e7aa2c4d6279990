//! Graph-based word sense disambiguation by weighted degree centrality.
//!
//! All candidate senses of a sentence form one graph; senses of different
//! tokens are joined by edges weighted with a similarity backend, and each
//! token takes its most central candidate.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::SenseInventory;
use crate::graph::{LabelTable, NodeId};
use crate::metrics::{GraphMetric, NodeSimilarity};

/// Pairwise sense similarity used to weight sense-graph edges.
pub trait SenseSimilarity {
    fn labels(&self) -> &LabelTable;

    fn sense_similarity(&self, a: NodeId, b: NodeId) -> Result<f64>;
}

impl SenseSimilarity for GraphMetric<'_> {
    fn labels(&self) -> &LabelTable {
        self.graph().labels()
    }

    fn sense_similarity(&self, a: NodeId, b: NodeId) -> Result<f64> {
        self.similarity(a, b)
    }
}

impl SenseSimilarity for EmbeddingMatrix {
    fn labels(&self) -> &LabelTable {
        EmbeddingMatrix::labels(self)
    }

    fn sense_similarity(&self, a: NodeId, b: NodeId) -> Result<f64> {
        Ok(self.similarity(a, b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsdToken {
    pub lemma: String,
    pub gold: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WsdInstance {
    pub id: String,
    pub tokens: Vec<WsdToken>,
}

impl WsdInstance {
    /// Checks that every gold sense is among its token's candidates.
    pub fn check(&self, inv: &SenseInventory, labels: &LabelTable) -> Result<()> {
        for t in &self.tokens {
            let Some(gold) = &t.gold else { continue };
            let id = labels.resolve(gold)?;
            let ok = inv.senses(&t.lemma).is_some_and(|c| c.contains(&id));
            if !ok {
                return Err(Error::InvalidParameter(alloc::format!(
                    "instance `{}`: gold sense `{gold}` is not a candidate of `{}`",
                    self.id,
                    t.lemma
                )));
            }
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SenseNode {
    pub token: usize,
    pub sense: NodeId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SenseGraph {
    pub nodes: Vec<SenseNode>,
    /// `(i, j, weight)` over indices into `nodes`, `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl SenseGraph {
    /// Weighted degree of every node.
    pub fn centrality(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.nodes.len()];
        for &(i, j, w) in &self.edges {
            c[i] += w;
            c[j] += w;
        }
        c
    }
}

pub fn build_sense_graph<S: SenseSimilarity + ?Sized>(
    inst: &WsdInstance,
    inv: &SenseInventory,
    sim: &S,
) -> Result<SenseGraph> {
    let mut nodes = Vec::new();
    for (t, tok) in inst.tokens.iter().enumerate() {
        if let Some(cands) = inv.senses(&tok.lemma) {
            nodes.extend(cands.iter().map(|&sense| SenseNode { token: t, sense }));
        }
    }
    if nodes.is_empty() {
        return Err(Error::NoCandidates);
    }
    let labels = sim.labels();
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let (a, b) = (nodes[i], nodes[j]);
            if a.token == b.token {
                continue;
            }
            let backend_err = |reason: String| Error::Backend {
                a: label_or_id(labels, a.sense),
                b: label_or_id(labels, b.sense),
                reason,
            };
            let w = sim
                .sense_similarity(a.sense, b.sense)
                .map_err(|e| backend_err(e.to_string()))?;
            if w.is_nan() {
                return Err(backend_err("NaN similarity".into()));
            }
            edges.push((i, j, w.max(0.0)));
        }
    }
    Ok(SenseGraph { nodes, edges })
}

fn label_or_id(labels: &LabelTable, id: NodeId) -> String {
    if id.index() < labels.len() {
        labels.label(id).to_string()
    } else {
        alloc::format!("#{id}")
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TokenChoice {
    pub sense: NodeId,
    pub centrality: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SenseAssignment {
    /// One entry per token; `None` when the lemma has no candidates.
    pub choices: Vec<Option<TokenChoice>>,
}

pub fn disambiguate<S: SenseSimilarity + ?Sized>(
    inst: &WsdInstance,
    inv: &SenseInventory,
    sim: &S,
) -> Result<SenseAssignment> {
    let graph = build_sense_graph(inst, inv, sim)?;
    let centrality = graph.centrality();
    let mut choices: Vec<Option<TokenChoice>> = vec![None; inst.tokens.len()];
    for (node, &c) in graph.nodes.iter().zip(&centrality) {
        let slot = &mut choices[node.token];
        let take = match slot {
            None => true,
            Some(cur) => c > cur.centrality || (c == cur.centrality && node.sense < cur.sense),
        };
        if take {
            *slot = Some(TokenChoice {
                sense: node.sense,
                centrality: c,
            });
        }
    }
    Ok(SenseAssignment { choices })
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub correct: usize,
    pub attempted: usize,
    pub gold: usize,
}

/// Micro precision, recall and F1 over tokens that carry a gold sense.
pub fn score_f1(
    assignments: &[SenseAssignment],
    instances: &[WsdInstance],
    labels: &LabelTable,
) -> Result<F1Score> {
    if assignments.len() != instances.len() {
        return Err(Error::LengthMismatch(assignments.len(), instances.len()));
    }
    let (mut correct, mut attempted, mut gold) = (0, 0, 0);
    for (a, inst) in assignments.iter().zip(instances) {
        if a.choices.len() != inst.tokens.len() {
            return Err(Error::LengthMismatch(a.choices.len(), inst.tokens.len()));
        }
        for (choice, tok) in a.choices.iter().zip(&inst.tokens) {
            let Some(g) = &tok.gold else { continue };
            gold += 1;
            if let Some(c) = choice {
                attempted += 1;
                if labels.label(c.sense) == g {
                    correct += 1;
                }
            }
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(correct, attempted);
    let recall = ratio(correct, gold);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(F1Score {
        precision,
        recall,
        f1,
        correct,
        attempted,
        gold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Table {
        labels: LabelTable,
        f: fn(NodeId, NodeId) -> f64,
    }

    impl SenseSimilarity for Table {
        fn labels(&self) -> &LabelTable {
            &self.labels
        }
        fn sense_similarity(&self, a: NodeId, b: NodeId) -> Result<f64> {
            Ok((self.f)(a, b))
        }
    }

    fn labels(n: usize) -> LabelTable {
        LabelTable::from_labels((0..n).map(|i| alloc::format!("s{i}"))).unwrap()
    }

    fn instance(lemmas: &[&str]) -> WsdInstance {
        WsdInstance {
            id: "i".into(),
            tokens: lemmas
                .iter()
                .map(|l| WsdToken {
                    lemma: l.to_string(),
                    gold: None,
                })
                .collect(),
        }
    }

    fn inventory(entries: &[(&str, &[u32])]) -> SenseInventory {
        let mut inv = SenseInventory::new();
        for (l, ids) in entries {
            inv.insert(l, ids.iter().map(|&i| NodeId(i))).unwrap();
        }
        inv
    }

    #[test]
    fn edge_counts() {
        let sim = Table {
            labels: labels(5),
            f: |_, _| 0.7,
        };
        let inv = inventory(&[("a", &[0]), ("b", &[1])]);
        let g = build_sense_graph(&instance(&["a", "b"]), &inv, &sim).unwrap();
        assert_eq!(g.edges, vec![(0, 1, 0.7)]);

        let g = build_sense_graph(&instance(&["a"]), &inv, &sim).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert!(g.edges.is_empty());

        let inv = inventory(&[("a", &[0, 1]), ("b", &[2]), ("c", &[3])]);
        let g = build_sense_graph(&instance(&["a", "b", "c"]), &inv, &sim).unwrap();
        assert_eq!(g.edges.len(), 5);
    }

    #[test]
    fn no_candidates() {
        let sim = Table {
            labels: labels(2),
            f: |_, _| 1.0,
        };
        assert_eq!(
            build_sense_graph(&instance(&["x"]), &SenseInventory::new(), &sim),
            Err(Error::NoCandidates)
        );
    }

    #[test]
    fn negative_weights_are_clamped() {
        let sim = Table {
            labels: labels(2),
            f: |_, _| -3.0,
        };
        let inv = inventory(&[("a", &[0]), ("b", &[1])]);
        let g = build_sense_graph(&instance(&["a", "b"]), &inv, &sim).unwrap();
        assert_eq!(g.edges[0].2, 0.0);
    }

    #[test]
    fn equal_weights_tie_break_by_id() {
        let sim = Table {
            labels: labels(6),
            f: |_, _| 1.0,
        };
        let inv = inventory(&[("a", &[3, 1]), ("b", &[5, 2]), ("c", &[0])]);
        let a = disambiguate(&instance(&["a", "b", "c", "zzz"]), &inv, &sim).unwrap();
        let senses: Vec<_> = a.choices.iter().map(|c| c.map(|c| c.sense.0)).collect();
        assert_eq!(senses, vec![Some(1), Some(2), Some(0), None]);
        assert_eq!(a.choices[2].unwrap().centrality, 4.0);
    }

    #[test]
    fn backend_errors_name_the_pair() {
        struct Failing(LabelTable);
        impl SenseSimilarity for Failing {
            fn labels(&self) -> &LabelTable {
                &self.0
            }
            fn sense_similarity(&self, _: NodeId, _: NodeId) -> Result<f64> {
                Err(Error::Disconnected("s0".into(), "s1".into()))
            }
        }
        let inv = inventory(&[("a", &[0]), ("b", &[1])]);
        let err = build_sense_graph(&instance(&["a", "b"]), &inv, &Failing(labels(2))).unwrap_err();
        assert!(matches!(err, Error::Backend { ref a, ref b, .. } if a == "s0" && b == "s1"));
    }

    fn gold_instance(n: usize) -> WsdInstance {
        WsdInstance {
            id: "g".into(),
            tokens: (0..n)
                .map(|i| WsdToken {
                    lemma: alloc::format!("l{i}"),
                    gold: Some("s0".into()),
                })
                .collect(),
        }
    }

    fn assignment(senses: &[Option<u32>]) -> SenseAssignment {
        SenseAssignment {
            choices: senses
                .iter()
                .map(|s| {
                    s.map(|i| TokenChoice {
                        sense: NodeId(i),
                        centrality: 0.0,
                    })
                })
                .collect(),
        }
    }

    #[test]
    fn f1_examples() {
        let l = labels(2);
        let all = score_f1(&[assignment(&[Some(0); 10])], &[gold_instance(10)], &l).unwrap();
        assert_eq!((all.precision, all.recall, all.f1), (1.0, 1.0, 1.0));

        let mut half = vec![Some(0); 5];
        half.extend([Some(1); 5]);
        let r = score_f1(&[assignment(&half)], &[gold_instance(10)], &l).unwrap();
        assert_eq!(r.f1, 0.5);

        let mut partial = vec![Some(0); 6];
        partial.extend([Some(1); 2]);
        partial.extend([None; 2]);
        let r = score_f1(&[assignment(&partial)], &[gold_instance(10)], &l).unwrap();
        assert_eq!(r.precision, 0.75);
        assert_eq!(r.recall, 0.6);
        assert!((r.f1 - 2.0 * 0.45 / 1.35).abs() < 1e-12);

        let none = score_f1(&[assignment(&[Some(1); 3])], &[gold_instance(3)], &l).unwrap();
        assert_eq!(none.f1, 0.0);
        assert!(score_f1(&[], &[gold_instance(1)], &l).is_err());
    }

    #[test]
    fn instance_check() {
        let l = labels(3);
        let inv = inventory(&[("l0", &[0, 1])]);
        let mut inst = gold_instance(1);
        assert!(inst.check(&inv, &l).is_ok());
        inst.tokens[0].gold = Some("s2".into());
        assert!(inst.check(&inv, &l).is_err());
    }
}
