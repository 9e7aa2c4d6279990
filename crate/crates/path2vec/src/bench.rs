//! Wall-clock comparison of one-vs-all similarity on the graph and on
//! embeddings.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use path2vec_core::{EmbeddingMatrix, Graph, GraphMetric, MetricKind, NodeId, NodeSimilarity};

use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Side {
    /// Raw timings, warm-up excluded.
    pub nanos: Vec<u128>,
    pub median: u128,
    /// Number of targets evaluated in the last repetition.
    pub targets: usize,
    /// Sum of computed values in the last repetition.
    pub checksum: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub metric: MetricKind,
    pub source: NodeId,
    pub graph: Side,
    pub vector: Side,
}

impl BenchReport {
    /// Graph median over vector median.
    pub fn ratio(&self) -> f64 {
        self.graph.median as f64 / (self.vector.median.max(1)) as f64
    }

    /// `side<TAB>repetition<TAB>nanos` rows followed by a `#` summary line.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "side\trepetition\tnanos")?;
        for (name, side) in [("graph", &self.graph), ("vector", &self.vector)] {
            for (i, n) in side.nanos.iter().enumerate() {
                writeln!(w, "{name}\t{}\t{n}", i + 1)?;
            }
        }
        writeln!(w, "# {}", self.summary())?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: graph median {:.3} ms over {} targets, vector median {:.3} ms over {} targets, ratio {:.1}x",
            self.metric.name(),
            self.graph.median as f64 / 1e6,
            self.graph.targets,
            self.vector.median as f64 / 1e6,
            self.vector.targets,
            self.ratio()
        )
    }
}

fn median(xs: &[u128]) -> u128 {
    let mut v = xs.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2
    }
}

/// Runs `f` once as warm-up and then `reps` timed times.
fn time_side(reps: usize, mut f: impl FnMut() -> Result<(usize, f64)>) -> Result<Side> {
    black_box(f()?);
    let mut nanos = Vec::with_capacity(reps);
    let mut last = (0, 0.0);
    for _ in 0..reps {
        let t = Instant::now();
        last = black_box(f()?);
        nanos.push(t.elapsed().as_nanos());
    }
    Ok(Side {
        median: median(&nanos),
        nanos,
        targets: last.0,
        checksum: last.1,
    })
}

/// Times the graph metric evaluated pair by pair from `source` to every
/// node against one row of dot products, both on the calling thread.
pub fn benchmark_one_vs_all(
    g: &Graph,
    e: &EmbeddingMatrix,
    kind: MetricKind,
    source: NodeId,
    reps: usize,
) -> Result<BenchReport> {
    if reps == 0 {
        return Err(crate::Error::Invalid(
            "repetitions must be at least 1".into(),
        ));
    }
    if e.labels() != g.labels() {
        return Err(path2vec_core::Error::LabelMismatch.into());
    }
    g.check_node(source)?;
    let metric = GraphMetric::new(g, kind)?;
    let graph = time_side(reps, || {
        let mut sum = 0.0;
        let mut count = 0;
        for v in g.nodes() {
            sum += metric.similarity(black_box(source), v)?;
            count += 1;
        }
        Ok((count, sum))
    })?;
    let vector = time_side(reps, || {
        let row = e.similarity_row(black_box(source));
        Ok((row.len(), row.iter().sum()))
    })?;
    Ok(BenchReport {
        metric: kind,
        source,
        graph,
        vector,
    })
}
