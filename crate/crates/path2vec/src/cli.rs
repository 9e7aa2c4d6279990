//! Command-line surface. Exit codes: 0 success, 1 data or runtime error,
//! 2 usage error.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use path2vec_core::{
    disambiguate, evaluate_fit, evaluate_human, nearest_neighbors, score_f1,
    stratified_path_sample, EmbeddingMatrix, GraphMetric, LabelTable, MetricKind, SamplingLimits,
    SenseAssignment, SenseInventory, SenseSimilarity, TrainingConfig, WsdInstance,
};

use crate::error::{Error, Result};
use crate::manifest::RunManifest;
use crate::{bench, io as files, parallel};

#[derive(Parser, Debug)]
#[command(
    name = "path2vec",
    version,
    about = "Graph similarity metrics and node embeddings that approximate them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a pruned pairwise-similarity dataset from a graph.
    Metrics(MetricsArgs),
    /// Train embeddings on a similarity dataset.
    Train(TrainArgs),
    /// Spearman correlation against a gold dataset or human judgments.
    Eval(EvalArgs),
    /// Time one-vs-all similarity on the graph and on embeddings.
    Bench(BenchArgs),
    /// Graph-based word sense disambiguation.
    Wsd(WsdArgs),
    /// Sample node pairs with an equal count per path length.
    Sample(SampleArgs),
    /// Nearest neighbors of a node by dot product.
    Neighbors(NeighborsArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum MetricArg {
    Shp,
    Lch,
    Wup,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Shp => MetricKind::Shp,
            MetricArg::Lch => MetricKind::Lch,
            MetricArg::Wup => MetricKind::Wup,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Backend {
    Graph,
    Embeddings,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "shp")]
    pub metric: MetricArg,
    /// Most similar partners kept per node.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 300)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub negatives: usize,
    #[arg(long, default_value_t = 100)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    /// Maximum number of epochs.
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    /// Share of records held out for early stopping; 0 disables it.
    #[arg(long, default_value_t = 0.05)]
    pub validation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// More than 1 computes gradients in parallel; results then differ
    /// from single-threaded runs.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("gold").required(true).args(["dataset", "judgments"])))]
pub struct EvalArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Gold similarity dataset.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Human judgments; needs --inventory.
    #[arg(long, requires = "inventory")]
    pub judgments: Option<PathBuf>,
    #[arg(long)]
    pub inventory: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, value_enum, default_value = "lch")]
    pub metric: MetricArg,
    /// Source node label; defaults to the root, else the first node.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WsdArgs {
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub inventory: PathBuf,
    #[arg(long, value_enum)]
    pub backend: Backend,
    /// Graph for the graph backend.
    #[arg(long, required_if_eq("backend", "graph"))]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "shp")]
    pub metric: MetricArg,
    /// Embeddings for the embeddings backend.
    #[arg(long, required_if_eq("backend", "embeddings"))]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Path lengths 1..=L are sampled.
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(1..))]
    pub lengths: u32,
    #[arg(long, default_value_t = 150, value_parser = clap::value_parser!(u64).range(1..))]
    pub per_length: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset whose pairs must not be sampled.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct NeighborsArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub node: String,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
}

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cmd: Command) -> Result<()> {
    let start = Instant::now();
    match cmd {
        Command::Metrics(a) => metrics(a, start),
        Command::Train(a) => train(a, start),
        Command::Eval(a) => eval(a, start),
        Command::Bench(a) => bench_cmd(a, start),
        Command::Wsd(a) => wsd(a, start),
        Command::Sample(a) => sample(a, start),
        Command::Neighbors(a) => neighbors(a, start),
    }
}

fn emit_stdout(m: &mut RunManifest, start: Instant) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", m.finish(start.elapsed()).to_json())?;
    Ok(())
}

fn emit_stderr(m: &mut RunManifest, start: Instant) {
    eprintln!("{}", m.finish(start.elapsed()).to_json());
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = files::create(p)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn metrics(a: MetricsArgs, start: Instant) -> Result<()> {
    let g = files::load_graph(&a.graph)?;
    let kind = MetricKind::from(a.metric);
    let metric = GraphMetric::new(&g, kind)?;
    let pool = parallel::pool(a.threads as usize)?;
    let d = parallel::build_dataset(&pool, &g, &metric, a.k as usize)?;
    files::write_dataset(&d, files::create(&a.out)?)?;
    eprintln!(
        "{} pairs from {} nodes in {:.3} s",
        d.len(),
        g.node_count(),
        start.elapsed().as_secs_f64()
    );
    let mut m = RunManifest::new("metrics");
    m.input("graph", &a.graph)?
        .set("config.metric", kind.name())
        .set("config.k", a.k)
        .set("config.threads", a.threads)
        .set("output", a.out.display().to_string())
        .set("pairs", d.len());
    emit_stdout(&mut m, start)
}

fn train(a: TrainArgs, start: Instant) -> Result<()> {
    let g = files::load_graph(&a.graph)?;
    let d = files::load_dataset(&a.dataset, g.labels())?;
    let cfg = TrainingConfig {
        dim: a.dim,
        alpha: a.alpha,
        negatives: a.negatives,
        batch_size: a.batch_size,
        learning_rate: a.lr,
        max_epochs: a.epochs,
        patience: a.patience,
        validation_fraction: a.validation,
        seed: a.seed,
    };
    let mut progress = |s: &path2vec_core::EpochStats| {
        let val = s
            .validation_mse
            .map_or("-".to_string(), |v| format!("{v:.6e}"));
        eprintln!(
            "epoch {}\tloss {:.6e}\tvalidation_mse {val}",
            s.epoch, s.train_loss
        );
    };
    let run = if a.threads > 1 {
        let pool = parallel::pool(a.threads as usize)?;
        parallel::train(&pool, &g, &d, &cfg, &mut progress)?
    } else {
        path2vec_core::train_with(&g, &d, &cfg, &mut progress, &path2vec_core::batch_gradient)?
    };
    files::write_embeddings(&run.embeddings, files::create(&a.out)?)?;
    let mut m = RunManifest::new("train");
    m.input("graph", &a.graph)?
        .input("dataset", &a.dataset)?
        .set("seed", a.seed)
        .set("config.dim", cfg.dim)
        .set("config.alpha", cfg.alpha)
        .set("config.negatives", cfg.negatives)
        .set("config.batch_size", cfg.batch_size)
        .set("config.lr", cfg.learning_rate)
        .set("config.epochs", cfg.max_epochs)
        .set("config.patience", cfg.patience)
        .set("config.validation", cfg.validation_fraction)
        .set("config.threads", a.threads)
        .set("epochs_run", run.history.len())
        .set("best_epoch", run.best_epoch)
        .set("output", a.out.display().to_string());
    emit_stdout(&mut m, start)
}

fn eval(a: EvalArgs, start: Instant) -> Result<()> {
    let e = files::load_embeddings(&a.embeddings)?;
    let mut m = RunManifest::new("eval");
    m.input("embeddings", &a.embeddings)?;
    let rho = if let Some(path) = &a.dataset {
        let d = files::load_dataset(path, e.labels())?;
        let gold: Vec<_> = d.records().iter().map(|r| (r.u, r.v, r.s)).collect();
        m.input("dataset", path)?.set("pairs", gold.len());
        evaluate_fit(&e, &gold)?
    } else {
        let (Some(jp), Some(ip)) = (&a.judgments, &a.inventory) else {
            return Err(Error::Invalid("--judgments needs --inventory".into()));
        };
        let judgments = files::read_judgments(files::open(jp)?)?;
        let inv = files::read_inventory(files::open(ip)?, e.labels())?;
        let r = evaluate_human(&e, &judgments, &inv)?;
        m.input("judgments", jp)?
            .input("inventory", ip)?
            .set("pairs", r.used)
            .set("skipped", r.skipped);
        if r.skipped > 0 {
            eprintln!("skipped {} pairs with unknown lemmas", r.skipped);
        }
        r.rho
    };
    println!("{rho:.6}");
    m.set("rho", rho);
    emit_stderr(&mut m, start);
    Ok(())
}

fn bench_cmd(a: BenchArgs, start: Instant) -> Result<()> {
    let g = files::load_graph(&a.graph)?;
    let e = files::align_embeddings(&files::load_embeddings(&a.embeddings)?, g.labels())?;
    let source = match &a.source {
        Some(label) => g.node(label)?,
        None => g.root().unwrap_or(path2vec_core::NodeId(0)),
    };
    let kind = MetricKind::from(a.metric);
    let report = bench::benchmark_one_vs_all(&g, &e, kind, source, a.reps as usize)?;
    write_to(a.out.as_deref(), |w| report.write_tsv(w))?;
    eprintln!("{}", report.summary());
    let mut m = RunManifest::new("bench");
    m.input("graph", &a.graph)?
        .input("embeddings", &a.embeddings)?
        .set("config.metric", kind.name())
        .set("config.source", g.label(source))
        .set("config.reps", a.reps)
        .set("graph_median_nanos", report.graph.median as u64)
        .set("vector_median_nanos", report.vector.median as u64)
        .set("ratio", report.ratio());
    emit_stderr(&mut m, start);
    Ok(())
}

/// Disambiguates every instance; instances without any known lemma get no
/// assignment.
pub fn disambiguate_all<S: SenseSimilarity + ?Sized>(
    instances: &[WsdInstance],
    inv: &SenseInventory,
    sim: &S,
) -> Result<Vec<SenseAssignment>> {
    instances
        .iter()
        .map(|inst| {
            inst.check(inv, sim.labels())?;
            match disambiguate(inst, inv, sim) {
                Err(path2vec_core::Error::NoCandidates) => Ok(SenseAssignment {
                    choices: vec![None; inst.tokens.len()],
                }),
                r => Ok(r?),
            }
        })
        .collect()
}

fn write_assignments(
    w: &mut dyn Write,
    instances: &[WsdInstance],
    assignments: &[SenseAssignment],
    labels: &LabelTable,
) -> Result<()> {
    writeln!(w, "instance_id\ttoken_index\tchosen_label\tcentrality")?;
    for (inst, a) in instances.iter().zip(assignments) {
        for (i, c) in a.choices.iter().enumerate() {
            match c {
                Some(c) => writeln!(
                    w,
                    "{}\t{i}\t{}\t{}",
                    inst.id,
                    labels.label(c.sense),
                    c.centrality
                )?,
                None => writeln!(w, "{}\t{i}\t-\t-", inst.id)?,
            }
        }
    }
    Ok(())
}

fn wsd(a: WsdArgs, start: Instant) -> Result<()> {
    let instances = files::read_instances(files::open(&a.instances)?)?;
    let mut m = RunManifest::new("wsd");
    m.input("instances", &a.instances)?
        .input("inventory", &a.inventory)?;
    let graph;
    let emb;
    let metric;
    let sim: &dyn SenseSimilarity = match a.backend {
        Backend::Graph => {
            let path = a
                .graph
                .as_deref()
                .ok_or_else(|| Error::Invalid("--graph is required".into()))?;
            graph = files::load_graph(path)?;
            metric = GraphMetric::new(&graph, a.metric.into())?;
            m.input("graph", path)?
                .set("config.backend", MetricKind::from(a.metric).name());
            &metric
        }
        Backend::Embeddings => {
            let path = a
                .embeddings
                .as_deref()
                .ok_or_else(|| Error::Invalid("--embeddings is required".into()))?;
            emb = files::load_embeddings(path)?;
            m.input("embeddings", path)?
                .set("config.backend", "embeddings");
            &emb as &EmbeddingMatrix
        }
    };
    let labels = sim.labels();
    let inv = files::read_inventory(files::open(&a.inventory)?, labels)?;
    let assignments = disambiguate_all(&instances, &inv, sim)?;
    let f1 = score_f1(&assignments, &instances, labels)?;
    let summary = format!(
        "precision {:.4} recall {:.4} f1 {:.4} ({} correct, {} attempted, {} gold)",
        f1.precision, f1.recall, f1.f1, f1.correct, f1.attempted, f1.gold
    );
    write_to(a.out.as_deref(), |w| {
        write_assignments(w, &instances, &assignments, labels)?;
        writeln!(w, "# {summary}")?;
        Ok(())
    })?;
    eprintln!("{summary}");
    m.set("precision", f1.precision)
        .set("recall", f1.recall)
        .set("f1", f1.f1);
    emit_stderr(&mut m, start);
    Ok(())
}

fn sample(a: SampleArgs, start: Instant) -> Result<()> {
    let g = files::load_graph(&a.graph)?;
    let exclude = a
        .exclude
        .as_deref()
        .map(|p| files::load_dataset(p, g.labels()))
        .transpose()?;
    let samples = stratified_path_sample(
        &g,
        a.lengths,
        a.per_length as usize,
        a.seed,
        exclude.as_ref(),
        SamplingLimits::default(),
    )?;
    files::write_samples(&samples, g.labels(), files::create(&a.out)?)?;
    let mut m = RunManifest::new("sample");
    m.input("graph", &a.graph)?;
    if let Some(p) = &a.exclude {
        m.input("exclude", p)?;
    }
    m.set("seed", a.seed)
        .set("config.lengths", a.lengths)
        .set("config.per_length", a.per_length)
        .set("pairs", samples.len())
        .set("output", a.out.display().to_string());
    emit_stdout(&mut m, start)
}

fn neighbors(a: NeighborsArgs, start: Instant) -> Result<()> {
    let e = files::load_embeddings(&a.embeddings)?;
    let u = e.labels().resolve(&a.node)?;
    let mut out = io::stdout().lock();
    for (v, s) in nearest_neighbors(&e, u, a.k as usize)? {
        writeln!(out, "{}\t{s}", e.labels().label(v))?;
    }
    drop(out);
    let mut m = RunManifest::new("neighbors");
    m.input("embeddings", &a.embeddings)?
        .set("config.node", a.node.as_str())
        .set("config.k", a.k);
    emit_stderr(&mut m, start);
    Ok(())
}
