#![allow(dead_code)]

use std::fmt::Write as _;

use path2vec::core::{Graph, GraphBuilder, NodeId, SenseInventory, WsdInstance, WsdToken};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MINI_WORDNET: &str =
    "#root\tcontainer\ncup\tcontainer\nvessel\tcontainer\ndrinking_vessel\tvessel\nmug\tdrinking_vessel\n";

/// Edge list of a random recursive tree on `n` nodes rooted at `n0`.
pub fn tree_edge_list(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("#root\tn0\n");
    for i in 1..n {
        let j = rng.gen_range(0..i);
        writeln!(s, "n{j}\tn{i}").unwrap();
    }
    s
}

/// Random recursive tree with labels `n0..`, root `n0`.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    path2vec::io::read_graph(tree_edge_list(n, seed).as_bytes()).unwrap()
}

/// Random connected graph: random recursive tree plus `extra` chords.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> (Graph, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(&format!("n{i}")).unwrap();
    }
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((j, i));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let c = rng.gen_range(0..n);
        if a != c && !edges.contains(&(a, c)) && !edges.contains(&(c, a)) {
            edges.push((a, c));
        }
    }
    for &(a, c) in &edges {
        b.add_edge(&format!("n{a}"), &format!("n{c}"), None)
            .unwrap();
    }
    b.set_root("n0");
    (b.build().unwrap(), edges)
}

/// Hop distances by breadth-first search over an adjacency matrix.
pub fn oracle_bfs(n: usize, edges: &[(usize, usize)], s: usize) -> Vec<f64> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[s] = 0.0;
    let mut frontier = vec![s];
    let mut d = 0.0;
    while !frontier.is_empty() {
        d += 1.0;
        let mut next = Vec::new();
        for &u in &frontier {
            for v in 0..n {
                if adj[u][v] && dist[v].is_infinite() {
                    dist[v] = d;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Floyd-Warshall over weighted undirected edges.
pub fn oracle_floyd(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in edges {
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Synthetic sense lexicon over a weighted four-domain taxonomy.
pub struct Lexicon {
    pub edge_list: String,
    pub inventory: String,
    pub instances: String,
    pub graph: Graph,
    /// Inverted weighted shortest-path similarity, by node id.
    pub sim: Vec<Vec<f64>>,
}

impl Lexicon {
    pub fn inventory(&self) -> SenseInventory {
        path2vec::io::read_inventory(self.inventory.as_bytes(), self.graph.labels()).unwrap()
    }

    pub fn instances(&self) -> Vec<WsdInstance> {
        path2vec::io::read_instances(self.instances.as_bytes()).unwrap()
    }

    /// Centrality of every candidate, enumerated pair by pair; winner per
    /// token with ties to the smaller id.
    pub fn oracle_choice(&self, inv: &SenseInventory, inst: &WsdInstance) -> Vec<Option<NodeId>> {
        let cands: Vec<&[NodeId]> = inst
            .tokens
            .iter()
            .map(|t| inv.senses(&t.lemma).unwrap_or(&[]))
            .collect();
        let mut out = Vec::new();
        for (t, own) in cands.iter().enumerate() {
            let mut best: Option<(f64, NodeId)> = None;
            for &c in own.iter() {
                let mut score = 0.0;
                for (t2, other) in cands.iter().enumerate() {
                    if t2 == t {
                        continue;
                    }
                    for &o in other.iter() {
                        score += self.sim[c.index()][o.index()].max(0.0);
                    }
                }
                let better = match best {
                    None => true,
                    Some((b, id)) => score > b || (score == b && c < id),
                };
                if better {
                    best = Some((score, c));
                }
            }
            out.push(best.map(|(_, id)| id));
        }
        out
    }
}

/// Builds the lexicon: root, 4 domains, 3 categories each, 6 leaves per
/// category. Edge weights are random, in [3, 4) below the root, [1, 2)
/// below a domain and [0.5, 1) below a category. 20 words have senses in
/// two domains and 12 have one; no two words share a sense. Each instance
/// draws 5 words from one domain and its gold senses come from exhaustive
/// centrality enumeration.
pub fn lexicon(seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edge_list = String::from("#root\tentity\n");
    let mut leaves: Vec<Vec<String>> = vec![Vec::new(); 4];
    for a in 0..4 {
        writeln!(edge_list, "entity\td{a}\t{}", rng.gen_range(3.0..4.0)).unwrap();
        for b in 0..3 {
            writeln!(edge_list, "d{a}\td{a}.c{b}\t{}", rng.gen_range(1.0..2.0)).unwrap();
            for c in 0..6 {
                let leaf = format!("d{a}.c{b}.l{c}");
                writeln!(edge_list, "d{a}.c{b}\t{leaf}\t{}", rng.gen_range(0.5..1.0)).unwrap();
                leaves[a].push(leaf);
            }
        }
    }
    let graph = path2vec::io::read_graph(edge_list.as_bytes()).unwrap();
    let n = graph.node_count();
    let mut wedges = Vec::new();
    for u in graph.nodes() {
        let ws = graph.neighbor_weights(u).unwrap();
        for (&v, &w) in graph.neighbors(u).iter().zip(ws) {
            wedges.push((u.index(), v.index(), w));
        }
    }
    let dist = oracle_floyd(n, &wedges);
    let sim: Vec<Vec<f64>> = dist
        .iter()
        .map(|row| {
            row.iter()
                .map(|&d| if d == 0.0 { 1.0 } else { 1.0 / d })
                .collect()
        })
        .collect();

    // every leaf is the sense of at most one word
    for l in &mut leaves {
        l.shuffle(&mut rng);
    }
    let mut words: Vec<Vec<String>> = Vec::new();
    for i in 0..32 {
        let senses = if i < 20 { 2 } else { 1 };
        let mut doms: Vec<usize> = (0..4).filter(|&d| !leaves[d].is_empty()).collect();
        doms.shuffle(&mut rng);
        words.push(
            doms[..senses]
                .iter()
                .map(|&d| leaves[d].pop().unwrap())
                .collect(),
        );
    }
    let mut inventory = String::new();
    for (i, senses) in words.iter().enumerate() {
        writeln!(inventory, "w{i}\t{}", senses.join(",")).unwrap();
    }
    let domain_of = |label: &str| label[1..2].parse::<usize>().unwrap();
    let mut by_domain: Vec<Vec<usize>> = vec![Vec::new(); 4];
    for (i, senses) in words.iter().enumerate() {
        for s in senses {
            by_domain[domain_of(s)].push(i);
        }
    }

    let mut lex = Lexicon {
        edge_list,
        inventory,
        instances: String::new(),
        graph,
        sim,
    };
    let inv = lex.inventory();
    let mut instances = String::new();
    for _ in 0..40 {
        let d = rng.gen_range(0..4);
        let mut pool = by_domain[d].clone();
        pool.dedup();
        pool.shuffle(&mut rng);
        let tokens: Vec<WsdToken> = pool[..5.min(pool.len())]
            .iter()
            .map(|&w| WsdToken {
                lemma: format!("w{w}"),
                gold: None,
            })
            .collect();
        let inst = WsdInstance {
            id: String::new(),
            tokens,
        };
        let gold = lex.oracle_choice(&inv, &inst);
        for (t, g) in inst.tokens.iter().zip(gold) {
            let g = lex.graph.label(g.unwrap());
            writeln!(instances, "{}\t{g}", t.lemma).unwrap();
        }
        instances.push('\n');
    }
    lex.instances = instances;
    lex
}
