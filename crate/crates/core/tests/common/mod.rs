#![allow(dead_code)]

use std::collections::VecDeque;

use path2vec_core::{Graph, GraphBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected graph: a random recursive tree plus `extra` chords.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> (Graph, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    (from_edges(n, &edges, Some(0)), edges)
}

/// Graph over labels `n0..n{n-1}` added in id order.
pub fn from_edges(n: usize, edges: &[(usize, usize)], root: Option<usize>) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(&format!("n{i}")).unwrap();
    }
    for &(x, y) in edges {
        b.add_edge(&format!("n{x}"), &format!("n{y}"), None)
            .unwrap();
    }
    if let Some(r) = root {
        b.set_root(&format!("n{r}"));
    }
    b.build().unwrap()
}

/// Reference BFS over a raw edge list.
pub fn oracle_bfs(n: usize, edges: &[(usize, usize)], s: usize) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[s] = 0.0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_infinite() {
                dist[v] = dist[u] + 1.0;
                q.push_back(v);
            }
        }
    }
    dist
}
