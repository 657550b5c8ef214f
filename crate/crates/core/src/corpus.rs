//! Seeded graph generators for tests, experiments and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};
use crate::oracle::exact_mcm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    Er { n: usize, p: f64, seed: u64 },
    Bipartite { left: usize, right: usize, p: f64, seed: u64 },
    Path { n: usize },
    Cycle { n: usize },
    /// Odd cycles glued in a chain at cut vertices, each with a pendant
    /// vertex hanging off its second vertex.
    BlossomGadget { petals: usize, seed: u64 },
    /// A perfect matching on `n` (even) vertices under random noise edges.
    Planted { n: usize, p: f64, seed: u64 },
}

impl GraphSpec {
    pub fn generate(&self) -> Graph {
        match *self {
            GraphSpec::Er { n, p, seed } => erdos_renyi(n, p, seed),
            GraphSpec::Bipartite { left, right, p, seed } => random_bipartite(left, right, p, seed),
            GraphSpec::Path { n } => path_graph(n),
            GraphSpec::Cycle { n } => cycle_graph(n),
            GraphSpec::BlossomGadget { petals, seed } => blossom_gadget(petals, seed),
            GraphSpec::Planted { n, p, seed } => planted(n, p, seed),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GraphSpec::Er { n, p, seed } => format!("er-n{n}-p{p}-s{seed}"),
            GraphSpec::Bipartite { left, right, p, seed } => format!("bip-{left}x{right}-p{p}-s{seed}"),
            GraphSpec::Path { n } => format!("path-{n}"),
            GraphSpec::Cycle { n } => format!("cycle-{n}"),
            GraphSpec::BlossomGadget { petals, seed } => format!("gadget-{petals}-s{seed}"),
            GraphSpec::Planted { n, p, seed } => format!("planted-n{n}-p{p}-s{seed}"),
        }
    }
}

pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    g
}

/// Left side `0..left`, right side `left..left + right`.
pub fn random_bipartite(left: usize, right: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(left + right);
    for u in 0..left {
        for v in left..left + right {
            if rng.random_bool(p) {
                g.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    g
}

pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("simple path")
}

pub fn cycle_graph(n: usize) -> Graph {
    let mut g = path_graph(n);
    if n >= 3 {
        g.add_edge(n - 1, 0).expect("closing edge");
    }
    g
}

pub fn blossom_gadget(petals: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut next = 1;
    let mut cut = 0;
    let mut hooks = Vec::new();
    for _ in 0..petals {
        let len = if rng.random_bool(0.5) { 3 } else { 5 };
        let cycle: Vec<Vertex> = std::iter::once(cut).chain(next..next + len - 1).collect();
        next += len - 1;
        for i in 0..len {
            edges.push((cycle[i], cycle[(i + 1) % len]));
        }
        hooks.push(cycle[1]);
        cut = cycle[len / 2 + 1];
    }
    // Pendants get the largest ids so that a sorted greedy scan meets them last.
    for h in hooks {
        edges.push((h, next));
        next += 1;
    }
    Graph::from_edges(next, &edges).expect("gadget edges are distinct")
}

pub fn planted(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut g = Graph::new(n);
    for pair in perm.chunks_exact(2) {
        g.add_edge(pair[0], pair[1]).expect("fresh pair");
    }
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) && rng.random_bool(p) {
                g.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    g
}

/// A generated graph with its maximum matching size.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: usize,
    pub spec: GraphSpec,
    pub graph: Graph,
    pub mu: usize,
}

impl CorpusEntry {
    pub fn new(id: usize, spec: GraphSpec) -> Self {
        let graph = spec.generate();
        let mu = exact_mcm(&graph).len();
        CorpusEntry { id, spec, graph, mu }
    }
}

/// Mixed corpus of `count` graphs with at most `max_n` vertices, all
/// derived from `seed`.
pub fn mixed_specs(count: usize, max_n: usize, seed: u64) -> Vec<GraphSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_n = max_n.max(4);
    (0..count)
        .map(|i| {
            let s = rng.random::<u64>();
            let n = rng.random_range(4..=max_n);
            match i % 6 {
                0 => GraphSpec::Er {
                    n,
                    p: rng.random_range(0.03..0.3),
                    seed: s,
                },
                1 => {
                    let left = rng.random_range(2..=n / 2);
                    GraphSpec::Bipartite {
                        left,
                        right: n - left,
                        p: rng.random_range(0.05..0.4),
                        seed: s,
                    }
                }
                2 => {
                    if rng.random_bool(0.5) {
                        GraphSpec::Path { n }
                    } else {
                        GraphSpec::Cycle { n }
                    }
                }
                3 => GraphSpec::BlossomGadget {
                    petals: rng.random_range(1..=(max_n / 5).max(1)),
                    seed: s,
                },
                4 => GraphSpec::Planted {
                    n: n & !1,
                    p: rng.random_range(0.0..0.1),
                    seed: s,
                },
                _ => GraphSpec::Er {
                    n,
                    p: rng.random_range(1.0..3.0) / n as f64,
                    seed: s,
                },
            }
        })
        .collect()
}

pub fn build_corpus(specs: &[GraphSpec]) -> Vec<CorpusEntry> {
    specs.iter().enumerate().map(|(i, s)| CorpusEntry::new(i, s.clone())).collect()
}
