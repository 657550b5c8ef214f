//! Chunked update streams with a bounded number of weak-oracle queries after
//! each chunk, every answer checked against the oracle contract.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamic::{static_from_weak, DynParams, Profile};
use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::graph::{edge_key, induced_subgraph, AdjacencyView, Graph, Vertex};
use crate::oracle::{exact_mcm, WeakOracle};
use crate::params::Epsilon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Update {
    Insert(Vertex, Vertex),
    Delete(Vertex, Vertex),
    Empty,
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Insert(u, v) => write!(f, "+ {u} {v}"),
            Update::Delete(u, v) => write!(f, "- {u} {v}"),
            Update::Empty => write!(f, "."),
        }
    }
}

/// Parses one record per line: `+ u v`, `- u v` or `.`. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_stream(text: &str) -> Result<Vec<Update>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| Error::InvalidUpdate {
            record: i + 1,
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let upd = match parts.as_slice() {
            ["."] => Update::Empty,
            [op @ ("+" | "-"), u, v] => {
                let u: Vertex = u.parse().map_err(|_| bad("vertex is not a non-negative integer"))?;
                let v: Vertex = v.parse().map_err(|_| bad("vertex is not a non-negative integer"))?;
                if *op == "+" { Update::Insert(u, v) } else { Update::Delete(u, v) }
            }
            _ => return Err(bad("expected `+ u v`, `- u v` or `.`")),
        };
        out.push(upd);
    }
    Ok(out)
}

pub fn format_stream(updates: &[Update]) -> String {
    updates.iter().map(|u| format!("{u}\n")).collect()
}

pub fn chunk_size(n: usize, alpha: f64) -> usize {
    ((alpha * n as f64).ceil() as usize).max(1)
}

/// Splits a stream into chunks of exactly `size`, padding the last one with
/// empty updates.
pub fn into_chunks(updates: &[Update], size: usize) -> Vec<Vec<Update>> {
    updates
        .chunks(size)
        .map(|c| {
            let mut c = c.to_vec();
            c.resize(size, Update::Empty);
            c
        })
        .collect()
}

/// Applies one chunk, which must hold exactly `expected` updates.
/// `record_base` numbers the updates for error messages.
pub fn apply_chunk(g: &mut Graph, chunk: &[Update], expected: usize, record_base: usize) -> Result<()> {
    if chunk.len() != expected {
        return Err(Error::ChunkSize {
            expected,
            got: chunk.len(),
        });
    }
    for (i, upd) in chunk.iter().enumerate() {
        let r = match *upd {
            Update::Insert(u, v) => g.add_edge(u, v),
            Update::Delete(u, v) => g.remove_edge(u, v),
            Update::Empty => Ok(()),
        };
        r.map_err(|e| Error::InvalidUpdate {
            record: record_base + i + 1,
            reason: e.to_string(),
        })?;
    }
    Ok(())
}

/// Random valid stream on `n` vertices starting from the empty graph.
/// About a tenth of the records are empty updates.
pub fn random_stream(n: usize, len: usize, seed: u64) -> Vec<Update> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if n < 2 || rng.random_bool(0.1) {
            out.push(Update::Empty);
            continue;
        }
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let (u, v) = edge_key(u, v);
        if g.has_edge(u, v) {
            if rng.random_bool(0.3) {
                g.remove_edge(u, v).expect("present");
                out.push(Update::Delete(u, v));
            }
        } else {
            g.add_edge(u, v).expect("absent");
            out.push(Update::Insert(u, v));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// Answered `None` although `μ(H[S]) ≥ δ·|V(H)|`.
    MissedMatching { query: u64, mu: usize, threshold: f64 },
    /// Returned edges do not form a matching of `H[S]`.
    InvalidAnswer { query: u64, detail: String },
    /// Returned fewer than `λδ·|V(H)|` edges.
    SmallAnswer { query: u64, size: usize, threshold: f64 },
}

/// Wraps a weak oracle, checks every answer against the contract using an
/// exact matching of the queried induced subgraph, and refuses queries past
/// the per-chunk limit.
pub struct ValidatingWeak<W> {
    inner: W,
    pub limit: Option<u64>,
    pub served: u64,
    pub dropped: u64,
    pub violations: Vec<Violation>,
}

impl<W: WeakOracle> ValidatingWeak<W> {
    pub fn new(inner: W, limit: Option<u64>) -> Self {
        ValidatingWeak {
            inner,
            limit,
            served: 0,
            dropped: 0,
            violations: Vec::new(),
        }
    }

    pub fn reset(&mut self) {
        self.served = 0;
        self.dropped = 0;
        self.violations.clear();
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

fn check_answer(host: &dyn AdjacencyView, subset: &[Vertex], edges: &[(Vertex, Vertex)]) -> Option<String> {
    let mut in_s = vec![false; host.vertex_count()];
    for &v in subset {
        in_s[v] = true;
    }
    let mut used = vec![false; host.vertex_count()];
    for &(u, v) in edges {
        if u >= in_s.len() || v >= in_s.len() || !in_s[u] || !in_s[v] {
            return Some(format!("edge ({u}, {v}) leaves the queried subset"));
        }
        if !host.is_adjacent(u, v) {
            return Some(format!("({u}, {v}) is not an edge"));
        }
        if used[u] || used[v] || u == v {
            return Some(format!("edge ({u}, {v}) shares an endpoint"));
        }
        used[u] = true;
        used[v] = true;
    }
    None
}

impl<W: WeakOracle> WeakOracle for ValidatingWeak<W> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn lambda(&self) -> f64 {
        self.inner.lambda()
    }

    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        if self.limit.is_some_and(|q| self.served >= q) {
            self.dropped += 1;
            return None;
        }
        self.served += 1;
        let query = self.served;
        let host_n = host.vertex_count() as f64;
        let answer = self.inner.query(host, subset, delta);
        match &answer {
            None => {
                let (h, _) = induced_subgraph(host, subset);
                let mu = exact_mcm(&h).len();
                let threshold = delta * host_n;
                if mu > 0 && mu as f64 >= threshold {
                    self.violations.push(Violation::MissedMatching { query, mu, threshold });
                }
            }
            Some(edges) => {
                if let Some(detail) = check_answer(host, subset, edges) {
                    self.violations.push(Violation::InvalidAnswer { query, detail });
                }
                let threshold = self.inner.lambda() * delta * host_n;
                if (edges.len() as f64) < threshold || edges.is_empty() {
                    self.violations.push(Violation::SmallAnswer {
                        query,
                        size: edges.len(),
                        threshold,
                    });
                }
            }
        }
        answer
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessParams {
    pub epsilon: f64,
    /// Chunk fraction; the chunk size is `⌈α·n⌉`.
    pub alpha: f64,
    /// Queries served per chunk; `None` means the weak-call budget.
    pub q: Option<u64>,
    pub profile: Profile,
    pub seed: u64,
    /// Record wall time per chunk. Off for byte-identical replays.
    pub timing: bool,
}

impl HarnessParams {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        HarnessParams {
            epsilon,
            alpha: epsilon * epsilon,
            q: None,
            profile: Profile::Desk,
            seed,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChunkReport {
    pub chunk_index: usize,
    /// Edges after the chunk.
    pub graph_size: usize,
    pub updates: usize,
    pub empty_updates: usize,
    pub queries: u64,
    pub violations: Vec<Violation>,
    pub dropped: u64,
    pub weak_calls: u64,
    pub matching_size: usize,
    pub mu: usize,
    pub precondition_warning: bool,
    pub wall_time: Option<f64>,
}

/// Runs the stream on an initially empty graph with `n` vertices,
/// recomputing a matching from the weak oracle after every chunk.
pub fn run_harness<W: WeakOracle>(
    n: usize,
    updates: &[Update],
    weak: W,
    params: &HarnessParams,
    cfg: &EngineConfig,
) -> Result<Vec<ChunkReport>> {
    let size = chunk_size(n, params.alpha);
    run_chunked(n, &into_chunks(updates, size), size, weak, params, cfg)
}

/// Like [`run_harness`] but with caller-made chunks, each of which must
/// have exactly `size` updates.
pub fn run_chunked<W: WeakOracle>(
    n: usize,
    chunks: &[Vec<Update>],
    size: usize,
    weak: W,
    params: &HarnessParams,
    cfg: &EngineConfig,
) -> Result<Vec<ChunkReport>> {
    let lambda = weak.lambda();
    let dyn_params = DynParams::for_profile(params.profile, params.epsilon, lambda);
    let budget = dyn_params.weak_call_budget(Epsilon::new(params.epsilon)?, lambda, &cfg.constants);
    let limit = Some(params.q.unwrap_or(budget.min(u64::MAX as f64) as u64));
    let mut validator = ValidatingWeak::new(weak, limit);
    let mut g = Graph::new(n);
    let mut reports = Vec::with_capacity(chunks.len());
    for (i, chunk) in chunks.iter().enumerate() {
        let start = Instant::now();
        apply_chunk(&mut g, chunk, size, i * size)?;
        validator.reset();
        let seed = params.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let out = static_from_weak(&g, params.epsilon, &mut validator, &dyn_params, cfg, seed)?;
        let elapsed = start.elapsed().as_secs_f64();
        reports.push(ChunkReport {
            chunk_index: i,
            graph_size: g.edge_count(),
            updates: chunk.len(),
            empty_updates: chunk.iter().filter(|u| **u == Update::Empty).count(),
            queries: validator.served,
            violations: validator.violations.clone(),
            dropped: validator.dropped,
            weak_calls: out.weak.calls,
            matching_size: out.matching.len(),
            mu: exact_mcm(&g).len(),
            precondition_warning: out.precondition_warning,
            wall_time: params.timing.then_some(elapsed),
        });
    }
    Ok(reports)
}
