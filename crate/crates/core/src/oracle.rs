//! Matching oracles, induced-subgraph weak oracles and call accounting.

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, AdjacencyView, Graph, Vertex};

/// A procedure returning a `c`-approximate maximum matching of the graph it
/// is handed.
pub trait MatchingOracle {
    fn name(&self) -> String;
    /// The declared approximation constant `c`.
    fn approx_factor(&self) -> f64;
    /// Same input, same output.
    fn is_deterministic(&self) -> bool {
        true
    }
    fn find_matching(&mut self, h: &Graph) -> Vec<(Vertex, Vertex)>;
    /// Notifies the oracle of one local processing step over components of
    /// at most `component` vertices. Only counting wrappers care.
    fn record_processing_step(&mut self, _component: usize) {}
    fn stats(&self) -> Option<&OracleStats> {
        None
    }
}

impl<O: MatchingOracle + ?Sized> MatchingOracle for Box<O> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn approx_factor(&self) -> f64 {
        (**self).approx_factor()
    }
    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
    fn find_matching(&mut self, h: &Graph) -> Vec<(Vertex, Vertex)> {
        (**self).find_matching(h)
    }
    fn record_processing_step(&mut self, component: usize) {
        (**self).record_processing_step(component)
    }
    fn stats(&self) -> Option<&OracleStats> {
        (**self).stats()
    }
}

fn live_edges(g: &Graph) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
    g.edges().filter(|&(u, v)| !g.is_removed(u) && !g.is_removed(v))
}

/// A maximum matching, computed with Edmonds' blossom algorithm. Edges touching
/// removed vertices are ignored. Output is sorted.
pub fn exact_mcm(g: &Graph) -> Vec<(Vertex, Vertex)> {
    let mut pg = UnGraph::<(), ()>::with_capacity(g.vertex_count(), g.edge_count());
    for _ in 0..g.vertex_count() {
        pg.add_node(());
    }
    for (u, v) in live_edges(g) {
        pg.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    let m = maximum_matching(&pg);
    let mut out: Vec<_> = m
        .edges()
        .map(|(a, b)| {
            let (a, b) = (a.index(), b.index());
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort_unstable();
    out
}

/// Maximal matching by a single scan over the edges.
pub fn greedy_maximal(g: &Graph, order: &[(Vertex, Vertex)]) -> Vec<(Vertex, Vertex)> {
    let mut used = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for &(u, v) in order {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            out.push((u, v));
        }
    }
    out
}

/// Greedy maximal matching; edges scanned in sorted order, or in a seeded
/// random order.
#[derive(Clone, Debug)]
pub struct GreedyOracle {
    rng: Option<ChaCha8Rng>,
}

impl GreedyOracle {
    pub fn new() -> Self {
        GreedyOracle { rng: None }
    }

    pub fn seeded(seed: u64) -> Self {
        GreedyOracle {
            rng: Some(ChaCha8Rng::seed_from_u64(seed)),
        }
    }
}

impl Default for GreedyOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl MatchingOracle for GreedyOracle {
    fn name(&self) -> String {
        if self.rng.is_some() { "greedy-shuffled" } else { "greedy" }.to_string()
    }
    fn approx_factor(&self) -> f64 {
        2.0
    }
    fn is_deterministic(&self) -> bool {
        self.rng.is_none()
    }
    fn find_matching(&mut self, h: &Graph) -> Vec<(Vertex, Vertex)> {
        let mut order: Vec<_> = live_edges(h).collect();
        if let Some(rng) = self.rng.as_mut() {
            order.shuffle(rng);
        }
        greedy_maximal(h, &order)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactOracle;

impl MatchingOracle for ExactOracle {
    fn name(&self) -> String {
        "exact".into()
    }
    fn approx_factor(&self) -> f64 {
        1.0
    }
    fn find_matching(&mut self, h: &Graph) -> Vec<(Vertex, Vertex)> {
        exact_mcm(h)
    }
}

/// Returns exactly `⌈μ/c⌉` edges of a maximum matching: the worst answer a
/// `c`-approximate oracle may give by size.
#[derive(Clone, Copy, Debug)]
pub struct AdversarialOracle {
    pub c: f64,
}

impl AdversarialOracle {
    pub fn new(c: f64) -> Self {
        assert!(c >= 1.0, "adversarial oracle needs c >= 1");
        AdversarialOracle { c }
    }
}

impl MatchingOracle for AdversarialOracle {
    fn name(&self) -> String {
        format!("adversarial({})", self.c)
    }
    fn approx_factor(&self) -> f64 {
        self.c
    }
    fn find_matching(&mut self, h: &Graph) -> Vec<(Vertex, Vertex)> {
        let mut m = exact_mcm(h);
        let keep = (m.len() as f64 / self.c).ceil() as usize;
        m.truncate(keep);
        m
    }
}

/// Counters kept by [`Counted`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleStats {
    pub calls: u64,
    pub queried_vertices: u64,
    pub queried_edges: u64,
    pub matching_sizes: Vec<usize>,
    pub processing_steps: u64,
    /// Sum over processing steps of the largest component involved.
    pub component_sum: u64,
    pub max_component: usize,
    /// Processing steps whose largest component exceeded the configured cap.
    pub oversized_steps: u64,
    pub max_queried_degree: usize,
    /// Calls whose input exceeded the configured degree bound.
    pub degree_violations: u64,
}

/// Wraps an oracle and counts what passes through it.
pub struct Counted<O> {
    inner: O,
    stats: OracleStats,
    degree_bound: Option<f64>,
    component_cap: Option<usize>,
}

impl<O: MatchingOracle> Counted<O> {
    pub fn new(inner: O) -> Self {
        Counted {
            inner,
            stats: OracleStats::default(),
            degree_bound: None,
            component_cap: None,
        }
    }

    /// Flags every processing step over components larger than `cap`.
    pub fn set_component_cap(&mut self, cap: Option<usize>) {
        self.component_cap = cap;
    }

    /// Flags every call whose input has maximum degree above `bound`.
    pub fn set_degree_bound(&mut self, bound: Option<f64>) {
        self.degree_bound = bound;
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_parts(self) -> (O, OracleStats) {
        (self.inner, self.stats)
    }

    pub fn reset(&mut self) {
        self.stats = OracleStats::default();
    }
}

impl<O: MatchingOracle> MatchingOracle for Counted<O> {
    fn name(&self) -> String {
        self.inner.name()
    }
    fn approx_factor(&self) -> f64 {
        self.inner.approx_factor()
    }
    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }
    fn find_matching(&mut self, h: &Graph) -> Vec<(Vertex, Vertex)> {
        let s = &mut self.stats;
        s.calls += 1;
        s.queried_vertices += (h.vertex_count() - h.removed_count()) as u64;
        s.queried_edges += h.edge_count() as u64;
        let deg = h.max_degree();
        s.max_queried_degree = s.max_queried_degree.max(deg);
        if self.degree_bound.is_some_and(|b| deg as f64 > b) {
            s.degree_violations += 1;
        }
        let m = self.inner.find_matching(h);
        self.stats.matching_sizes.push(m.len());
        m
    }
    fn record_processing_step(&mut self, component: usize) {
        self.stats.processing_steps += 1;
        self.stats.component_sum += component as u64;
        self.stats.max_component = self.stats.max_component.max(component);
        if self.component_cap.is_some_and(|c| component > c) {
            self.stats.oversized_steps += 1;
        }
        self.inner.record_processing_step(component);
    }
    fn stats(&self) -> Option<&OracleStats> {
        Some(&self.stats)
    }
}

/// Builds a matching oracle from its CLI name: `exact`, `greedy`,
/// `adversarial(c)`. A seed makes greedy scan edges in shuffled order.
pub fn oracle_by_name(name: &str, seed: Option<u64>) -> Result<Box<dyn MatchingOracle + Send>> {
    let name = name.trim();
    match name {
        "exact" => Ok(Box::new(ExactOracle)),
        "greedy" => Ok(Box::new(match seed {
            Some(s) => GreedyOracle::seeded(s),
            None => GreedyOracle::new(),
        })),
        _ => {
            let c = name
                .strip_prefix("adversarial(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| name.strip_prefix("adversarial-"))
                .and_then(|c| c.parse::<f64>().ok())
                .filter(|&c| c >= 1.0)
                .ok_or_else(|| Error::UnknownOracle(name.to_string()))?;
            Ok(Box::new(AdversarialOracle::new(c)))
        }
    }
}

/// A procedure that, for a vertex subset `S` and threshold `δ`, returns
/// either `None` or a matching of `G[S]` with at least `λδn` edges, and never
/// `None` when `μ(G[S]) ≥ δn`.
pub trait WeakOracle {
    fn name(&self) -> String;
    fn lambda(&self) -> f64;
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>>;
}

impl<W: WeakOracle + ?Sized> WeakOracle for Box<W> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn lambda(&self) -> f64 {
        (**self).lambda()
    }
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        (**self).query(host, subset, delta)
    }
}

impl<W: WeakOracle + ?Sized> WeakOracle for &mut W {
    fn name(&self) -> String {
        (**self).name()
    }
    fn lambda(&self) -> f64 {
        (**self).lambda()
    }
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        (**self).query(host, subset, delta)
    }
}

fn lift_to_host(map: &[Vertex], edges: Vec<(Vertex, Vertex)>) -> Vec<(Vertex, Vertex)> {
    edges
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (map[a], map[b]);
            (a.min(b), a.max(b))
        })
        .collect()
}

/// Exact weak oracle: answers with a maximum matching of `G[S]` unless it is
/// smaller than `λδn`.
#[derive(Clone, Copy, Debug)]
pub struct WeakExact {
    pub lambda: f64,
}

impl Default for WeakExact {
    fn default() -> Self {
        WeakExact { lambda: 1.0 }
    }
}

impl WeakOracle for WeakExact {
    fn name(&self) -> String {
        "weak-exact".into()
    }
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        let (h, map) = induced_subgraph(host, subset);
        let m = exact_mcm(&h);
        let need = self.lambda * delta * host.vertex_count() as f64;
        if m.is_empty() || (m.len() as f64) < need {
            return None;
        }
        Some(lift_to_host(&map, m))
    }
}

/// Greedy weak oracle with `λ = 1/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct WeakGreedy;

impl WeakOracle for WeakGreedy {
    fn name(&self) -> String {
        "weak-greedy".into()
    }
    fn lambda(&self) -> f64 {
        0.5
    }
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        let (h, map) = induced_subgraph(host, subset);
        let order: Vec<_> = h.edges().collect();
        let m = greedy_maximal(&h, &order);
        let need = 0.5 * delta * host.vertex_count() as f64;
        if m.is_empty() || (m.len() as f64) < need {
            return None;
        }
        Some(lift_to_host(&map, m))
    }
}

/// Weak oracle that gives as little as the contract allows: `None` whenever
/// `μ(G[S]) < δn`, otherwise only `⌈λδn⌉` edges of a maximum matching, with
/// `λ = 1/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct WeakMinimal;

impl WeakOracle for WeakMinimal {
    fn name(&self) -> String {
        "weak-minimal".into()
    }
    fn lambda(&self) -> f64 {
        0.5
    }
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        let (h, map) = induced_subgraph(host, subset);
        let mut m = exact_mcm(&h);
        let n = host.vertex_count() as f64;
        if m.is_empty() || (m.len() as f64) < delta * n {
            return None;
        }
        m.truncate(((0.5 * delta * n).ceil() as usize).max(1));
        Some(lift_to_host(&map, m))
    }
}

pub fn weak_by_name(name: &str) -> Result<Box<dyn WeakOracle + Send>> {
    match name.trim() {
        "weak-exact" | "exact" => Ok(Box::new(WeakExact::default())),
        "weak-greedy" | "greedy" => Ok(Box::new(WeakGreedy)),
        "weak-minimal" | "minimal" => Ok(Box::new(WeakMinimal)),
        other => Err(Error::UnknownOracle(other.to_string())),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeakStats {
    pub calls: u64,
    pub bottoms: u64,
    pub queried_vertices: u64,
    pub matching_sizes: Vec<usize>,
}

pub struct CountedWeak<W> {
    inner: W,
    pub stats: WeakStats,
}

impl<W: WeakOracle> CountedWeak<W> {
    pub fn new(inner: W) -> Self {
        CountedWeak {
            inner,
            stats: WeakStats::default(),
        }
    }

    pub fn into_parts(self) -> (W, WeakStats) {
        (self.inner, self.stats)
    }
}

impl<W: WeakOracle> WeakOracle for CountedWeak<W> {
    fn name(&self) -> String {
        self.inner.name()
    }
    fn lambda(&self) -> f64 {
        self.inner.lambda()
    }
    fn query(&mut self, host: &dyn AdjacencyView, subset: &[Vertex], delta: f64) -> Option<Vec<(Vertex, Vertex)>> {
        self.stats.calls += 1;
        self.stats.queried_vertices += subset.len() as u64;
        let out = self.inner.query(host, subset, delta);
        match &out {
            Some(m) => self.stats.matching_sizes.push(m.len()),
            None => self.stats.bottoms += 1,
        }
        out
    }
}

/// Simulated round counters for the parallel and distributed models.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundCounters {
    pub mpc: u64,
    pub congest: u64,
    /// Processing steps whose largest component exceeded `1/ε³`.
    pub component_violations: u64,
}

/// Component cap `1/ε³` for the CONGEST accounting.
pub fn component_cap(epsilon: f64) -> usize {
    (1.0 / (epsilon * epsilon * epsilon)).round() as usize
}

/// One oracle call costs `unit` rounds in both models; a processing step
/// costs one MPC round and as many CONGEST rounds as its largest component.
pub fn round_accounting(stats: &OracleStats, unit: u64) -> RoundCounters {
    RoundCounters {
        mpc: stats.calls * unit + stats.processing_steps,
        congest: stats.calls * unit + stats.component_sum,
        component_violations: stats.oversized_steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let mut o = GreedyOracle::new();
        assert!(o.find_matching(&Graph::new(5)).is_empty());
        let p = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(o.find_matching(&p), vec![(0, 1), (2, 3)]);
        let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        assert_eq!(o.find_matching(&star).len(), 1);
    }

    #[test]
    fn exact_examples() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(exact_mcm(&p3).len(), 1);
        assert_eq!(exact_mcm(&k4()).len(), 2);
    }

    #[test]
    fn adversarial_examples() {
        assert_eq!(AdversarialOracle::new(1.0).find_matching(&k4()).len(), 2);
        assert_eq!(AdversarialOracle::new(2.0).find_matching(&k4()).len(), 1);
        let edges: Vec<_> = (0..7).map(|i| (2 * i, 2 * i + 1)).collect();
        let g = Graph::from_edges(14, &edges).unwrap();
        assert_eq!(AdversarialOracle::new(3.0).find_matching(&g).len(), 3);
    }

    #[test]
    fn counting_composes() {
        let mut o = Counted::new(Counted::new(GreedyOracle::new()));
        assert_eq!(o.stats().unwrap().calls, 0);
        for _ in 0..3 {
            o.find_matching(&k4());
        }
        assert_eq!(o.stats().unwrap().calls, 3);
        assert_eq!(o.inner().stats().unwrap().calls, 3);
        o.record_processing_step(5);
        assert_eq!(o.inner().stats().unwrap().processing_steps, 1);
    }

    #[test]
    fn weak_exact_examples() {
        let g = k4();
        let mut w = WeakExact::default();
        assert_eq!(w.query(&g, &[], 0.1), None);
        let m = w.query(&g, &[0, 1, 2, 3], 0.5).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(w.query(&g, &[0, 1], 0.5), None);
        assert_eq!(w.query(&g, &[1, 3], 0.25), Some(vec![(1, 3)]));
    }

    #[test]
    fn by_name() {
        assert_eq!(oracle_by_name("adversarial(3)", None).unwrap().approx_factor(), 3.0);
        assert_eq!(oracle_by_name("greedy", Some(1)).unwrap().approx_factor(), 2.0);
        assert!(oracle_by_name("magic", None).is_err());
        assert_eq!(weak_by_name("weak-greedy").unwrap().lambda(), 0.5);
    }

    #[test]
    fn round_examples() {
        let mut o = Counted::new(GreedyOracle::new());
        o.set_component_cap(Some(component_cap(0.25)));
        for _ in 0..4 {
            o.find_matching(&k4());
        }
        let r = round_accounting(o.stats().unwrap(), 1);
        assert_eq!((r.mpc, r.congest), (4, 4));
        o.record_processing_step(5);
        let r = round_accounting(o.stats().unwrap(), 1);
        assert_eq!((r.mpc, r.congest, r.component_violations), (5, 9, 0));
        o.record_processing_step(65);
        assert_eq!(round_accounting(o.stats().unwrap(), 1).component_violations, 1);
    }
}
