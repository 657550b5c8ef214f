//! The induced-subgraph oracle variant: the bipartite double cover, lifting
//! bipartite matchings back to the graph, the sampled pass simulations, and
//! the static driver built on top of them.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{classify_arc, exhaust_contractions, is_s_feasible, run_scales, ArcType, DriverStats, EngineConfig,
    NoObserver, PhaseObserver, PhaseSimulator};
use crate::error::{Error, Result};
use crate::graph::{edge_key, AdjacencyView, Graph, Vertex};
use crate::matching::Matching;
use crate::oracle::{exact_mcm, CountedWeak, WeakOracle, WeakStats};
use crate::params::{Constants, Epsilon, PhaseParams};
use crate::structure::{NodeKind, PhaseState, StructId};

/// Above this many G-vertices the double cover is never materialized.
pub const MATERIALIZE_LIMIT: usize = 2048;

/// Implicit bipartite double cover of a graph: vertex `v` is the outer copy
/// `v⁺`, vertex `n + v` the inner copy `v⁻`, and every G-edge `{u, v}` gives
/// `(u⁺, v⁻)` and `(v⁺, u⁻)`. Removed G-vertices have no edges.
#[derive(Clone, Copy)]
pub struct DoubleCover<'g> {
    g: &'g Graph,
}

impl<'g> DoubleCover<'g> {
    pub fn new(g: &'g Graph) -> Self {
        DoubleCover { g }
    }

    pub fn plus(&self, v: Vertex) -> Vertex {
        v
    }

    pub fn minus(&self, v: Vertex) -> Vertex {
        self.g.vertex_count() + v
    }

    /// The G-vertex behind a B-vertex and whether it is the outer copy.
    pub fn split(&self, x: Vertex) -> (Vertex, bool) {
        let n = self.g.vertex_count();
        if x < n {
            (x, true)
        } else {
            (x - n, false)
        }
    }

    /// Explicit copy, for graphs of at most [`MATERIALIZE_LIMIT`] vertices.
    pub fn materialize(&self) -> Option<Graph> {
        let n = self.g.vertex_count();
        if n > MATERIALIZE_LIMIT {
            return None;
        }
        let mut b = Graph::new(2 * n);
        for (u, v) in self.g.edges() {
            if self.g.is_removed(u) || self.g.is_removed(v) {
                continue;
            }
            b.add_edge(u, n + v).expect("distinct copies");
            b.add_edge(v, n + u).expect("distinct copies");
        }
        Some(b)
    }
}

impl AdjacencyView for DoubleCover<'_> {
    fn vertex_count(&self) -> usize {
        2 * self.g.vertex_count()
    }

    fn is_adjacent(&self, x: Vertex, y: Vertex) -> bool {
        let (u, up) = self.split(x);
        let (v, vp) = self.split(y);
        up != vp && !self.g.is_removed(u) && !self.g.is_removed(v) && self.g.has_edge(u, v)
    }

    fn neighbors_into(&self, x: Vertex, out: &mut Vec<Vertex>) {
        let (u, plus) = self.split(x);
        if self.g.is_removed(u) {
            return;
        }
        let n = self.g.vertex_count();
        for w in self.g.live_neighbors(u) {
            out.push(if plus { n + w } else { w });
        }
    }
}

/// Turns a matching of the double cover of an `n`-vertex graph into a
/// matching of the graph with at least a sixth of its size.
///
/// The projected edges form paths and cycles (each vertex has one outer and
/// one inner copy); every other edge of each is kept.
pub fn lift_bipartite_matching(n: usize, m_b: &[(Vertex, Vertex)]) -> Vec<(Vertex, Vertex)> {
    let mut proj: Vec<(Vertex, Vertex)> = m_b.iter().map(|&(x, y)| edge_key(x % n, y % n)).collect();
    proj.sort_unstable();
    proj.dedup();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for &(u, v) in &proj {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let walk = |start: Vertex, seen: &mut Vec<bool>, out: &mut Vec<(Vertex, Vertex)>| {
        let mut order = vec![start];
        seen[start] = true;
        let mut cur = start;
        loop {
            let next = adj[cur].iter().copied().find(|&w| !seen[w]);
            match next {
                Some(w) => {
                    seen[w] = true;
                    order.push(w);
                    cur = w;
                }
                None => break,
            }
        }
        for pair in order.windows(2).step_by(2) {
            out.push(edge_key(pair[0], pair[1]));
        }
    };
    for v in 0..n {
        if !seen[v] && adj[v].len() == 1 {
            walk(v, &mut seen, &mut out);
        }
    }
    for v in 0..n {
        if !seen[v] && !adj[v].is_empty() {
            walk(v, &mut seen, &mut out);
        }
    }
    out.sort_unstable();
    out
}

/// Repeatedly asks the weak oracle for a matching among the unmatched
/// vertices with threshold `delta` until it answers `None`.
pub fn dyn_initial_matching<W: WeakOracle + ?Sized>(g: &Graph, weak: &mut W, delta: f64) -> Result<(Matching, u64)> {
    let mut m = Matching::new(g.vertex_count());
    let cap = (1.0 / (weak.lambda() * delta)).ceil().min(1e9) as u64 + 1;
    let mut calls = 0;
    while calls < cap {
        let free: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| m.is_free(v) && !g.is_removed(v)).collect();
        calls += 1;
        let Some(edges) = weak.query(g, &free, delta) else { break };
        for (u, v) in edges {
            if !g.has_edge(u, v) || !m.is_free(u) || !m.is_free(v) {
                return Err(Error::Internal(format!("weak oracle returned ({u}, {v}) outside G[S]")));
            }
            m.insert(u, v).expect("checked free");
        }
    }
    Ok((m, calls))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    PaperFaithful,
    Desk,
}

/// How many sampled iterations a loop runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterationMode {
    /// Exactly the configured number.
    Fixed,
    /// Up to the configured number, stopping once no eligible arc is left.
    UntilExhausted,
}

/// Parameters of the induced-subgraph variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynParams {
    pub profile: Profile,
    /// Threshold used in the sampled loops.
    pub delta: f64,
    /// Iterations of the sampled contraction/augmentation loop.
    pub iter_caa: u64,
    /// Iterations per stage of the sampled extension loop.
    pub iter_eap: u64,
    pub mode: IterationMode,
    /// Promise `μ(G) ≥ t·ε·n`; also sets the initial threshold `t·ε/3`.
    pub t_const: f64,
    /// Below this many vertices the exact algorithm is used instead.
    pub cutoff_n: f64,
    /// Consecutive phases without augmentation after which a scale ends.
    pub idle_phase_patience: Option<usize>,
}

impl DynParams {
    /// The asymptotic settings: `δ = ε^107`, `I = 1/(2λδ) + 1` and
    /// `1/(2λε^100) + 1`, cutoff `ε^-300`. Only usable for plumbing.
    pub fn paper_faithful(epsilon: f64, lambda: f64) -> Self {
        let iters = |e: f64| {
            let v = 1.0 / (2.0 * lambda * epsilon.powf(e)) + 1.0;
            if v.is_finite() && v < u64::MAX as f64 { v as u64 } else { u64::MAX }
        };
        DynParams {
            profile: Profile::PaperFaithful,
            delta: epsilon.powf(107.0),
            iter_caa: iters(107.0),
            iter_eap: iters(100.0),
            mode: IterationMode::Fixed,
            t_const: 0.25,
            cutoff_n: epsilon.powf(-300.0),
            idle_phase_patience: None,
        }
    }

    /// Desk-scale settings: `δ` small enough that any non-empty induced
    /// matching clears the threshold on graphs of up to 10⁴ vertices, and
    /// `256/λ` iterations that stop early once nothing eligible is left.
    pub fn desk(_epsilon: f64, lambda: f64) -> Self {
        let iters = (256.0 / lambda).ceil() as u64;
        DynParams {
            profile: Profile::Desk,
            delta: 1e-5,
            iter_caa: iters,
            iter_eap: iters,
            mode: IterationMode::UntilExhausted,
            t_const: 0.25,
            cutoff_n: 0.0,
            idle_phase_patience: Some(2),
        }
    }

    pub fn for_profile(profile: Profile, epsilon: f64, lambda: f64) -> Self {
        match profile {
            Profile::PaperFaithful => Self::paper_faithful(epsilon, lambda),
            Profile::Desk => Self::desk(epsilon, lambda),
        }
    }

    /// Most weak-oracle calls a run can make: the initial matching loop plus,
    /// for every phase and pass-bundle of every scale, one loop per stage and
    /// two contraction/augmentation loops.
    pub fn weak_call_budget(&self, epsilon: Epsilon, lambda: f64, c: &Constants) -> f64 {
        let init = 1.0 / (lambda * self.t_const * epsilon.value() / 3.0) + 1.0;
        let mut total = init;
        for j in epsilon.scale_exponents(c) {
            let p = PhaseParams::new(epsilon, j, c);
            let per_bundle = (p.label_max as f64 + 1.0) * self.iter_eap as f64 + 2.0 * self.iter_caa as f64;
            total += p.phases as f64 * p.tau_max as f64 * per_bundle;
        }
        total
    }
}

/// One uniformly random vertex per live structure, from its outer vertices
/// or from all of its vertices.
pub fn sample_per_structure(st: &PhaseState, rng: &mut ChaCha8Rng, outer_only: bool) -> Vec<(StructId, Vertex)> {
    let mut out = Vec::new();
    for s in st.alive_structures() {
        let pool = if outer_only { st.outer_members(s) } else { st.members(s) };
        if let Some(&v) = pool.choose(rng) {
            out.push((s, v));
        }
    }
    out
}

/// Double-cover vertices queried in stage `s` for the given samples: `u⁺`
/// for a sample `u` whose root blossom is the working vertex of a live,
/// not on hold, not yet extended structure at distance `s`; `v⁻` for a
/// sampled trivial inner vertex and for every unvisited matched vertex, if
/// its label exceeds `s + 1`.
pub fn extension_query_set(st: &PhaseState, samples: &[(StructId, Vertex)], s: u32) -> Vec<Vertex> {
    let cover = DoubleCover::new(st.graph());
    let mut subset = Vec::new();
    for &(a, u) in samples {
        let stc = st.structure(a);
        let ru = st.root_of(u);
        if stc.working == Some(ru) && !stc.on_hold && !stc.extended && st.outer_label(ru) == s {
            subset.push(cover.plus(u));
        }
        if matches!(st.vertex_kind(u), NodeKind::Inner(_)) && st.arc_label(u) > s + 1 {
            subset.push(cover.minus(u));
        }
    }
    for v in 0..st.graph().vertex_count() {
        if st.vertex_kind(v) == NodeKind::Unvisited && st.matching().mate(v).is_some() && st.arc_label(v) > s + 1 {
            subset.push(cover.minus(v));
        }
    }
    subset
}

/// Sampling-based simulation of the two pass procedures against a weak
/// oracle.
pub struct SampledSimulator<'w, W: WeakOracle + ?Sized> {
    pub weak: &'w mut W,
    pub params: DynParams,
    rng: ChaCha8Rng,
}

impl<'w, W: WeakOracle + ?Sized> SampledSimulator<'w, W> {
    pub fn new(weak: &'w mut W, params: DynParams, seed: u64) -> Self {
        SampledSimulator {
            weak,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn has_type2(st: &PhaseState) -> bool {
        st.graph().edges().any(|(u, v)| classify_arc(st, u, v) == ArcType::Type2)
    }

    fn has_s_feasible(st: &PhaseState, s: u32) -> bool {
        st.alive_structures().any(|a| {
            let Some(w) = st.structure(a).working else { return false };
            st.omega()
                .members(w)
                .iter()
                .any(|&u| st.graph().neighbors(u).iter().any(|&v| is_s_feasible(st, u, v, s)))
        })
    }

    /// Overtakes along `s`-feasible arcs whose head lies in the tail's own
    /// structure until none is left.
    fn sweep_in_structure(st: &mut PhaseState, s: u32) -> Result<()> {
        loop {
            let mut found = None;
            'search: for a in st.alive_structures() {
                let Some(w) = st.structure(a).working else { continue };
                for &u in st.omega().members(w) {
                    for &v in st.graph().neighbors(u) {
                        if st.vertex_kind(v) == NodeKind::Inner(a) && is_s_feasible(st, u, v, s) {
                            found = Some((u, v));
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some((u, v)) => {
                    st.op_overtake(u, v, s + 1)?;
                }
                None => return Ok(()),
            }
        }
    }
}

impl<W: WeakOracle + ?Sized> PhaseSimulator for SampledSimulator<'_, W> {
    fn is_deterministic(&self) -> bool {
        false
    }

    fn contract_and_augment(&mut self, st: &mut PhaseState) -> Result<()> {
        exhaust_contractions(st)?;
        for _ in 0..self.params.iter_caa {
            if self.params.mode == IterationMode::UntilExhausted && !Self::has_type2(st) {
                break;
            }
            let samples = sample_per_structure(st, &mut self.rng, true);
            let subset: Vec<Vertex> = samples.iter().map(|&(_, v)| v).collect();
            let Some(edges) = self.weak.query(st.graph(), &subset, self.params.delta) else {
                continue;
            };
            for (u, v) in edges {
                if classify_arc(st, u, v) != ArcType::Type2 {
                    return Err(Error::Internal(format!(
                        "weak oracle edge ({u}, {v}) does not join outer vertices of two structures"
                    )));
                }
                st.op_augment(u, v)?;
            }
        }
        Ok(())
    }

    fn extend_active_path(&mut self, st: &mut PhaseState) -> Result<()> {
        let label_max = st.params().label_max;
        for s in 0..=label_max {
            Self::sweep_in_structure(st, s)?;
            for _ in 0..self.params.iter_eap {
                if self.params.mode == IterationMode::UntilExhausted && !Self::has_s_feasible(st, s) {
                    break;
                }
                let samples = sample_per_structure(st, &mut self.rng, false);
                let subset = extension_query_set(st, &samples, s);
                let cover = DoubleCover::new(st.graph());
                let Some(edges) = self.weak.query(&cover, &subset, self.params.delta) else {
                    Self::sweep_in_structure(st, s)?;
                    continue;
                };
                let mut arcs: Vec<(Vertex, Vertex)> = edges
                    .into_iter()
                    .map(|(x, y)| {
                        let (a, ap) = cover.split(x);
                        let (b, _) = cover.split(y);
                        if ap { (a, b) } else { (b, a) }
                    })
                    .collect();
                arcs.sort_unstable();
                // Both ends of an unvisited matched edge may be hit in one
                // answer; keep only the first.
                let mut taken = std::collections::BTreeSet::new();
                arcs.retain(|&(_, v)| {
                    let key = match st.matching().mate(v) {
                        Some(t) if st.vertex_kind(v) == NodeKind::Unvisited => v.min(t),
                        _ => v,
                    };
                    taken.insert(key)
                });
                for (u, v) in arcs {
                    if !is_s_feasible(st, u, v, s) {
                        return Err(Error::Internal(format!("projected arc ({u}, {v}) is not {s}-feasible")));
                    }
                    st.op_overtake(u, v, s + 1)?;
                }
                Self::sweep_in_structure(st, s)?;
            }
        }
        self.contract_and_augment(st)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynOutcome {
    pub matching: Matching,
    pub fallback: bool,
    /// The promise on `μ` was detectably violated.
    pub precondition_warning: bool,
    pub initial_size: usize,
    pub initial_calls: u64,
    pub weak: WeakStats,
    pub weak_budget: f64,
    pub stats: DriverStats,
}

/// `(1 + ε)`-approximate maximum matching from a weak oracle.
pub fn static_from_weak<W: WeakOracle>(
    g: &Graph,
    epsilon: f64,
    weak: W,
    params: &DynParams,
    cfg: &EngineConfig,
    seed: u64,
) -> Result<DynOutcome> {
    static_from_weak_observed(g, epsilon, weak, params, cfg, seed, &mut NoObserver)
}

pub fn static_from_weak_observed<W: WeakOracle>(
    g: &Graph,
    epsilon: f64,
    weak: W,
    params: &DynParams,
    cfg: &EngineConfig,
    seed: u64,
    obs: &mut dyn PhaseObserver,
) -> Result<DynOutcome> {
    let eps = Epsilon::new(epsilon)?;
    let e = eps.value();
    let lambda = weak.lambda();
    let budget = params.weak_call_budget(eps, lambda, &cfg.constants);
    let n = g.vertex_count();
    if (n as f64) < params.cutoff_n || g.edge_count() == 0 {
        let m = Matching::from_edges(g, &exact_mcm(g)).expect("exact output is a matching");
        return Ok(DynOutcome {
            initial_size: m.len(),
            matching: m,
            fallback: true,
            precondition_warning: false,
            initial_calls: 0,
            weak: WeakStats::default(),
            weak_budget: budget,
            stats: DriverStats::default(),
        });
    }
    let mut counted = CountedWeak::new(weak);
    let (m, initial_calls) = dyn_initial_matching(g, &mut counted, params.t_const * e / 3.0)?;
    let warn = 3.0 * (m.len() as f64) < params.t_const * e * n as f64;
    if warn {
        log::warn!("matching number looks below t·ε·n; the approximation guarantee may not hold");
    }
    let initial_size = m.len();
    let mut cfg = cfg.clone();
    cfg.idle_phase_patience = params.idle_phase_patience;
    let mut sim = SampledSimulator::new(&mut counted, params.clone(), seed);
    let (matching, stats) = run_scales(g, m, eps, &mut sim, &cfg, obs)?;
    let (_, weak_stats) = counted.into_parts();
    Ok(DynOutcome {
        matching,
        fallback: false,
        precondition_warning: warn,
        initial_size,
        initial_calls,
        weak: weak_stats,
        weak_budget: budget,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::WeakExact;

    #[test]
    fn double_cover_adjacency() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let b = DoubleCover::new(&g);
        assert!(b.is_adjacent(b.plus(0), b.minus(1)));
        assert!(b.is_adjacent(b.plus(1), b.minus(0)));
        assert!(!b.is_adjacent(b.plus(0), b.plus(1)));
        assert!(!b.is_adjacent(b.plus(0), b.minus(0)));
        let explicit = b.materialize().unwrap();
        assert_eq!(explicit.edge_count(), 2);
    }

    #[test]
    fn lifting_examples() {
        assert_eq!(lift_bipartite_matching(3, &[(0, 4)]), vec![(0, 1)]);
        assert_eq!(lift_bipartite_matching(3, &[(0, 4), (1, 5)]).len(), 1);
        // C4 from (0⁺,1⁻), (1⁺,2⁻), (2⁺,3⁻), (3⁺,0⁻).
        let m = lift_bipartite_matching(4, &[(0, 5), (1, 6), (2, 7), (3, 4)]);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn initial_matching_stops_on_bottom() {
        let g = Graph::from_edges(4, &[(0, 1)]).unwrap();
        let mut w = WeakExact::default();
        let (m, calls) = dyn_initial_matching(&g, &mut w, 0.5).unwrap();
        assert!(m.is_empty());
        assert_eq!(calls, 1);
        let (m, calls) = dyn_initial_matching(&g, &mut w, 0.1).unwrap();
        assert_eq!((m.len(), calls), (1, 2));
    }

    #[test]
    fn desk_run_on_path() {
        let g = crate::corpus::path_graph(10);
        let p = DynParams::desk(0.25, 1.0);
        let out = static_from_weak(&g, 0.25, WeakExact::default(), &p, &EngineConfig::default(), 1).unwrap();
        assert_eq!(out.matching.len(), 5);
        assert!(!out.fallback);
    }

    #[test]
    fn empty_graph_falls_back() {
        let p = DynParams::desk(0.25, 1.0);
        let out = static_from_weak(&Graph::new(5), 0.25, WeakExact::default(), &p, &EngineConfig::default(), 1).unwrap();
        assert!(out.fallback && out.matching.is_empty());
    }

    #[test]
    fn faithful_profile_values() {
        let p = DynParams::paper_faithful(0.25, 1.0);
        assert_eq!(p.delta, 0.25f64.powi(107));
        assert_eq!(p.iter_caa, u64::MAX);
        assert!(p.cutoff_n > 1e100);
    }
}
