//! Arc classification, the oracle-driven simulations of the two pass
//! procedures, the pass-bundle loop of a phase and the scale/phase driver.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_key, Graph, Vertex};
use crate::matching::{AltPath, Matching};
use crate::oracle::{component_cap, round_accounting, Counted, MatchingOracle, OracleStats, RoundCounters};
use crate::params::{Constants, Epsilon, PhaseParams};
use crate::structure::{NodeKind, OpCounts, PhaseState, StructId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArcType {
    Type1,
    Type2,
    Type3,
    None,
}

/// Distance of the working vertex behind `u` if `(u, v)` passes every
/// type 3 test except the extended mark.
fn type3_distance(st: &PhaseState, u: Vertex, v: Vertex) -> Option<u32> {
    let bu = st.root_of(u);
    let bv = st.root_of(v);
    if bu == bv {
        return None;
    }
    let a = st.working_owner(bu)?;
    if st.structure(a).on_hold || st.omega().base(bv) != v || !st.omega().is_trivial(bv) {
        return None;
    }
    match st.node_kind(bv) {
        NodeKind::Unvisited => {}
        NodeKind::Inner(b) => {
            if b == a && st.is_ancestor(bv, bu) {
                return None;
            }
        }
        _ => return None,
    }
    st.matching().mate(v)?;
    let d = st.outer_label(bu);
    (st.arc_label(v) > d + 1).then_some(d)
}

/// Type of the directed arc `(u, v)` in the current state.
pub fn classify_arc(st: &PhaseState, u: Vertex, v: Vertex) -> ArcType {
    let g = st.graph();
    if g.is_removed(u) || g.is_removed(v) || !g.has_edge(u, v) || st.matching().contains(u, v) {
        return ArcType::None;
    }
    let bu = st.root_of(u);
    let bv = st.root_of(v);
    if bu == bv {
        return ArcType::None;
    }
    match (st.node_kind(bu), st.node_kind(bv)) {
        (NodeKind::Outer(a), NodeKind::Outer(b)) if a == b => {
            if st.working_owner(bu).is_some() || st.working_owner(bv).is_some() {
                ArcType::Type1
            } else {
                ArcType::None
            }
        }
        (NodeKind::Outer(_), NodeKind::Outer(_)) => ArcType::Type2,
        _ => match type3_distance(st, u, v) {
            Some(_) => ArcType::Type3,
            None => ArcType::None,
        },
    }
}

/// Like [`classify_arc`], but a type 3 arc only counts when its structure is
/// not marked extended, which is when the stage loop is obliged to handle it.
pub fn classify_arc_unextended(st: &PhaseState, u: Vertex, v: Vertex) -> ArcType {
    match classify_arc(st, u, v) {
        ArcType::Type3 => {
            let a = st.owner(st.root_of(u)).expect("type 3 tail is owned");
            if st.structure(a).extended {
                ArcType::None
            } else {
                ArcType::Type3
            }
        }
        t => t,
    }
}

/// True iff `(u, v)` is a type 3 arc whose tail has label `s` and whose
/// structure is neither on hold nor extended.
pub fn is_s_feasible(st: &PhaseState, u: Vertex, v: Vertex, s: u32) -> bool {
    let g = st.graph();
    if g.is_removed(u) || g.is_removed(v) || !g.has_edge(u, v) || st.matching().contains(u, v) {
        return false;
    }
    match type3_distance(st, u, v) {
        Some(d) if d == s => {
            let a = st.owner(st.root_of(u)).expect("working vertex is owned");
            !st.structure(a).extended
        }
        _ => false,
    }
}

/// Every typed arc that is not in the contaminated ledger, by the
/// extended-aware classification.
pub fn uncontaminated_typed_arcs(st: &PhaseState) -> Vec<(Vertex, Vertex, ArcType)> {
    let ledger = st.contamination().map(|c| &c.arcs);
    let mut out = Vec::new();
    for (x, y) in st.graph().edges() {
        for (u, v) in [(x, y), (y, x)] {
            let t = classify_arc_unextended(st, u, v);
            if t != ArcType::None && !ledger.is_some_and(|l| l.contains(&(u, v))) {
                out.push((u, v, t));
            }
        }
    }
    out
}

/// G-arcs between two outer vertices in different root blossoms that are
/// not in the ledger.
pub fn uncontaminated_outer_arcs(st: &PhaseState) -> Vec<(Vertex, Vertex)> {
    let ledger = st.contamination().map(|c| &c.arcs);
    let g = st.graph();
    let outer = |x: Vertex| matches!(st.vertex_kind(x), NodeKind::Outer(_));
    g.edges()
        .filter(|&(u, v)| !g.is_removed(u) && !g.is_removed(v) && !st.matching().contains(u, v))
        .filter(|&(u, v)| outer(u) && outer(v) && st.root_of(u) != st.root_of(v))
        .filter(|&(u, v)| !ledger.is_some_and(|l| l.contains(&(u, v)) || l.contains(&(v, u))))
        .collect()
}

/// `⌈2c⌉` rounds of asking the oracle for a matching among the still
/// unmatched vertices.
pub fn initial_matching<O: MatchingOracle + ?Sized>(g: &Graph, oracle: &mut O) -> Matching {
    let mut m = Matching::new(g.vertex_count());
    let rounds = (2.0 * oracle.approx_factor()).ceil() as usize;
    for _ in 0..rounds {
        let free: Vec<Vertex> = (0..g.vertex_count())
            .filter(|&v| m.is_free(v) && !g.is_removed(v))
            .collect();
        let (h, map) = g.induced(&free);
        for (a, b) in oracle.find_matching(&h) {
            let (u, v) = (map[a], map[b]);
            if m.is_free(u) && m.is_free(v) && g.has_edge(u, v) {
                m.insert(u, v).expect("both endpoints free");
            } else {
                log::warn!("oracle returned an invalid edge ({u}, {v}); ignored");
            }
        }
    }
    m
}

/// Where in the driver an observer is being called from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseContext {
    pub scale_exp: u32,
    pub phase: usize,
    pub pass_bundle: usize,
}

/// Hooks into a running phase. All methods default to doing nothing.
pub trait PhaseObserver {
    fn on_pass_bundle_start(&mut self, _ctx: &PhaseContext, _st: &PhaseState) {}
    /// After the extension procedure, including its closing contraction and
    /// augmentation step.
    fn after_extend(&mut self, _ctx: &PhaseContext, _st: &PhaseState) {}
    fn after_contract_and_augment(&mut self, _ctx: &PhaseContext, _st: &PhaseState) {}
    fn on_phase_end(&mut self, _ctx: &PhaseContext, _st: &PhaseState) {}
}

pub struct NoObserver;

impl PhaseObserver for NoObserver {}

/// The two procedures run by every pass-bundle.
pub trait PhaseSimulator {
    fn extend_active_path(&mut self, st: &mut PhaseState) -> Result<()>;
    fn contract_and_augment(&mut self, st: &mut PhaseState) -> Result<()>;
    /// Whether rerunning a phase on the same matching gives the same result.
    fn is_deterministic(&self) -> bool;
}

/// Contracts along type 1 arcs of every structure until none is left.
pub fn exhaust_contractions(st: &mut PhaseState) -> Result<usize> {
    let mut count = 0;
    let ids: Vec<StructId> = st.alive_structures().collect();
    for s in ids {
        while let Some((x, y)) = find_type1(st, s) {
            st.op_contract(x, y)?;
            count += 1;
        }
    }
    Ok(count)
}

fn find_type1(st: &PhaseState, s: StructId) -> Option<(Vertex, Vertex)> {
    let w = st.structure(s).working?;
    for &x in st.omega().members(w) {
        for &y in st.graph().neighbors(x) {
            if st.graph().is_removed(y) || st.matching().contains(x, y) {
                continue;
            }
            let by = st.root_of(y);
            if by != w && st.node_kind(by) == NodeKind::Outer(s) {
                return Some((x, y));
            }
        }
    }
    None
}

/// The auxiliary graph on structures: one vertex per live structure, one edge
/// per pair joined by a G-edge between outer vertices, with the
/// lexicographically smallest such edge as witness.
pub struct StructureGraph {
    pub graph: Graph,
    pub structures: Vec<StructId>,
    pub witness: BTreeMap<(usize, usize), (Vertex, Vertex)>,
}

pub fn build_h_prime(st: &PhaseState) -> StructureGraph {
    let structures: Vec<StructId> = st.alive_structures().collect();
    let index: BTreeMap<StructId, usize> = structures.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut witness = BTreeMap::new();
    let g = st.graph();
    for (u, v) in g.edges() {
        if g.is_removed(u) || g.is_removed(v) || st.matching().contains(u, v) {
            continue;
        }
        if let (NodeKind::Outer(a), NodeKind::Outer(b)) = (st.vertex_kind(u), st.vertex_kind(v)) {
            if a != b {
                witness.entry(edge_key(index[&a], index[&b])).or_insert((u, v));
            }
        }
    }
    let edges: Vec<_> = witness.keys().copied().collect();
    let graph = Graph::from_edges(structures.len(), &edges).expect("distinct structure pairs");
    StructureGraph {
        graph,
        structures,
        witness,
    }
}

/// The bipartite auxiliary graph of stage `s`: working vertices with label
/// `s` on the left, trivial inner vertices and unvisited matched edges on the
/// right, and one edge per pair joined by an `s`-feasible arc.
pub struct StageGraph {
    pub graph: Graph,
    pub left: Vec<usize>,
    pub right: Vec<Vertex>,
    pub witness: BTreeMap<(usize, usize), (Vertex, Vertex)>,
}

/// Right-side vertex of `v`. Both ends of an unvisited matched edge share one
/// vertex, so an oracle matching never overtakes the same edge from two
/// sides.
fn right_key(st: &PhaseState, v: Vertex) -> Vertex {
    match (st.vertex_kind(v), st.matching().mate(v)) {
        (NodeKind::Unvisited, Some(t)) => v.min(t),
        _ => v,
    }
}

pub fn build_h_prime_s(st: &PhaseState, s: u32) -> StageGraph {
    let mut left = Vec::new();
    let mut pairs: BTreeMap<(usize, Vertex), (Vertex, Vertex)> = BTreeMap::new();
    for a in st.alive_structures() {
        let stc = st.structure(a);
        let Some(w) = stc.working else { continue };
        if stc.on_hold || stc.extended || st.outer_label(w) != s {
            continue;
        }
        let li = left.len();
        left.push(w);
        for &u in st.omega().members(w) {
            for &v in st.graph().neighbors(u) {
                if is_s_feasible(st, u, v, s) {
                    pairs
                        .entry((li, right_key(st, v)))
                        .and_modify(|e| *e = (*e).min((u, v)))
                        .or_insert((u, v));
                }
            }
        }
    }
    let right: Vec<Vertex> = pairs.keys().map(|&(_, v)| v).collect::<BTreeSet<_>>().into_iter().collect();
    let rindex: BTreeMap<Vertex, usize> = right.iter().enumerate().map(|(i, &v)| (v, left.len() + i)).collect();
    let mut witness = BTreeMap::new();
    for (&(li, v), &arc) in &pairs {
        witness.insert((li, rindex[&v]), arc);
    }
    let edges: Vec<_> = witness.keys().copied().collect();
    let graph = Graph::from_edges(left.len() + right.len(), &edges).expect("bipartite pairs are distinct");
    StageGraph {
        graph,
        left,
        right,
        witness,
    }
}

fn record_contaminated(st: &mut PhaseState, arcs: impl IntoIterator<Item = (Vertex, Vertex)>) {
    if let Some(c) = st.contamination_mut() {
        let before = c.arcs.len();
        c.arcs.extend(arcs);
        let added = c.arcs.len() - before;
        if let Some(last) = c.per_pass_bundle.last_mut() {
            *last += added;
        }
    }
}

/// Oracle-driven simulation of both pass procedures.
pub struct OracleSimulator<'o, O: MatchingOracle + ?Sized> {
    pub oracle: &'o mut O,
    pub iterations: usize,
}

impl<'o, O: MatchingOracle + ?Sized> OracleSimulator<'o, O> {
    pub fn new(oracle: &'o mut O, epsilon: Epsilon, constants: &Constants) -> Self {
        let iterations = epsilon.iterations(constants, oracle.approx_factor());
        OracleSimulator { oracle, iterations }
    }

    fn validated(&mut self, h: &Graph) -> Result<Vec<(usize, usize)>> {
        let m = self.oracle.find_matching(h);
        if !crate::matching::is_matching(h, &m) {
            return Err(Error::Internal(format!("oracle `{}` returned a non-matching", self.oracle.name())));
        }
        Ok(m.into_iter().map(|(a, b)| edge_key(a, b)).collect())
    }
}

impl<O: MatchingOracle + ?Sized> PhaseSimulator for OracleSimulator<'_, O> {
    fn is_deterministic(&self) -> bool {
        self.oracle.is_deterministic()
    }

    fn contract_and_augment(&mut self, st: &mut PhaseState) -> Result<()> {
        exhaust_contractions(st)?;
        for _ in 0..self.iterations {
            let h = build_h_prime(st);
            if h.graph.edge_count() == 0 {
                break;
            }
            let chosen = self.validated(&h.graph)?;
            let mut arcs: Vec<(Vertex, Vertex)> = chosen.iter().map(|k| h.witness[k]).collect();
            arcs.sort_unstable();
            let mut component = 0;
            for (u, v) in arcs {
                if classify_arc(st, u, v) != ArcType::Type2 {
                    return Err(Error::Internal(format!("witness ({u}, {v}) is no longer of type 2")));
                }
                let (a, b) = (st.owner(st.root_of(u)).unwrap(), st.owner(st.root_of(v)).unwrap());
                component = component.max(st.structure(a).size + st.structure(b).size);
                st.op_augment(u, v)?;
            }
            self.oracle.record_processing_step(component);
        }
        if st.contamination().is_some() {
            let left: Vec<_> = st
                .graph()
                .edges()
                .filter(|&(u, v)| classify_arc(st, u, v) == ArcType::Type2)
                .flat_map(|(u, v)| [(u, v), (v, u)])
                .collect();
            record_contaminated(st, left);
        }
        Ok(())
    }

    fn extend_active_path(&mut self, st: &mut PhaseState) -> Result<()> {
        let label_max = st.params().label_max;
        // Tree roots have label 0, so the stage loop has to include s = 0.
        for s in 0..=label_max {
            for _ in 0..self.iterations {
                let h = build_h_prime_s(st, s);
                if h.graph.edge_count() == 0 {
                    break;
                }
                let chosen = self.validated(&h.graph)?;
                let mut arcs: Vec<(Vertex, Vertex)> = chosen.iter().map(|k| h.witness[k]).collect();
                arcs.sort_unstable();
                let mut component = 0;
                for (u, v) in arcs {
                    if !is_s_feasible(st, u, v, s) {
                        return Err(Error::Internal(format!("arc ({u}, {v}) stopped being {s}-feasible")));
                    }
                    let victim = st.owner(st.root_of(v));
                    st.op_overtake(u, v, s + 1)?;
                    let a = st.owner(st.root_of(u)).expect("overtaker is owned");
                    let mut size = st.structure(a).size;
                    if let Some(b) = victim.filter(|&b| b != a) {
                        size += st.structure(b).size;
                    }
                    component = component.max(size);
                }
                self.oracle.record_processing_step(component);
            }
            if st.contamination().is_some() {
                let h = build_h_prime_s(st, s);
                let mut left = Vec::new();
                for &w in &h.left {
                    for &u in st.omega().members(w) {
                        for &v in st.graph().neighbors(u) {
                            if is_s_feasible(st, u, v, s) {
                                left.push((u, v));
                            }
                        }
                    }
                }
                record_contaminated(st, left);
            }
        }
        self.contract_and_augment(st)
    }
}

/// Engine switches shared by every driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub constants: Constants,
    /// Skip the remaining phases of a scale once a phase finds nothing and
    /// the simulator is deterministic.
    pub skip_idle_phases: bool,
    /// Stop a phase after a pass-bundle that changed nothing.
    pub early_exit: bool,
    /// Run the full invariant checker after every basic operation.
    pub verify_ops: bool,
    /// Keep the contaminated-arc ledger.
    pub instrument: bool,
    /// End a scale after this many consecutive phases without an
    /// augmentation, whatever the simulator. Randomized oracles never hit
    /// the deterministic skip, and a scale has thousands of phases.
    pub idle_phase_patience: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            constants: Constants::default(),
            skip_idle_phases: true,
            early_exit: true,
            verify_ops: false,
            instrument: false,
            idle_phase_patience: Some(3),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseOutcome {
    pub paths: Vec<AltPath>,
    pub pass_bundles: usize,
    pub counts: OpCounts,
}

/// One phase: fresh structures for every free vertex, then up to `τ_max`
/// pass-bundles. Removal flags are left set in `graph`.
pub fn run_phase<S: PhaseSimulator + ?Sized>(
    graph: &mut Graph,
    matching: &Matching,
    params: PhaseParams,
    sim: &mut S,
    cfg: &EngineConfig,
    ctx: PhaseContext,
    obs: &mut dyn PhaseObserver,
) -> Result<PhaseOutcome> {
    let tau_max = params.tau_max;
    let mut st = PhaseState::new(graph, matching, params);
    st.verify_ops = cfg.verify_ops;
    if cfg.instrument {
        st.enable_contamination();
    }
    let mut ctx = ctx;
    let mut bundles = 0;
    for tau in 1..=tau_max {
        ctx.pass_bundle = tau;
        bundles = tau;
        let before = st.changes();
        let ids: Vec<StructId> = st.alive_structures().collect();
        for &s in &ids {
            st.mark_for_pass_bundle(s);
        }
        if let Some(c) = st.contamination_mut() {
            c.per_pass_bundle.push(0);
        }
        obs.on_pass_bundle_start(&ctx, &st);
        sim.extend_active_path(&mut st)?;
        obs.after_extend(&ctx, &st);
        sim.contract_and_augment(&mut st)?;
        obs.after_contract_and_augment(&ctx, &st);
        let ids: Vec<StructId> = st.alive_structures().collect();
        for s in ids {
            let stc = st.structure(s);
            if !stc.on_hold && !stc.modified {
                st.backtrack(s);
            }
        }
        if cfg.verify_ops {
            st.check_invariants().map_err(Error::Invariant)?;
        }
        if cfg.early_exit && st.changes() == before {
            break;
        }
    }
    obs.on_phase_end(&ctx, &st);
    let counts = st.counts().clone();
    Ok(PhaseOutcome {
        pass_bundles: bundles,
        counts,
        paths: st.into_paths(),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScaleStats {
    pub scale_exp: u32,
    pub phases_run: usize,
    pub phases_skipped: usize,
    pub pass_bundles: usize,
    pub augmentations: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DriverStats {
    pub initial_size: usize,
    pub final_size: usize,
    pub phases_run: usize,
    pub pass_bundles: usize,
    pub ops: OpCounts,
    pub per_scale: Vec<ScaleStats>,
}

/// The scale and phase loops on top of an initial matching.
pub fn run_scales<S: PhaseSimulator + ?Sized>(
    g: &Graph,
    mut m: Matching,
    epsilon: Epsilon,
    sim: &mut S,
    cfg: &EngineConfig,
    obs: &mut dyn PhaseObserver,
) -> Result<(Matching, DriverStats)> {
    let mut stats = DriverStats {
        initial_size: m.len(),
        ..DriverStats::default()
    };
    let mut work = g.clone();
    for j in epsilon.scale_exponents(&cfg.constants) {
        let params = PhaseParams::new(epsilon, j, &cfg.constants);
        let mut sc = ScaleStats {
            scale_exp: j,
            ..ScaleStats::default()
        };
        let mut idle = 0;
        for phase in 1..=params.phases {
            let ctx = PhaseContext {
                scale_exp: j,
                phase,
                pass_bundle: 0,
            };
            let out = run_phase(&mut work, &m, params.clone(), sim, cfg, ctx, obs)?;
            work.restore_all();
            sc.phases_run += 1;
            sc.pass_bundles += out.pass_bundles;
            sc.augmentations += out.paths.len();
            stats.ops.merge(&out.counts);
            let found = out.paths.len();
            for p in &out.paths {
                m.augment(g, p).map_err(|e| Error::Internal(format!("collected path rejected: {e}")))?;
            }
            idle = if found == 0 { idle + 1 } else { 0 };
            let patience_out = cfg.idle_phase_patience.is_some_and(|p| idle >= p);
            if found == 0 && ((cfg.skip_idle_phases && sim.is_deterministic()) || patience_out) {
                sc.phases_skipped = params.phases - phase;
                break;
            }
        }
        stats.phases_run += sc.phases_run;
        stats.pass_bundles += sc.pass_bundles;
        stats.per_scale.push(sc);
    }
    stats.final_size = m.len();
    Ok((m, stats))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostOutcome {
    pub matching: Matching,
    pub epsilon: f64,
    pub oracle: String,
    pub initial_calls: u64,
    pub stats: DriverStats,
    pub oracle_stats: OracleStats,
    pub rounds: RoundCounters,
}

/// `(1 + ε)`-approximate maximum matching from a `c`-approximate oracle.
pub fn boost<O: MatchingOracle>(g: &Graph, epsilon: f64, oracle: O, cfg: &EngineConfig) -> Result<BoostOutcome> {
    boost_observed(g, epsilon, oracle, cfg, &mut NoObserver)
}

pub fn boost_observed<O: MatchingOracle>(
    g: &Graph,
    epsilon: f64,
    oracle: O,
    cfg: &EngineConfig,
    obs: &mut dyn PhaseObserver,
) -> Result<BoostOutcome> {
    let eps = Epsilon::new(epsilon)?;
    let mut counted = Counted::new(oracle);
    let e = eps.value();
    counted.set_degree_bound(Some(2.0 / (e * e * e) * g.max_degree() as f64));
    counted.set_component_cap(Some(component_cap(e)));
    let m = initial_matching(g, &mut counted);
    let initial_calls = counted.stats().map_or(0, |s| s.calls);
    let name = counted.name();
    let mut sim = OracleSimulator::new(&mut counted, eps, &cfg.constants);
    let (matching, stats) = run_scales(g, m, eps, &mut sim, cfg, obs)?;
    let oracle_stats = counted.stats().cloned().unwrap_or_default();
    Ok(BoostOutcome {
        matching,
        epsilon: e,
        oracle: name,
        initial_calls,
        rounds: round_accounting(&oracle_stats, 1),
        stats,
        oracle_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_mcm, ExactOracle, GreedyOracle};

    fn params() -> PhaseParams {
        PhaseParams::new(Epsilon::new(0.25).unwrap(), 1, &Constants::default())
    }

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn classification_examples() {
        let mut g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (0, 4)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        assert_eq!(classify_arc(&st, 0, 4), ArcType::Type2);
        assert_eq!(classify_arc(&st, 0, 1), ArcType::Type3);
        assert_eq!(classify_arc(&st, 1, 2), ArcType::None);
        assert_eq!(classify_arc(&st, 1, 0), ArcType::None);
        st.op_overtake(0, 1, 1).unwrap();
        assert_eq!(classify_arc(&st, 2, 3), ArcType::Type2);
    }

    #[test]
    fn blossom_arc_is_untyped() {
        let mut g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        st.op_overtake(0, 1, 1).unwrap();
        assert_eq!(classify_arc(&st, 2, 0), ArcType::Type1);
        st.op_contract(2, 0).unwrap();
        assert_eq!(classify_arc(&st, 2, 0), ArcType::None);
    }

    #[test]
    fn stage_graph_examples() {
        let mut g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        assert_eq!(build_h_prime_s(&st, 1).graph.edge_count(), 0);
        st.op_overtake(0, 1, 1).unwrap();
        st.mark_for_pass_bundle(0);
        let h = build_h_prime_s(&st, 1);
        assert_eq!(h.graph.edge_count(), 1);
        assert_eq!(h.witness.values().next(), Some(&(2, 3)));
        st.op_overtake(2, 3, 2).unwrap();
        assert_eq!(build_h_prime_s(&st, 2).graph.edge_count(), 0);
    }

    #[test]
    fn initial_matching_call_count() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let mut o = Counted::new(GreedyOracle::new());
        let m = initial_matching(&g, &mut o);
        assert_eq!(o.stats().unwrap().calls, 4);
        assert!(m.len() * 4 >= exact_mcm(&g).len());
        let mut o = Counted::new(GreedyOracle::new());
        initial_matching(&Graph::new(0), &mut o);
        assert_eq!(o.stats().unwrap().calls, 4);
    }

    #[test]
    fn phase_on_single_edge() {
        let mut g = path(2);
        let m = Matching::new(2);
        let mut o = ExactOracle;
        let eps = Epsilon::new(0.25).unwrap();
        let mut sim = OracleSimulator::new(&mut o, eps, &Constants::default());
        let cfg = EngineConfig {
            verify_ops: true,
            ..EngineConfig::default()
        };
        let out = run_phase(&mut g, &m, params(), &mut sim, &cfg, PhaseContext::default(), &mut NoObserver).unwrap();
        assert_eq!(out.paths.len(), 1);
        assert_eq!(out.paths[0].vertices(), &[0, 1]);
    }

    #[test]
    fn phase_finds_length_five_path() {
        let mut g = path(6);
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4)]).unwrap();
        let mut o = ExactOracle;
        let eps = Epsilon::new(0.25).unwrap();
        let mut sim = OracleSimulator::new(&mut o, eps, &Constants::default());
        let cfg = EngineConfig {
            verify_ops: true,
            ..EngineConfig::default()
        };
        let out = run_phase(&mut g, &m, params(), &mut sim, &cfg, PhaseContext::default(), &mut NoObserver).unwrap();
        assert_eq!(out.paths.len(), 1);
        assert_eq!(out.paths[0].len(), 5);
    }

    #[test]
    fn boost_small_cases() {
        let cfg = EngineConfig::default();
        assert!(boost(&Graph::new(0), 0.25, GreedyOracle::new(), &cfg).unwrap().matching.is_empty());
        assert_eq!(boost(&path(2), 0.25, GreedyOracle::new(), &cfg).unwrap().matching.len(), 1);
        assert!(matches!(boost(&path(2), 0.5, GreedyOracle::new(), &cfg), Err(Error::InvalidEpsilon(_))));
    }
}
