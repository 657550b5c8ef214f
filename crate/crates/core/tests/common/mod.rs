//! Test-side reference computations. Nothing here calls into the library's
//! matching code, so agreement with it is evidence and not tautology.

#![allow(dead_code)]

use std::collections::BTreeSet;

use matchboost::engine::{uncontaminated_outer_arcs, uncontaminated_typed_arcs, PhaseContext, PhaseObserver};
use matchboost::structure::PhaseState;
use matchboost::{Graph, Matching, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum matching size by exhaustive search over vertex subsets. `n ≤ 20`.
pub fn brute_mu(g: &Graph) -> usize {
    let n = g.vertex_count();
    assert!(n <= 20, "brute force is for tiny graphs");
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |acc, &w| acc | (1 << w)))
        .collect();
    let mut memo = vec![u8::MAX; 1 << n];
    fn go(mask: u32, adj: &[u32], memo: &mut [u8]) -> u8 {
        if mask == 0 {
            return 0;
        }
        if memo[mask as usize] != u8::MAX {
            return memo[mask as usize];
        }
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << v);
        let mut best = go(rest, adj, memo);
        let mut cand = adj[v] & rest;
        while cand != 0 {
            let u = cand.trailing_zeros();
            cand &= cand - 1;
            best = best.max(1 + go(rest & !(1 << u), adj, memo));
        }
        memo[mask as usize] = best;
        best
    }
    go(((1u64 << n) - 1) as u32, &adj, &mut memo) as usize
}

/// Maximum matching size by trying every subset of edges, for cross-checking
/// `brute_mu` itself on very small graphs.
pub fn edge_subset_mu(g: &Graph) -> usize {
    let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    assert!(edges.len() <= 20);
    let mut best = 0;
    for mask in 0u32..(1 << edges.len()) {
        let mut used = 0u64;
        let mut ok = true;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if used >> u & 1 == 1 || used >> v & 1 == 1 {
                    ok = false;
                    break;
                }
                used |= 1 << u | 1 << v;
            }
        }
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn is_valid_matching(g: &Graph, edges: &[(Vertex, Vertex)]) -> bool {
    let mut seen = BTreeSet::new();
    edges
        .iter()
        .all(|&(u, v)| u != v && g.has_edge(u, v) && seen.insert(u) && seen.insert(v))
}

/// Every augmenting path with at most `max_matched` matched edges that
/// avoids removed vertices, as a vertex sequence starting at a free vertex.
/// Both orientations of a path are listed.
pub fn augmenting_paths(g: &Graph, m: &Matching, max_matched: usize) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    fn extend(
        g: &Graph,
        m: &Matching,
        max_matched: usize,
        path: &mut Vec<Vertex>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let last = *path.last().unwrap();
        let matched_so_far = (path.len() - 1) / 2;
        for &x in g.neighbors(last) {
            if on_path[x] || g.is_removed(x) || m.contains(last, x) {
                continue;
            }
            match m.mate(x) {
                None => {
                    let mut p = path.clone();
                    p.push(x);
                    out.push(p);
                }
                Some(y) => {
                    if matched_so_far == max_matched || on_path[y] || g.is_removed(y) {
                        continue;
                    }
                    on_path[x] = true;
                    on_path[y] = true;
                    path.push(x);
                    path.push(y);
                    extend(g, m, max_matched, path, on_path, out);
                    path.pop();
                    path.pop();
                    on_path[x] = false;
                    on_path[y] = false;
                }
            }
        }
    }
    for a in 0..n {
        if m.is_free(a) && !g.is_removed(a) {
            on_path[a] = true;
            let mut path = vec![a];
            extend(g, m, max_matched, &mut path, &mut on_path, &mut out);
            on_path[a] = false;
        }
    }
    out
}

/// Whether the matched edge `{u, v}` joins two consecutive nodes of some
/// structure's active path.
pub fn is_critical_arc(st: &PhaseState, u: Vertex, v: Vertex) -> bool {
    let (bu, bv) = (st.root_of(u), st.root_of(v));
    if bu == bv {
        return false;
    }
    st.alive_structures().any(|s| {
        st.active_path(s)
            .windows(2)
            .any(|w| (w[0] == bu && w[1] == bv) || (w[0] == bv && w[1] == bu))
    })
}

pub fn is_critical_vertex(st: &PhaseState, alpha: Vertex) -> bool {
    st.structures()
        .iter()
        .any(|s| s.alpha == alpha && s.alive && s.working.is_some())
}

/// Short augmenting paths at the current moment that have no critical start,
/// no critical matched arc and no contaminated edge.
pub fn uncovered_short_paths(st: &PhaseState) -> Vec<Vec<Vertex>> {
    let ledger = st.contamination().map(|c| c.arcs.clone()).unwrap_or_default();
    let max = st.params().label_max as usize;
    augmenting_paths(st.graph(), st.matching(), max)
        .into_iter()
        .filter(|p| {
            if is_critical_vertex(st, p[0]) {
                return false;
            }
            let critical = p[1..p.len() - 1]
                .chunks(2)
                .any(|c| is_critical_arc(st, c[0], c[1]));
            let contaminated = p
                .windows(2)
                .any(|w| ledger.contains(&(w[0], w[1])) || ledger.contains(&(w[1], w[0])));
            !critical && !contaminated
        })
        .collect()
}

/// Collects every structural check at pass-bundle boundaries.
#[derive(Default)]
pub struct TraceObserver {
    pub bundles_seen: usize,
    pub violations: Vec<String>,
    /// Also enumerate short augmenting paths (small graphs only).
    pub check_short_paths: bool,
    pub short_paths_checked: usize,
}

impl TraceObserver {
    fn tag(ctx: &PhaseContext) -> String {
        format!("scale {} phase {} bundle {}", ctx.scale_exp, ctx.phase, ctx.pass_bundle)
    }
}

impl PhaseObserver for TraceObserver {
    fn on_pass_bundle_start(&mut self, ctx: &PhaseContext, st: &PhaseState) {
        self.bundles_seen += 1;
        if let Err(e) = st.check_invariants() {
            self.violations.push(format!("{}: {e}", Self::tag(ctx)));
        }
        let cap = st.params().delta_h;
        for (i, s) in st.structures().iter().enumerate() {
            if s.alive && s.size > cap {
                self.violations
                    .push(format!("{}: structure {i} has {} vertices > {cap}", Self::tag(ctx), s.size));
            }
        }
        if ctx.pass_bundle >= 2 {
            let arcs = uncontaminated_outer_arcs(st);
            if !arcs.is_empty() {
                self.violations
                    .push(format!("{}: outer-outer arcs {:?}", Self::tag(ctx), &arcs[..arcs.len().min(4)]));
            }
        }
        if self.check_short_paths {
            let bad = uncovered_short_paths(st);
            self.short_paths_checked += 1;
            if !bad.is_empty() {
                self.violations
                    .push(format!("{}: uncovered short paths {:?}", Self::tag(ctx), &bad[..bad.len().min(3)]));
            }
        }
    }

    fn after_extend(&mut self, ctx: &PhaseContext, st: &PhaseState) {
        let left = uncontaminated_typed_arcs(st);
        if !left.is_empty() {
            self.violations
                .push(format!("{}: typed arcs after extension {:?}", Self::tag(ctx), &left[..left.len().min(4)]));
        }
    }

    fn after_contract_and_augment(&mut self, ctx: &PhaseContext, st: &PhaseState) {
        if let Err(e) = st.check_invariants() {
            self.violations.push(format!("{} (after augment): {e}", Self::tag(ctx)));
        }
    }
}
