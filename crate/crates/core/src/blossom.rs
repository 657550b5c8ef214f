//! Laminar blossom families, contraction and lifting of paths through blossoms.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::BlossomError;
use crate::graph::{edge_key, Graph, Vertex};
use crate::matching::{AltPath, Matching};

pub type BlossomId = usize;

/// A blossom. Ids below `n` are the trivial blossoms `{v}`.
///
/// `cycle_edges[i]` joins child `i` to child `i + 1` (cyclically) and is stored
/// with the endpoint in child `i` first.
#[derive(Clone, Debug, Serialize)]
pub struct Blossom {
    pub id: BlossomId,
    pub members: Vec<Vertex>,
    pub base: Vertex,
    pub children: Vec<BlossomId>,
    pub cycle_edges: Vec<(Vertex, Vertex)>,
    pub parent: Option<BlossomId>,
    pub alive: bool,
}

impl Blossom {
    pub fn is_trivial(&self) -> bool {
        self.children.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Odd cycle of sibling blossoms found in an alternating tree, ready to be
/// contracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSpec {
    pub children: Vec<BlossomId>,
    pub cycle_edges: Vec<(Vertex, Vertex)>,
}

/// The laminar family Ω together with an eagerly maintained root lookup.
#[derive(Clone, Debug)]
pub struct LaminarBlossomSet {
    n: usize,
    blossoms: Vec<Blossom>,
    root: Vec<BlossomId>,
}

impl LaminarBlossomSet {
    /// All-trivial family over `n` vertices.
    pub fn new(n: usize) -> Self {
        let blossoms = (0..n)
            .map(|v| Blossom {
                id: v,
                members: vec![v],
                base: v,
                children: Vec::new(),
                cycle_edges: Vec::new(),
                parent: None,
                alive: true,
            })
            .collect();
        LaminarBlossomSet {
            n,
            blossoms,
            root: (0..n).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of blossom ids handed out so far (dead ones included).
    pub fn id_bound(&self) -> usize {
        self.blossoms.len()
    }

    pub fn root_blossom(&self, v: Vertex) -> Result<BlossomId, BlossomError> {
        self.root.get(v).copied().ok_or(BlossomError::UnknownVertex(v))
    }

    #[inline]
    pub fn root_of(&self, v: Vertex) -> BlossomId {
        self.root[v]
    }

    pub fn get(&self, id: BlossomId) -> &Blossom {
        &self.blossoms[id]
    }

    #[inline]
    pub fn is_trivial(&self, id: BlossomId) -> bool {
        id < self.n
    }

    #[inline]
    pub fn base(&self, id: BlossomId) -> Vertex {
        self.blossoms[id].base
    }

    pub fn members(&self, id: BlossomId) -> &[Vertex] {
        &self.blossoms[id].members
    }

    pub fn is_root(&self, id: BlossomId) -> bool {
        id < self.blossoms.len() && self.blossoms[id].alive && self.blossoms[id].parent.is_none()
    }

    pub fn contains(&self, id: BlossomId, v: Vertex) -> bool {
        self.blossoms[id].members.binary_search(&v).is_ok()
    }

    /// Alive non-trivial blossoms.
    pub fn nontrivial(&self) -> impl Iterator<Item = &Blossom> + '_ {
        self.blossoms[self.n..].iter().filter(|b| b.alive)
    }

    /// Contracts an odd cycle of root blossoms into a new blossom, after
    /// checking the cycle against the current matching.
    pub fn contract(&mut self, spec: CycleSpec, m: &Matching) -> Result<BlossomId, BlossomError> {
        let CycleSpec {
            children,
            cycle_edges,
        } = spec;
        let k = children.len();
        if k < 3 || k % 2 == 0 || cycle_edges.len() != k {
            return Err(BlossomError::Invalid(format!(
                "{k} children with {} cycle edges",
                cycle_edges.len()
            )));
        }
        for &c in &children {
            if !self.is_root(c) {
                return Err(BlossomError::StaleBlossom(c));
            }
        }
        for (i, &(x, y)) in cycle_edges.iter().enumerate() {
            let (a, b) = (children[i], children[(i + 1) % k]);
            if self.root[x] != a || self.root[y] != b {
                return Err(BlossomError::Invalid(format!(
                    "cycle edge {i} = ({x}, {y}) does not join children {a} and {b}"
                )));
            }
            if m.contains(x, y) != (i % 2 == 1) {
                return Err(BlossomError::Invalid(format!(
                    "cycle edge {i} = ({x}, {y}) has the wrong matched status"
                )));
            }
            if i % 2 == 1 && (x != self.base(a) || y != self.base(b)) {
                return Err(BlossomError::Invalid(format!(
                    "matched cycle edge ({x}, {y}) does not join child bases"
                )));
            }
        }
        let mut members: Vec<Vertex> = children
            .iter()
            .flat_map(|&c| self.blossoms[c].members.iter().copied())
            .collect();
        members.sort_unstable();
        let id = self.blossoms.len();
        let base = self.base(children[0]);
        for &c in &children {
            self.blossoms[c].parent = Some(id);
        }
        for &v in &members {
            self.root[v] = id;
        }
        self.blossoms.push(Blossom {
            id,
            members,
            base,
            children,
            cycle_edges,
            parent: None,
            alive: true,
        });
        Ok(id)
    }

    /// Dissolves a root blossom and all blossoms nested in it; its members
    /// become trivial roots again.
    pub fn dissolve(&mut self, id: BlossomId) {
        if self.is_trivial(id) {
            return;
        }
        let mut stack = vec![id];
        while let Some(b) = stack.pop() {
            if self.is_trivial(b) {
                self.blossoms[b].parent = None;
                continue;
            }
            self.blossoms[b].alive = false;
            stack.extend(self.blossoms[b].children.iter().copied());
        }
        for i in 0..self.blossoms[id].members.len() {
            let v = self.blossoms[id].members[i];
            self.root[v] = v;
        }
    }

    /// Index of the child of `id` that contains `x`.
    fn child_index(&self, id: BlossomId, x: Vertex) -> usize {
        let mut c = x;
        while self.blossoms[c].parent != Some(id) {
            c = self.blossoms[c].parent.expect("x is a member of the blossom");
        }
        self.blossoms[id]
            .children
            .iter()
            .position(|&ch| ch == c)
            .expect("parent link is reflected in children")
    }

    /// Appends the even alternating path inside `E_B` from `x` to the base of
    /// `id`. The first edge (if any) is matched.
    fn push_path_to_base(&self, id: BlossomId, x: Vertex, out: &mut Vec<Vertex>) {
        if self.is_trivial(id) {
            out.push(x);
            return;
        }
        let b = &self.blossoms[id];
        let k = b.children.len();
        let j = self.child_index(id, x);
        if j == 0 {
            self.push_path_to_base(b.children[0], x, out);
            return;
        }
        self.push_path_to_base(b.children[j], x, out);
        if j % 2 == 1 {
            // Leave through the matched edge e_j and continue forwards.
            let mut i = j;
            loop {
                let next = i + 1;
                let (_, q) = b.cycle_edges[i];
                let (r, w) = b.cycle_edges[next];
                self.push_path_from_base(b.children[next], r, q, out);
                i = next + 1;
                if i == k {
                    self.push_path_to_base(b.children[0], w, out);
                    return;
                }
                self.push_path_to_base(b.children[i], w, out);
            }
        } else {
            // Leave through the matched edge e_{j-1} and continue backwards.
            let mut i = j;
            loop {
                let prev = i - 1;
                let (p, _) = b.cycle_edges[prev];
                let (r, w) = b.cycle_edges[prev - 1];
                self.push_path_from_base(b.children[prev], w, p, out);
                i = prev - 1;
                self.push_path_to_base(b.children[i], r, out);
                if i == 0 {
                    return;
                }
            }
        }
    }

    /// Appends the even path from the base of `id` (which must equal `from`)
    /// to `target`.
    fn push_path_from_base(&self, id: BlossomId, target: Vertex, from: Vertex, out: &mut Vec<Vertex>) {
        debug_assert_eq!(self.base(id), from);
        let start = out.len();
        self.push_path_to_base(id, target, out);
        out[start..].reverse();
    }

    /// Even alternating path inside the blossom from its base to `target`,
    /// starting with an unmatched edge when non-empty.
    pub fn lift_even_path(&self, id: BlossomId, target: Vertex) -> Result<AltPath, BlossomError> {
        if id >= self.blossoms.len() || !self.blossoms[id].alive {
            return Err(BlossomError::StaleBlossom(id));
        }
        if !self.contains(id, target) {
            return Err(BlossomError::TargetNotInBlossom { blossom: id, target });
        }
        let mut out = Vec::new();
        self.push_path_to_base(id, target, &mut out);
        out.reverse();
        Ok(AltPath::new(out))
    }

    /// Checks oddness, the base property, laminarity and the root lookup.
    pub fn check(&self, m: &Matching) -> Result<(), String> {
        for b in self.blossoms.iter().filter(|b| b.alive) {
            if b.members.len() % 2 == 0 {
                return Err(format!("blossom {} has even size {}", b.id, b.members.len()));
            }
            for &v in &b.members {
                let ok = if v == b.base {
                    m.mate(v).is_none_or(|w| !self.contains(b.id, w))
                } else {
                    m.mate(v).is_some_and(|w| self.contains(b.id, w))
                };
                if !ok {
                    return Err(format!("blossom {} violates the base property at {v}", b.id));
                }
            }
            if !b.is_trivial() {
                let mut union: Vec<Vertex> = Vec::new();
                for &c in &b.children {
                    let child = &self.blossoms[c];
                    if !child.alive || child.parent != Some(b.id) {
                        return Err(format!("blossom {} has a stale child {c}", b.id));
                    }
                    union.extend_from_slice(&child.members);
                }
                union.sort_unstable();
                if union != b.members || union.windows(2).any(|w| w[0] == w[1]) {
                    return Err(format!("blossom {} is not the disjoint union of its children", b.id));
                }
            }
        }
        for v in 0..self.n {
            let mut top = v;
            while let Some(p) = self.blossoms[top].parent {
                top = p;
            }
            if self.root[v] != top {
                return Err(format!("root lookup of {v} is {} but the maximal blossom is {top}", self.root[v]));
            }
        }
        Ok(())
    }

    /// Nested JSON description of the non-trivial root blossoms.
    pub fn to_json(&self) -> serde_json::Value {
        fn node(set: &LaminarBlossomSet, id: BlossomId) -> serde_json::Value {
            let b = set.get(id);
            if b.is_trivial() {
                return serde_json::json!(b.base);
            }
            serde_json::json!({
                "id": id,
                "base": b.base,
                "cycle_edges": b.cycle_edges,
                "children": b.children.iter().map(|&c| node(set, c)).collect::<Vec<_>>(),
            })
        }
        let roots: Vec<_> = self
            .nontrivial()
            .filter(|b| b.parent.is_none())
            .map(|b| node(self, b.id))
            .collect();
        serde_json::Value::Array(roots)
    }
}

/// Read access to an alternating tree whose vertices are root blossoms.
pub trait AltTreeView {
    fn tree_parent(&self, node: BlossomId) -> Option<BlossomId>;
    /// The G-arc realizing the link to the parent, parent-side endpoint first.
    fn tree_parent_arc(&self, node: BlossomId) -> Option<(Vertex, Vertex)>;
    fn is_outer(&self, node: BlossomId) -> bool;
    /// Identifier of the tree containing `node`, if any.
    fn tree_of(&self, node: BlossomId) -> Option<usize>;
}

/// The unique blossom in `T ∪ {(u, v)}` for an arc between two outer vertices
/// of one alternating tree. Children are listed starting at the lowest common
/// ancestor, going down to `Ω(u)` and back up from `Ω(v)`.
pub fn find_cycle_blossom<T: AltTreeView + ?Sized>(
    tree: &T,
    omega: &LaminarBlossomSet,
    u: Vertex,
    v: Vertex,
) -> Result<CycleSpec, BlossomError> {
    let (bu, bv) = (omega.root_of(u), omega.root_of(v));
    if bu == bv {
        return Err(BlossomError::SameBlossom(bu));
    }
    for b in [bu, bv] {
        if !tree.is_outer(b) {
            return Err(BlossomError::NotOuter(b));
        }
    }
    if tree.tree_of(bu).is_none() || tree.tree_of(bu) != tree.tree_of(bv) {
        return Err(BlossomError::DifferentTrees(bu, bv));
    }
    let chain = |mut x: BlossomId| {
        let mut c = vec![x];
        while let Some(p) = tree.tree_parent(x) {
            c.push(p);
            x = p;
        }
        c
    };
    let cu = chain(bu);
    let cv = chain(bv);
    // Strip the common suffix to find the lowest common ancestor.
    let mut iu = cu.len();
    let mut iv = cv.len();
    while iu > 0 && iv > 0 && cu[iu - 1] == cv[iv - 1] {
        iu -= 1;
        iv -= 1;
    }
    let lca = cu[iu];
    let mut children = vec![lca];
    let mut cycle_edges = Vec::new();
    // Down from the LCA to Ω(u): cu[iu-1], ..., cu[0].
    for idx in (0..iu).rev() {
        let node = cu[idx];
        cycle_edges.push(tree.tree_parent_arc(node).expect("non-root has a parent arc"));
        children.push(node);
    }
    cycle_edges.push((u, v));
    // Up from Ω(v) to just below the LCA: cv[0], ..., cv[iv-1].
    for &node in &cv[..iv] {
        children.push(node);
        let (p, c) = tree.tree_parent_arc(node).expect("non-root has a parent arc");
        cycle_edges.push((c, p));
    }
    Ok(CycleSpec {
        children,
        cycle_edges,
    })
}

/// A path in the contracted graph: root blossoms joined by G-edges, plus the
/// G-vertices where it starts and ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractedPath {
    pub nodes: Vec<BlossomId>,
    /// `connectors[i]` joins `nodes[i]` to `nodes[i + 1]`, endpoint in
    /// `nodes[i]` first.
    pub connectors: Vec<(Vertex, Vertex)>,
    pub start: Vertex,
    pub end: Vertex,
}

/// Replaces each blossom on `p` by an even alternating path between its base
/// and the vertex where the path enters or leaves it.
pub fn lift_full_path(omega: &LaminarBlossomSet, p: &ContractedPath) -> Result<AltPath, BlossomError> {
    if p.nodes.is_empty() || p.connectors.len() + 1 != p.nodes.len() {
        return Err(BlossomError::Invalid("malformed contracted path".into()));
    }
    let mut out = Vec::new();
    for (i, &b) in p.nodes.iter().enumerate() {
        if !omega.is_root(b) {
            return Err(BlossomError::StaleBlossom(b));
        }
        let entry = if i == 0 { p.start } else { p.connectors[i - 1].1 };
        let exit = if i + 1 == p.nodes.len() { p.end } else { p.connectors[i].0 };
        for x in [entry, exit] {
            if omega.root_of(x) != b {
                return Err(BlossomError::TargetNotInBlossom { blossom: b, target: x });
            }
        }
        let base = omega.base(b);
        if entry == base {
            let mut seg = Vec::new();
            omega.push_path_to_base(b, exit, &mut seg);
            seg.reverse();
            out.extend(seg);
        } else if exit == base {
            omega.push_path_to_base(b, entry, &mut out);
        } else {
            return Err(BlossomError::InconsistentView { blossom: b, entry, exit });
        }
    }
    Ok(AltPath::new(out))
}

/// The contracted graph `G/Ω` restricted to non-removed vertices, with the
/// contracted matching `M/Ω`.
#[derive(Clone, Debug)]
pub struct ContractedView {
    pub nodes: Vec<BlossomId>,
    pub index: HashMap<BlossomId, usize>,
    pub graph: Graph,
    /// Lexicographically smallest G-edge behind each contracted edge.
    pub witness: BTreeMap<(usize, usize), (Vertex, Vertex)>,
    pub matching: Matching,
}

pub fn contracted_view(g: &Graph, m: &Matching, omega: &LaminarBlossomSet) -> ContractedView {
    let mut nodes: Vec<BlossomId> = (0..g.vertex_count())
        .filter(|&v| !g.is_removed(v))
        .map(|v| omega.root_of(v))
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    let index: HashMap<BlossomId, usize> = nodes.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut witness = BTreeMap::new();
    for (u, v) in g.edges() {
        if g.is_removed(u) || g.is_removed(v) {
            continue;
        }
        let (a, b) = (index[&omega.root_of(u)], index[&omega.root_of(v)]);
        if a != b {
            witness.entry(edge_key(a, b)).or_insert((u, v));
        }
    }
    let mut graph = Graph::new(nodes.len());
    for &(a, b) in witness.keys() {
        graph.add_edge(a, b).expect("keys are distinct non-loop pairs");
    }
    let mut matching = Matching::new(nodes.len());
    for (u, v) in m.edges() {
        if g.is_removed(u) || g.is_removed(v) {
            continue;
        }
        let (a, b) = (index[&omega.root_of(u)], index[&omega.root_of(v)]);
        if a != b {
            matching.insert(a, b).expect("M/Ω is a matching");
        }
    }
    ContractedView {
        nodes,
        index,
        graph,
        witness,
        matching,
    }
}
