//! Per-free-vertex structures: alternating trees over root blossoms, labels,
//! marks and the basic operations AUGMENT, CONTRACT and OVERTAKE.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::blossom::{find_cycle_blossom, lift_full_path, AltTreeView, BlossomId, ContractedPath, LaminarBlossomSet};
use crate::error::OpError;
use crate::graph::{Graph, Vertex};
use crate::matching::{AltPath, Matching};
use crate::params::PhaseParams;

pub type StructId = usize;

/// Tree bookkeeping for a root blossom.
#[derive(Clone, Debug, Default)]
struct Node {
    owner: Option<StructId>,
    parent: Option<BlossomId>,
    parent_arc: Option<(Vertex, Vertex)>,
    children: Vec<BlossomId>,
    outer: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Structure {
    pub alpha: Vertex,
    pub root: BlossomId,
    pub working: Option<BlossomId>,
    pub size: usize,
    pub alive: bool,
    pub on_hold: bool,
    pub modified: bool,
    pub extended: bool,
}

/// Which case of OVERTAKE was applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OvertakeCase {
    Unvisited,
    SameStructure,
    OtherStructure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub augment: u64,
    pub contract: u64,
    pub overtake_unvisited: u64,
    pub overtake_same: u64,
    pub overtake_other: u64,
    pub backtrack: u64,
}

impl OpCounts {
    pub fn merge(&mut self, o: &OpCounts) {
        self.augment += o.augment;
        self.contract += o.contract;
        self.overtake_unvisited += o.overtake_unvisited;
        self.overtake_same += o.overtake_same;
        self.overtake_other += o.overtake_other;
        self.backtrack += o.backtrack;
    }
}

/// Contaminated arcs of the current phase. Only compiled in when
/// instrumentation is requested.
#[derive(Clone, Debug, Default)]
pub struct Contamination {
    pub arcs: BTreeSet<(Vertex, Vertex)>,
    pub per_pass_bundle: Vec<usize>,
}

/// Classification of a root blossom relative to the structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Outer(StructId),
    Inner(StructId),
    Unvisited,
    Removed,
}

/// State of one phase: Ω, all structures, labels and the collected paths.
pub struct PhaseState<'a> {
    graph: &'a mut Graph,
    matching: &'a Matching,
    params: PhaseParams,
    omega: LaminarBlossomSet,
    nodes: Vec<Node>,
    structures: Vec<Structure>,
    label: Vec<u32>,
    paths: Vec<AltPath>,
    contamination: Option<Contamination>,
    counts: OpCounts,
    changes: u64,
    /// Run the full invariant check after every operation.
    pub verify_ops: bool,
}

impl<'a> PhaseState<'a> {
    /// Start of a phase: empty path set, every label at `ℓ_max + 1`, and a
    /// singleton structure for every free vertex.
    pub fn new(graph: &'a mut Graph, matching: &'a Matching, params: PhaseParams) -> Self {
        let n = graph.vertex_count();
        let mut st = PhaseState {
            omega: LaminarBlossomSet::new(n),
            nodes: vec![Node::default(); n],
            structures: Vec::new(),
            label: vec![params.unvisited_label(); n],
            paths: Vec::new(),
            contamination: None,
            counts: OpCounts::default(),
            changes: 0,
            verify_ops: cfg!(debug_assertions),
            graph,
            matching,
            params,
        };
        for v in 0..n {
            if matching.is_free(v) && !st.graph.is_removed(v) {
                st.init_structure(v).expect("free vertex");
            }
        }
        st
    }

    /// Starts a structure `({α}, {{α}}, {α})` for a free vertex.
    pub fn init_structure(&mut self, alpha: Vertex) -> Result<StructId, OpError> {
        if !self.matching.is_free(alpha) || self.nodes[alpha].owner.is_some() {
            return Err(OpError::NotFree(alpha));
        }
        if self.graph.is_removed(alpha) {
            return Err(OpError::Removed(alpha));
        }
        let id = self.structures.len();
        self.nodes[alpha] = Node {
            owner: Some(id),
            outer: true,
            ..Node::default()
        };
        self.structures.push(Structure {
            alpha,
            root: alpha,
            working: Some(alpha),
            size: 1,
            alive: true,
            on_hold: false,
            modified: false,
            extended: false,
        });
        Ok(id)
    }

    pub fn enable_contamination(&mut self) {
        self.contamination = Some(Contamination::default());
    }

    pub fn contamination(&self) -> Option<&Contamination> {
        self.contamination.as_ref()
    }

    pub fn contamination_mut(&mut self) -> Option<&mut Contamination> {
        self.contamination.as_mut()
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn matching(&self) -> &Matching {
        self.matching
    }

    pub fn params(&self) -> &PhaseParams {
        &self.params
    }

    pub fn omega(&self) -> &LaminarBlossomSet {
        &self.omega
    }

    pub fn structures(&self) -> &[Structure] {
        &self.structures
    }

    pub fn structure(&self, id: StructId) -> &Structure {
        &self.structures[id]
    }

    pub fn alive_structures(&self) -> impl Iterator<Item = StructId> + '_ {
        (0..self.structures.len()).filter(|&i| self.structures[i].alive)
    }

    pub fn paths(&self) -> &[AltPath] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<AltPath> {
        self.paths
    }

    pub fn counts(&self) -> &OpCounts {
        &self.counts
    }

    /// Number of state changes so far (operations and backtracks).
    pub fn changes(&self) -> u64 {
        self.changes
    }

    /// Label of the matched arc whose tail is `x`.
    pub fn arc_label(&self, x: Vertex) -> u32 {
        self.label[x]
    }

    #[inline]
    pub fn root_of(&self, v: Vertex) -> BlossomId {
        self.omega.root_of(v)
    }

    pub fn node_kind(&self, b: BlossomId) -> NodeKind {
        if self.graph.is_removed(self.omega.base(b)) {
            return NodeKind::Removed;
        }
        let node = &self.nodes[b];
        match node.owner {
            None => NodeKind::Unvisited,
            Some(s) if node.outer => NodeKind::Outer(s),
            Some(s) => NodeKind::Inner(s),
        }
    }

    pub fn vertex_kind(&self, v: Vertex) -> NodeKind {
        if self.graph.is_removed(v) {
            return NodeKind::Removed;
        }
        self.node_kind(self.omega.root_of(v))
    }

    pub fn owner(&self, b: BlossomId) -> Option<StructId> {
        self.nodes[b].owner
    }

    pub fn tree_parent_of(&self, b: BlossomId) -> Option<BlossomId> {
        self.nodes[b].parent
    }

    pub fn tree_children(&self, b: BlossomId) -> &[BlossomId] {
        &self.nodes[b].children
    }

    pub fn parent_arc(&self, b: BlossomId) -> Option<(Vertex, Vertex)> {
        self.nodes[b].parent_arc
    }

    /// The structure whose working vertex is `b`, if any.
    pub fn working_owner(&self, b: BlossomId) -> Option<StructId> {
        let s = self.nodes[b].owner?;
        (self.structures[s].alive && self.structures[s].working == Some(b)).then_some(s)
    }

    /// `ℓ(b')` of an outer root blossom: 0 at the tree root, otherwise the
    /// label of the matched arc entering it.
    pub fn outer_label(&self, b: BlossomId) -> u32 {
        match self.nodes[b].parent {
            None => 0,
            Some(p) => self.label[self.omega.base(p)],
        }
    }

    /// `distance(u)` for a vertex whose root blossom is a working vertex.
    pub fn distance(&self, u: Vertex) -> Result<u32, OpError> {
        let b = self.omega.root_of(u);
        self.working_owner(b).ok_or(OpError::NotWorking(u))?;
        Ok(self.outer_label(b))
    }

    /// True iff `anc` lies on the tree path from `b` to its root.
    pub fn is_ancestor(&self, anc: BlossomId, mut b: BlossomId) -> bool {
        loop {
            if b == anc {
                return true;
            }
            match self.nodes[b].parent {
                Some(p) => b = p,
                None => return false,
            }
        }
    }

    /// Root blossoms of a structure in depth-first order.
    pub fn tree_nodes(&self, s: StructId) -> Vec<BlossomId> {
        if !self.structures[s].alive {
            return Vec::new();
        }
        self.subtree(self.structures[s].root)
    }

    fn subtree(&self, top: BlossomId) -> Vec<BlossomId> {
        let mut out = Vec::new();
        let mut stack = vec![top];
        while let Some(b) = stack.pop() {
            out.push(b);
            stack.extend(self.nodes[b].children.iter().rev().copied());
        }
        out
    }

    /// G-vertices of a structure in increasing order.
    pub fn members(&self, s: StructId) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self
            .tree_nodes(s)
            .into_iter()
            .flat_map(|b| self.omega.members(b).iter().copied())
            .collect();
        vs.sort_unstable();
        vs
    }

    /// G-vertices of a structure whose root blossom is outer.
    pub fn outer_members(&self, s: StructId) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self
            .tree_nodes(s)
            .into_iter()
            .filter(|&b| self.nodes[b].outer)
            .flat_map(|b| self.omega.members(b).iter().copied())
            .collect();
        vs.sort_unstable();
        vs
    }

    /// Root-to-working-vertex path of root blossoms; empty when inactive.
    pub fn active_path(&self, s: StructId) -> Vec<BlossomId> {
        let Some(mut w) = self.structures[s].working else {
            return Vec::new();
        };
        let mut path = vec![w];
        while let Some(p) = self.nodes[w].parent {
            path.push(p);
            w = p;
        }
        path.reverse();
        path
    }

    /// Contracted tree path from the root of `b`'s structure to `x ∈ b`.
    fn root_path(&self, b: BlossomId, x: Vertex) -> ContractedPath {
        let mut nodes = vec![b];
        let mut connectors = Vec::new();
        let mut cur = b;
        while let Some(p) = self.nodes[cur].parent {
            connectors.push(self.nodes[cur].parent_arc.expect("parent arc"));
            nodes.push(p);
            cur = p;
        }
        nodes.reverse();
        connectors.reverse();
        let alpha = self.omega.base(cur);
        ContractedPath {
            nodes,
            connectors,
            start: alpha,
            end: x,
        }
    }

    fn check_unmatched_edge(&self, u: Vertex, v: Vertex) -> Result<(), OpError> {
        let n = self.graph.vertex_count();
        if u >= n || v >= n || !self.graph.has_edge(u, v) || self.matching.contains(u, v) {
            return Err(OpError::NotUnmatchedEdge { u, v });
        }
        for x in [u, v] {
            if self.graph.is_removed(x) {
                return Err(OpError::Removed(x));
            }
        }
        Ok(())
    }

    fn after_op(&mut self) {
        self.changes += 1;
        if self.verify_ops {
            if let Err(e) = self.check_invariants() {
                panic!("structure invariant broken after an operation: {e}");
            }
        }
    }

    /// AUGMENT on the unmatched arc `(u, v)` joining outer vertices of two
    /// different structures. Returns the index of the new path.
    pub fn op_augment(&mut self, u: Vertex, v: Vertex) -> Result<usize, OpError> {
        self.check_unmatched_edge(u, v)?;
        let (bu, bv) = (self.root_of(u), self.root_of(v));
        let (a, b) = match (self.node_kind(bu), self.node_kind(bv)) {
            (NodeKind::Outer(a), NodeKind::Outer(b)) if a != b => (a, b),
            (NodeKind::Outer(a), NodeKind::Outer(_)) => {
                return Err(OpError::Augment(format!("both endpoints lie in structure {a}")))
            }
            _ => return Err(OpError::Augment(format!("({u}, {v}) does not join two outer vertices"))),
        };
        let pu = self.root_path(bu, u);
        let pv = self.root_path(bv, v);
        let mut nodes = pu.nodes;
        nodes.extend(pv.nodes.iter().rev());
        let mut connectors = pu.connectors;
        connectors.push((u, v));
        connectors.extend(pv.connectors.iter().rev().map(|&(x, y)| (y, x)));
        let cp = ContractedPath {
            nodes,
            connectors,
            start: pu.start,
            end: pv.start,
        };
        let path = lift_full_path(&self.omega, &cp)?;
        path.validate_augmenting(self.graph, self.matching)?;
        self.paths.push(path);
        for s in [a, b] {
            self.remove_structure(s);
        }
        self.counts.augment += 1;
        self.after_op();
        Ok(self.paths.len() - 1)
    }

    fn remove_structure(&mut self, s: StructId) {
        for b in self.tree_nodes(s) {
            for i in 0..self.omega.members(b).len() {
                let x = self.omega.members(b)[i];
                self.graph.remove_vertex(x);
            }
            self.omega.dissolve(b);
            self.nodes[b] = Node::default();
        }
        let st = &mut self.structures[s];
        st.alive = false;
        st.working = None;
        st.size = 0;
        st.modified = true;
        st.extended = true;
    }

    /// CONTRACT on the unmatched arc `(u, v)` between two outer vertices of
    /// one structure, `Ω(u)` being its working vertex.
    pub fn op_contract(&mut self, u: Vertex, v: Vertex) -> Result<BlossomId, OpError> {
        self.check_unmatched_edge(u, v)?;
        let (bu, bv) = (self.root_of(u), self.root_of(v));
        if bu == bv {
            return Err(OpError::Contract(format!("({u}, {v}) is a blossom arc")));
        }
        let s = match (self.node_kind(bu), self.node_kind(bv)) {
            (NodeKind::Outer(a), NodeKind::Outer(b)) if a == b => a,
            (NodeKind::Outer(_), NodeKind::Outer(_)) => {
                return Err(OpError::Contract("endpoints lie in different structures".into()))
            }
            _ => return Err(OpError::Contract("endpoints are not both outer".into())),
        };
        if self.structures[s].working != Some(bu) {
            return Err(OpError::Contract(format!("root blossom of {u} is not the working vertex")));
        }
        let spec = find_cycle_blossom(&*self, &self.omega, u, v)?;
        let lca = spec.children[0];
        let cycle = spec.children.clone();
        let id = self.omega.contract(spec, self.matching)?;
        if self.nodes.len() <= id {
            self.nodes.resize(id + 1, Node::default());
        }
        let mut children = Vec::new();
        for &c in &cycle {
            for &ch in &self.nodes[c].children {
                if !cycle.contains(&ch) {
                    children.push(ch);
                }
            }
        }
        for &ch in &children {
            self.nodes[ch].parent = Some(id);
        }
        let parent = self.nodes[lca].parent;
        if let Some(p) = parent {
            for ch in self.nodes[p].children.iter_mut() {
                if *ch == lca {
                    *ch = id;
                }
            }
        }
        self.nodes[id] = Node {
            owner: Some(s),
            parent,
            parent_arc: self.nodes[lca].parent_arc,
            children,
            outer: true,
        };
        for &c in &cycle {
            self.nodes[c] = Node::default();
        }
        let base = self.omega.base(id);
        for i in 0..self.omega.members(id).len() {
            let x = self.omega.members(id)[i];
            if x != base {
                self.label[x] = 0;
            }
        }
        let st = &mut self.structures[s];
        if st.root == lca {
            st.root = id;
        }
        st.working = Some(id);
        st.modified = true;
        st.extended = true;
        self.counts.contract += 1;
        self.after_op();
        Ok(id)
    }

    /// OVERTAKE through the unmatched arc `(u, v)` and the matched arc
    /// `(v, mate(v))`, setting the latter's label to `k`.
    pub fn op_overtake(&mut self, u: Vertex, v: Vertex, k: u32) -> Result<OvertakeCase, OpError> {
        self.check_unmatched_edge(u, v)?;
        let bu = self.root_of(u);
        let a = self.working_owner(bu).ok_or(OpError::OvertakeP1(u))?;
        let bv = self.root_of(v);
        if bv == bu {
            return Err(OpError::OvertakeP2(format!("({u}, {v}) is a blossom arc")));
        }
        let kind = self.node_kind(bv);
        if !self.omega.is_trivial(bv) {
            return Err(OpError::OvertakeP2(format!("root blossom of {v} is not trivial")));
        }
        if matches!(kind, NodeKind::Outer(_)) {
            return Err(OpError::OvertakeP2(format!("root blossom of {v} is outer")));
        }
        let t = self
            .matching
            .mate(v)
            .ok_or_else(|| OpError::OvertakeP2(format!("{v} is free")))?;
        if kind == NodeKind::Inner(a) && self.is_ancestor(bv, bu) {
            return Err(OpError::OvertakeP2(format!("{v} is an ancestor of the working vertex")));
        }
        if k >= self.label[v] {
            return Err(OpError::OvertakeP3 { k, label: self.label[v] });
        }
        self.label[v] = k;
        let case = match kind {
            NodeKind::Unvisited => {
                let bt = self.root_of(t);
                if bt != t || self.nodes[t].owner.is_some() {
                    return Err(OpError::OvertakeP2(format!("mate {t} of unvisited {v} is visited")));
                }
                self.nodes[v] = Node {
                    owner: Some(a),
                    parent: Some(bu),
                    parent_arc: Some((u, v)),
                    children: vec![t],
                    outer: false,
                };
                self.nodes[t] = Node {
                    owner: Some(a),
                    parent: Some(v),
                    parent_arc: Some((v, t)),
                    children: Vec::new(),
                    outer: true,
                };
                self.nodes[bu].children.push(v);
                let st = &mut self.structures[a];
                st.size += 2;
                st.working = Some(t);
                st.modified = true;
                st.extended = true;
                self.counts.overtake_unvisited += 1;
                OvertakeCase::Unvisited
            }
            NodeKind::Inner(b) => {
                let p = self.nodes[bv].parent.expect("inner vertex has a parent");
                let bt = self.nodes[bv].children[0];
                let working_b = self.structures[b].working;
                let moved_working = b != a && working_b.is_some_and(|w| self.is_ancestor(bv, w));
                self.nodes[p].children.retain(|&c| c != bv);
                self.nodes[bv].parent = Some(bu);
                self.nodes[bv].parent_arc = Some((u, v));
                self.nodes[bu].children.push(bv);
                if b == a {
                    let st = &mut self.structures[a];
                    st.working = Some(bt);
                    st.modified = true;
                    st.extended = true;
                    self.counts.overtake_same += 1;
                    OvertakeCase::SameStructure
                } else {
                    let mut moved = 0;
                    for node in self.subtree(bv) {
                        self.nodes[node].owner = Some(a);
                        moved += self.omega.members(node).len();
                    }
                    self.structures[b].size -= moved;
                    self.structures[a].size += moved;
                    if moved_working {
                        self.structures[a].working = working_b;
                        self.structures[b].working = Some(p);
                    } else {
                        self.structures[a].working = Some(bt);
                    }
                    self.structures[a].modified = true;
                    self.structures[a].extended = true;
                    self.structures[b].modified = true;
                    self.counts.overtake_other += 1;
                    OvertakeCase::OtherStructure
                }
            }
            NodeKind::Outer(_) | NodeKind::Removed => unreachable!("filtered above"),
        };
        self.after_op();
        Ok(case)
    }

    /// Moves the working vertex to its grandparent, or clears it at the root.
    pub fn backtrack(&mut self, s: StructId) {
        let Some(w) = self.structures[s].working else {
            return;
        };
        let next = self.nodes[w].parent.map(|p| self.nodes[p].parent.expect("inner vertex has a parent"));
        self.structures[s].working = next;
        self.counts.backtrack += 1;
        self.changes += 1;
    }

    /// Resets the per-pass-bundle marks.
    pub fn mark_for_pass_bundle(&mut self, s: StructId) {
        let limit = self.params.limit_h;
        let st = &mut self.structures[s];
        st.on_hold = st.size >= limit;
        st.modified = false;
        st.extended = false;
    }

    /// Checks every structural invariant; returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.omega.check(self.matching)?;
        let n = self.graph.vertex_count();
        let mut seen = vec![false; n];
        let mut owned_nodes = 0usize;
        for (s, st) in self.structures.iter().enumerate() {
            if !st.alive {
                continue;
            }
            if !self.omega.is_root(st.root) || self.omega.base(st.root) != st.alpha {
                return Err(format!("structure {s}: root blossom does not have α = {} as base", st.alpha));
            }
            if self.nodes[st.root].parent.is_some() || !self.nodes[st.root].outer {
                return Err(format!("structure {s}: root is not an outer tree root"));
            }
            let mut size = 0;
            for b in self.tree_nodes(s) {
                owned_nodes += 1;
                let node = &self.nodes[b];
                if node.owner != Some(s) {
                    return Err(format!("structure {s}: node {b} has owner {:?}", node.owner));
                }
                if !self.omega.is_root(b) {
                    return Err(format!("structure {s}: node {b} is not a root blossom"));
                }
                for &x in self.omega.members(b) {
                    if seen[x] {
                        return Err(format!("vertex {x} is in two structures"));
                    }
                    if self.graph.is_removed(x) {
                        return Err(format!("removed vertex {x} is still in structure {s}"));
                    }
                    seen[x] = true;
                    size += 1;
                }
                if node.outer {
                    for &c in &node.children {
                        let child = &self.nodes[c];
                        if child.outer || !self.omega.is_trivial(c) {
                            return Err(format!("structure {s}: child {c} of outer {b} is not a trivial inner vertex"));
                        }
                    }
                    if !self.omega.is_trivial(b) {
                        for &x in self.omega.members(b) {
                            if x != self.omega.base(b) && self.label[x] != 0 {
                                return Err(format!("matched arc at {x} inside blossom {b} has a non-zero label"));
                            }
                        }
                    }
                } else {
                    if node.children.len() != 1 {
                        return Err(format!("structure {s}: inner {b} has {} children", node.children.len()));
                    }
                    let c = node.children[0];
                    if !self.nodes[c].outer || self.matching.mate(b) != Some(self.omega.base(c)) {
                        return Err(format!("structure {s}: inner {b} is not matched to the base of its child"));
                    }
                }
                for &c in &node.children {
                    if self.nodes[c].parent != Some(b) {
                        return Err(format!("structure {s}: parent link of {c} disagrees"));
                    }
                }
                if let Some(p) = node.parent {
                    let (x, y) = node.parent_arc.ok_or(format!("node {b} lacks a parent arc"))?;
                    if self.root_of(x) != p || self.root_of(y) != b || !self.graph.has_edge(x, y) {
                        return Err(format!("structure {s}: parent arc ({x}, {y}) of {b} does not realize the tree link"));
                    }
                    if self.matching.contains(x, y) == node.outer {
                        continue;
                    }
                    return Err(format!("structure {s}: parent arc ({x}, {y}) of {b} breaks alternation"));
                }
            }
            if size != st.size {
                return Err(format!("structure {s}: recorded size {} but {size} members", st.size));
            }
            if size > self.params.delta_h {
                return Err(format!("structure {s}: size {size} exceeds Δ_h = {}", self.params.delta_h));
            }
            if let Some(w) = st.working {
                if self.nodes[w].owner != Some(s) || !self.nodes[w].outer || !self.omega.is_root(w) {
                    return Err(format!("structure {s}: working vertex {w} is not an outer vertex"));
                }
            }
        }
        let stray = self.nodes.iter().filter(|nd| nd.owner.is_some()).count();
        if stray != owned_nodes {
            return Err(format!("{} tree nodes are owned but unreachable", stray - owned_nodes));
        }
        for x in 0..n {
            if self.label[x] > self.params.unvisited_label() {
                return Err(format!("label at {x} exceeds ℓ_max + 1"));
            }
        }
        let mut used = vec![false; n];
        for p in &self.paths {
            for &x in p.vertices() {
                if used[x] {
                    return Err(format!("augmenting paths share vertex {x}"));
                }
                used[x] = true;
            }
            p.validate_augmenting(self.graph, self.matching)
                .map_err(|e| format!("collected path is not augmenting: {e}"))?;
        }
        Ok(())
    }

    /// JSON dump of every live structure.
    pub fn dump(&self) -> serde_json::Value {
        let structures: Vec<_> = self
            .alive_structures()
            .map(|s| {
                let st = &self.structures[s];
                let tree: Vec<_> = self
                    .tree_nodes(s)
                    .into_iter()
                    .map(|b| {
                        serde_json::json!({
                            "node": b,
                            "members": self.omega.members(b),
                            "outer": self.nodes[b].outer,
                            "parent": self.nodes[b].parent,
                            "parent_arc": self.nodes[b].parent_arc,
                        })
                    })
                    .collect();
                let active: Vec<_> = self
                    .active_path(s)
                    .into_iter()
                    .filter(|&b| !self.nodes[b].outer)
                    .map(|b| serde_json::json!({"tail": b, "label": self.label[b]}))
                    .collect();
                serde_json::json!({
                    "alpha": st.alpha,
                    "working": st.working,
                    "size": st.size,
                    "on_hold": st.on_hold,
                    "modified": st.modified,
                    "extended": st.extended,
                    "tree": tree,
                    "active_labels": active,
                })
            })
            .collect();
        serde_json::json!({ "structures": structures, "blossoms": self.omega.to_json() })
    }
}

impl AltTreeView for PhaseState<'_> {
    fn tree_parent(&self, node: BlossomId) -> Option<BlossomId> {
        self.nodes[node].parent
    }

    fn tree_parent_arc(&self, node: BlossomId) -> Option<(Vertex, Vertex)> {
        self.nodes[node].parent_arc
    }

    fn is_outer(&self, node: BlossomId) -> bool {
        self.nodes[node].owner.is_some() && self.nodes[node].outer
    }

    fn tree_of(&self, node: BlossomId) -> Option<usize> {
        self.nodes[node].owner
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Constants, Epsilon};

    fn params() -> PhaseParams {
        PhaseParams::new(Epsilon::new(0.25).unwrap(), 1, &Constants::default())
    }

    #[test]
    fn init_and_active_path() {
        let mut g = Graph::from_edges(8, &[(6, 7)]).unwrap();
        let m = Matching::from_edges(&g, &[(6, 7)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        let s = st.alive_structures().find(|&s| st.structure(s).alpha == 5).unwrap();
        assert_eq!(st.members(s), vec![5]);
        assert_eq!(st.structure(s).working, Some(5));
        assert_eq!(st.active_path(s), vec![5]);
        assert_eq!(st.init_structure(6), Err(OpError::NotFree(6)));
        st.backtrack(s);
        assert!(st.active_path(s).is_empty());
    }

    #[test]
    fn augment_two_singletons() {
        let mut g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let m = Matching::new(2);
        let mut st = PhaseState::new(&mut g, &m, params());
        st.op_augment(0, 1).unwrap();
        assert_eq!(st.paths()[0].vertices(), &[0, 1]);
        assert_eq!(st.alive_structures().count(), 0);
        assert!(st.graph().is_removed(0) && st.graph().is_removed(1));
    }

    #[test]
    fn overtake_case_one_then_augment() {
        // α=0 - 1 = 2 - 3 = 4 - β=5
        let mut g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        assert_eq!(st.op_overtake(0, 1, 1), Ok(OvertakeCase::Unvisited));
        let s = st.owner(0).unwrap();
        assert_eq!(st.members(s), vec![0, 1, 2]);
        assert_eq!(st.structure(s).working, Some(2));
        assert_eq!(st.arc_label(1), 1);
        assert_eq!(st.active_path(s), vec![0, 1, 2]);
        assert_eq!(st.distance(2), Ok(1));
        assert_eq!(st.op_overtake(5, 4, 1), Ok(OvertakeCase::Unvisited));
        st.op_augment(2, 3).unwrap();
        assert_eq!(st.paths()[0].vertices(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn overtake_preconditions() {
        let mut g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        let l = st.arc_label(1);
        assert_eq!(st.op_overtake(0, 1, l), Err(OpError::OvertakeP3 { k: l, label: l }));
        assert_eq!(st.op_overtake(1, 0, 1), Err(OpError::OvertakeP1(1)));
        assert!(matches!(st.op_overtake(0, 3, 1), Err(OpError::NotUnmatchedEdge { .. })));
    }

    #[test]
    fn contract_triangle_sets_labels() {
        // α=0 adjacent to 1, 2; matched (1, 2).
        let mut g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        st.op_overtake(0, 1, 1).unwrap();
        assert!(matches!(st.op_contract(0, 2), Err(OpError::Contract(_))));
        let b = st.op_contract(2, 0).unwrap();
        assert_eq!(st.omega().members(b), &[0, 1, 2]);
        assert_eq!(st.arc_label(1), 0);
        assert_eq!(st.arc_label(2), 0);
        assert_eq!(st.structure(0).working, Some(b));
        assert_eq!(st.distance(1), Ok(0));
        assert!(st.op_contract(2, 0).is_err());
    }

    #[test]
    fn distance_through_blossom() {
        // α=0 - 1 = 2, 2 adjacent to triangle closure: 2 - 3 = 4, 4 - 2
        let mut g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 2)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        st.op_overtake(0, 1, 1).unwrap();
        st.op_overtake(2, 3, 2).unwrap();
        let b = st.op_contract(4, 2).unwrap();
        assert_eq!(st.omega().base(b), 2);
        assert_eq!(st.distance(3), Ok(1));
        assert_eq!(st.arc_label(3), 0);
    }

    #[test]
    fn overtake_other_structure_moves_working_vertex() {
        // β=0 - 1 = 2 - 3 = 4 (β's active path, working at 4)
        // α=5 - 6 = 7 - 3: α overtakes inner 3 with a smaller label.
        let mut g =
            Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 3)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4), (6, 7)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        let beta = st.owner(0).unwrap();
        let alpha = st.owner(5).unwrap();
        st.op_overtake(0, 1, 5).unwrap();
        st.op_overtake(2, 3, 8).unwrap();
        st.op_overtake(5, 6, 1).unwrap();
        st.mark_for_pass_bundle(alpha);
        st.mark_for_pass_bundle(beta);
        assert_eq!(st.op_overtake(7, 3, 2), Ok(OvertakeCase::OtherStructure));
        assert_eq!(st.structure(alpha).working, Some(4));
        assert_eq!(st.structure(beta).working, Some(2));
        assert_eq!(st.members(alpha), vec![3, 4, 5, 6, 7]);
        assert_eq!(st.members(beta), vec![0, 1, 2]);
        assert!(st.structure(alpha).extended && st.structure(alpha).modified);
        assert!(st.structure(beta).modified && !st.structure(beta).extended);
        st.check_invariants().unwrap();
    }

    #[test]
    fn mark_and_backtrack() {
        let mut g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4)]).unwrap();
        let mut st = PhaseState::new(&mut g, &m, params());
        st.op_overtake(0, 1, 1).unwrap();
        st.op_overtake(2, 3, 2).unwrap();
        st.mark_for_pass_bundle(0);
        assert!(!st.structure(0).on_hold && !st.structure(0).extended);
        assert_eq!(st.active_path(0).len(), 5);
        st.backtrack(0);
        assert_eq!(st.structure(0).working, Some(2));
        st.backtrack(0);
        assert_eq!(st.structure(0).working, Some(0));
        st.backtrack(0);
        assert_eq!(st.structure(0).working, None);
    }
}
