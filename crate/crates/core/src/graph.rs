//! Undirected simple graphs with dense vertex ids and phase-local removal flags.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Dense vertex identifier in `[0, n)`.
pub type Vertex = usize;

/// Normalizes an undirected edge so the smaller endpoint comes first.
#[inline]
pub fn edge_key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Read-only adjacency access. Implemented by [`Graph`] and by implicit
/// views such as the bipartite double cover.
pub trait AdjacencyView {
    fn vertex_count(&self) -> usize;
    fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool;
    /// Appends the neighbors of `v` to `out`.
    fn neighbors_into(&self, v: Vertex, out: &mut Vec<Vertex>);
}

/// Undirected simple graph.
///
/// Adjacency lists are kept sorted. The `removed` flags model the hypothetical
/// removal of vertices inside a phase; `live_neighbors` skips them and
/// [`Graph::restore_all`] clears them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
    removed: Vec<bool>,
    removed_count: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    edges: Vec<[Vertex; 2]>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
            adj: vec![Vec::new(); n],
            removed: vec![false; n],
            removed_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: u.max(v),
                n: self.n,
            });
        }
        if u == v {
            return Err(GraphError::SelfLoop { vertex: u });
        }
        if !self.edges.insert(edge_key(u, v)) {
            return Err(GraphError::DuplicateEdge { u, v });
        }
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if !self.edges.remove(&edge_key(u, v)) {
            return Err(GraphError::MissingEdge { u, v });
        }
        if let Ok(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].remove(pos);
        }
        if let Ok(pos) = self.adj[v].binary_search(&u) {
            self.adj[v].remove(pos);
        }
        Ok(())
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    /// Neighbors of `v` in increasing order, removed vertices included.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    /// Neighbors of `v` that are not removed.
    pub fn live_neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().copied().filter(move |&w| !self.removed[w])
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_removed(&self, v: Vertex) -> bool {
        self.removed[v]
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        if !self.removed[v] {
            self.removed[v] = true;
            self.removed_count += 1;
        }
    }

    pub fn removed_count(&self) -> usize {
        self.removed_count
    }

    pub fn restore_all(&mut self) {
        if self.removed_count > 0 {
            self.removed.iter_mut().for_each(|r| *r = false);
            self.removed_count = 0;
        }
    }

    /// Subgraph induced by `subset`, relabelled to `0..subset.len()` in the
    /// order given. Returns the subgraph together with the local-to-global map.
    pub fn induced(&self, subset: &[Vertex]) -> (Graph, Vec<Vertex>) {
        induced_subgraph(self, subset)
    }

    /// Parses the whitespace edge-list format. `#` starts a comment; a
    /// `# n = <count>` comment fixes the vertex count, otherwise it is one more
    /// than the largest id seen.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut declared_n: Option<usize> = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let (body, comment) = match raw.find('#') {
                Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
                None => (raw, None),
            };
            if let Some(c) = comment {
                if let Some(n) = parse_n_directive(c) {
                    declared_n = Some(n);
                }
            }
            let mut fields = body.split_whitespace();
            let Some(first) = fields.next() else {
                continue;
            };
            let second = fields.next().ok_or_else(|| GraphError::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            if fields.next().is_some() {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "trailing fields after vertex pair".into(),
                });
            }
            let u = parse_vertex(first, line_no)?;
            let v = parse_vertex(second, line_no)?;
            pairs.push((line_no, u, v));
        }
        let inferred = pairs.iter().map(|&(_, u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = match declared_n {
            Some(n) if n < inferred => {
                return Err(GraphError::VertexOutOfRange {
                    vertex: inferred - 1,
                    n,
                })
            }
            Some(n) => n,
            None => inferred,
        };
        let mut g = Graph::new(n);
        for (line, u, v) in pairs {
            g.add_edge(u, v).map_err(|e| e.at_line(line))?;
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# n = {}", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_json(text: &str) -> Result<Graph, GraphError> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| GraphError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let edges: Vec<_> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(doc.n, &edges)
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&doc).expect("graph document serializes")
    }

    /// Loads either format, sniffing JSON by a leading `{`.
    pub fn load(text: &str) -> Result<Graph, GraphError> {
        if text.trim_start().starts_with('{') {
            Graph::parse_json(text)
        } else {
            Graph::parse_edge_list(text)
        }
    }
}

fn parse_vertex(field: &str, line: usize) -> Result<Vertex, GraphError> {
    field.parse::<Vertex>().map_err(|_| GraphError::Parse {
        line,
        message: format!("invalid vertex id `{field}`"),
    })
}

fn parse_n_directive(comment: &str) -> Option<usize> {
    let rest = comment.trim().strip_prefix('n')?;
    let rest = rest.trim_start().strip_prefix('=')?;
    rest.trim().parse().ok()
}

impl AdjacencyView for Graph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.has_edge(u, v)
    }

    fn neighbors_into(&self, v: Vertex, out: &mut Vec<Vertex>) {
        out.extend_from_slice(&self.adj[v]);
    }
}

/// Materializes the subgraph of `view` induced by `subset` (duplicates in
/// `subset` are ignored after their first occurrence).
pub fn induced_subgraph<V: AdjacencyView + ?Sized>(view: &V, subset: &[Vertex]) -> (Graph, Vec<Vertex>) {
    let total = view.vertex_count();
    let mut local = vec![usize::MAX; total];
    let mut map = Vec::with_capacity(subset.len());
    for &v in subset {
        if v < total && local[v] == usize::MAX {
            local[v] = map.len();
            map.push(v);
        }
    }
    let mut h = Graph::new(map.len());
    let mut buf = Vec::new();
    for (i, &v) in map.iter().enumerate() {
        buf.clear();
        view.neighbors_into(v, &mut buf);
        for &w in &buf {
            let j = local[w];
            if j != usize::MAX && i < j {
                h.add_edge(i, j).expect("induced edges are simple");
            }
        }
    }
    (h, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_edge_path() {
        let g = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert!(g.vertex_count() >= 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::parse_edge_list("0 0").unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop { vertex: 0 } | GraphError::AtLine { .. }));
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn rejects_duplicate_edge_with_line() {
        let err = Graph::parse_edge_list("0 1\n# c\n1 0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("duplicate"), "{msg}");
    }

    #[test]
    fn parse_error_reports_location() {
        let err = Graph::parse_edge_list("0 1\n2 x\n").unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn petersen_has_fifteen_edges() {
        let text = "\
0 1\n1 2\n2 3\n3 4\n4 0\n\
0 5\n1 6\n2 7\n3 8\n4 9\n\
5 7\n7 9\n9 6\n6 8\n8 5\n";
        let g = Graph::parse_edge_list(text).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert!((0..10).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn json_and_declared_n() {
        let g = Graph::parse_json(r#"{"n": 5, "edges": [[0,1],[3,4]]}"#).unwrap();
        assert_eq!(g.vertex_count(), 5);
        let h = Graph::parse_edge_list("# n = 5\n0 1\n3 4\n").unwrap();
        assert_eq!(g, h);
        assert!(Graph::parse_json(r#"{"n": 2, "edges": [[0,2]]}"#).is_err());
    }

    #[test]
    fn removal_flags_and_restore() {
        let mut g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.remove_vertex(2);
        assert_eq!(g.live_neighbors(1).collect::<Vec<_>>(), vec![0]);
        g.restore_all();
        assert_eq!(g.live_neighbors(1).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(g.removed_count(), 0);
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (h, map) = g.induced(&[3, 2, 0]);
        assert_eq!(map, vec![3, 2, 0]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}
