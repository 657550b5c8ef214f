//! Matchings, arcs and alternating paths.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{MatchingError, PathError};
use crate::graph::{edge_key, Graph, Vertex};

/// A matching stored as a mate array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    mate: Vec<Option<Vertex>>,
    size: usize,
}

impl Matching {
    pub fn new(n: usize) -> Self {
        Matching {
            mate: vec![None; n],
            size: 0,
        }
    }

    /// Builds a matching of `g` from an edge list, validating it.
    pub fn from_edges(g: &Graph, edges: &[(Vertex, Vertex)]) -> Result<Self, MatchingError> {
        let mut m = Matching::new(g.vertex_count());
        for &(u, v) in edges {
            if !g.has_edge(u, v) {
                return Err(MatchingError::NotAnEdge { u, v });
            }
            m.insert(u, v)?;
        }
        Ok(m)
    }

    pub fn vertex_count(&self) -> usize {
        self.mate.len()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn mate(&self, v: Vertex) -> Option<Vertex> {
        self.mate[v]
    }

    #[inline]
    pub fn is_free(&self, v: Vertex) -> bool {
        self.mate[v].is_none()
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        u < self.mate.len() && self.mate[u] == Some(v)
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) -> Result<(), MatchingError> {
        if u == v {
            return Err(MatchingError::SharedVertex { vertex: u });
        }
        for x in [u, v] {
            if self.mate[x].is_some() {
                return Err(MatchingError::SharedVertex { vertex: x });
            }
        }
        self.mate[u] = Some(v);
        self.mate[v] = Some(u);
        self.size += 1;
        Ok(())
    }

    pub fn remove(&mut self, u: Vertex, v: Vertex) -> bool {
        if self.contains(u, v) {
            self.mate[u] = None;
            self.mate[v] = None;
            self.size -= 1;
            true
        } else {
            false
        }
    }

    /// Matched edges as `(min, max)` pairs in increasing order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.mate
            .iter()
            .enumerate()
            .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
            .collect()
    }

    /// Flips `path` in place. `path` must be an augmenting path of this
    /// matching in `g`.
    pub fn augment(&mut self, g: &Graph, path: &AltPath) -> Result<(), PathError> {
        path.validate_augmenting(g, self)?;
        let vs = path.vertices();
        for i in (1..vs.len() - 1).step_by(2) {
            self.remove(vs[i], vs[i + 1]);
        }
        for i in (0..vs.len()).step_by(2) {
            let (u, v) = (vs[i], vs[i + 1]);
            self.mate[u] = Some(v);
            self.mate[v] = Some(u);
            self.size += 1;
        }
        Ok(())
    }

    /// Validity with respect to `g`: every matched pair is an edge and the mate
    /// array is symmetric.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        if self.mate.len() != g.vertex_count() {
            return false;
        }
        let mut count = 0;
        for (u, m) in self.mate.iter().enumerate() {
            if let Some(v) = *m {
                if self.mate[v] != Some(u) || !g.has_edge(u, v) {
                    return false;
                }
                count += 1;
            }
        }
        count == 2 * self.size
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// True iff every edge of `edges` is in `g` and no vertex is covered twice.
pub fn is_matching(g: &Graph, edges: &[(Vertex, Vertex)]) -> bool {
    let mut used = vec![false; g.vertex_count()];
    for &(u, v) in edges {
        if !g.has_edge(u, v) || used[u] || used[v] {
            return false;
        }
        used[u] = true;
        used[v] = true;
    }
    true
}

/// Non-removed vertices not covered by `m`.
pub fn free_vertices(g: &Graph, m: &Matching) -> Vec<Vertex> {
    (0..g.vertex_count())
        .filter(|&v| !g.is_removed(v) && m.is_free(v))
        .collect()
}

/// Returns `m` augmented along `p`.
pub fn augment_along(g: &Graph, m: &Matching, p: &AltPath) -> Result<Matching, PathError> {
    let mut out = m.clone();
    out.augment(g, p)?;
    Ok(out)
}

/// A directed copy of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
    pub matched: bool,
}

impl Arc {
    pub fn new(tail: Vertex, head: Vertex, m: &Matching) -> Self {
        Arc {
            tail,
            head,
            matched: m.contains(tail, head),
        }
    }

    pub fn reverse(self) -> Self {
        Arc {
            tail: self.head,
            head: self.tail,
            matched: self.matched,
        }
    }

    pub fn key(self) -> (Vertex, Vertex) {
        edge_key(self.tail, self.head)
    }
}

/// An alternating path stored as its full vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AltPath {
    vertices: Vec<Vertex>,
}

impl AltPath {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        AltPath { vertices }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn reversed(&self) -> AltPath {
        let mut v = self.vertices.clone();
        v.reverse();
        AltPath { vertices: v }
    }

    /// Checks simplicity, edge existence and alternation. Returns whether the
    /// first edge is matched (`None` for a single vertex).
    pub fn validate(&self, g: &Graph, m: &Matching) -> Result<Option<bool>, PathError> {
        if self.vertices.is_empty() {
            return Err(PathError::Empty);
        }
        let mut seen = vec![false; g.vertex_count()];
        for &v in &self.vertices {
            if v >= seen.len() || seen[v] {
                return Err(PathError::RepeatedVertex(v));
            }
            seen[v] = true;
        }
        let mut first = None;
        for (i, (u, v)) in self.edges().enumerate() {
            if !g.has_edge(u, v) {
                return Err(PathError::MissingEdge { u, v });
            }
            let matched = m.contains(u, v);
            let f = *first.get_or_insert(matched);
            if matched != ((i % 2 == 0) == f) {
                return Err(PathError::NotAlternating { u, v, position: i });
            }
        }
        Ok(first)
    }

    pub fn validate_augmenting(&self, g: &Graph, m: &Matching) -> Result<(), PathError> {
        if self.vertices.is_empty() {
            return Err(PathError::Empty);
        }
        if self.vertices.len() % 2 != 0 {
            return Err(PathError::OddLength(self.vertices.len()));
        }
        let first = self.vertices[0];
        let last = *self.vertices.last().unwrap();
        for end in [first, last] {
            if !m.is_free(end) {
                return Err(PathError::EndpointNotFree(end));
            }
        }
        self.validate(g, m)?;
        Ok(())
    }

    /// Compressed form: the matched arcs in path order.
    pub fn matched_arcs(&self, m: &Matching) -> Vec<Arc> {
        self.edges()
            .filter(|&(u, v)| m.contains(u, v))
            .map(|(u, v)| Arc {
                tail: u,
                head: v,
                matched: true,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn is_matching_examples() {
        let g = path(3);
        assert!(is_matching(&g, &[]));
        assert!(!is_matching(&g, &[(0, 1), (1, 2)]));
        assert!(is_matching(&path(4), &[(0, 1), (2, 3)]));
    }

    #[test]
    fn free_vertex_examples() {
        let g = path(3);
        let m = Matching::from_edges(&g, &[(0, 1)]).unwrap();
        assert_eq!(free_vertices(&g, &m), vec![2]);

        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let m = Matching::from_edges(&k4, &[(0, 1), (2, 3)]).unwrap();
        assert!(free_vertices(&k4, &m).is_empty());

        let g = path(5);
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        assert_eq!(free_vertices(&g, &m), vec![0, 3, 4]);
    }

    #[test]
    fn augment_examples() {
        let g = path(4);
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        let m2 = augment_along(&g, &m, &AltPath::new(vec![0, 1, 2, 3])).unwrap();
        assert_eq!(m2.edges(), vec![(0, 1), (2, 3)]);
        assert_eq!(m2.len(), 2);

        let g = path(2);
        let m2 = augment_along(&g, &Matching::new(2), &AltPath::new(vec![0, 1])).unwrap();
        assert_eq!(m2.edges(), vec![(0, 1)]);

        let g = path(4);
        let m = Matching::from_edges(&g, &[(0, 1)]).unwrap();
        let err = augment_along(&g, &m, &AltPath::new(vec![1, 2])).unwrap_err();
        assert_eq!(err, PathError::EndpointNotFree(1));
    }

    #[test]
    fn rejects_non_alternating_and_repeats() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = Matching::new(4);
        assert!(matches!(
            augment_along(&g, &m, &AltPath::new(vec![0, 1, 2, 3])),
            Err(PathError::NotAlternating { .. })
        ));
        assert!(matches!(
            AltPath::new(vec![0, 1, 0]).validate(&g, &m),
            Err(PathError::RepeatedVertex(0))
        ));
    }

    #[test]
    fn compressed_form_lists_matched_arcs() {
        let g = path(6);
        let m = Matching::from_edges(&g, &[(1, 2), (3, 4)]).unwrap();
        let p = AltPath::new(vec![0, 1, 2, 3, 4, 5]);
        let arcs = p.matched_arcs(&m);
        assert_eq!(arcs.len(), 2);
        assert_eq!((arcs[0].tail, arcs[0].head), (1, 2));
        assert_eq!(arcs[1].reverse().tail, 4);
    }
}
