use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Which end of an edge a half-edge sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Tail,
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub edge: usize,
    pub end: End,
}

/// Vertices `0..vertices`; edges as ordered `(tail, head)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectedGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        Self { vertices, edges }
    }

    /// One vertex carrying `loops` self-loops.
    pub fn bouquet(loops: usize) -> Self {
        Self::new(1, vec![(0, 0); loops])
    }

    /// Two vertices joined by `k` parallel edges `0 → 1`.
    pub fn banana(k: usize) -> Self {
        Self::new(2, vec![(0, 1); k])
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_self_loop(&self, e: usize) -> bool {
        let (t, h) = self.edges[e];
        t == h
    }

    /// Half-edges at `v` in edge order, tail before head on a self-loop.
    pub fn half_edges(&self, v: usize) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for (e, &(t, h)) in self.edges.iter().enumerate() {
            if t == v {
                out.push(HalfEdge { edge: e, end: End::Tail });
            }
            if h == v {
                out.push(HalfEdge { edge: e, end: End::Head });
            }
        }
        out
    }

    /// Number of incident half-edges; a self-loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(t, h)| usize::from(t == v) + usize::from(h == v)).sum()
    }

    /// First edge with an endpoint outside `0..vertices`.
    pub fn first_dangling(&self) -> Option<(usize, End, usize)> {
        self.edges.iter().enumerate().find_map(|(e, &(t, h))| {
            if t >= self.vertices {
                Some((e, End::Tail, t))
            } else if h >= self.vertices {
                Some((e, End::Head, h))
            } else {
                None
            }
        })
    }

    /// Graph with vertex `v` renamed `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self::new(self.vertices, self.edges.iter().map(|&(t, h)| (perm[t], perm[h])).collect())
    }

    /// Graph with edge `k` of the result equal to edge `order[k]` of `self`.
    pub fn reorder_edges(&self, order: &[usize]) -> Self {
        Self::new(self.vertices, order.iter().map(|&e| self.edges[e]).collect())
    }

    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"graph");
        h.update((self.vertices as u64).to_le_bytes());
        for &(t, head) in &self.edges {
            h.update((t as u64).to_le_bytes());
            h.update((head as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeVerdict {
    /// The top component vanishes for degree reasons; the integral is 0.
    ZeroByType,
    Admissible,
}

/// Degree balance for edge forms of antiholomorphic degree `n − 1`.
pub fn degree_selection(graph: &DirectedGraph, n: usize) -> TypeVerdict {
    degree_selection_for(graph, n, n.saturating_sub(1))
}

/// Degree balance `|Γ₁|·edge_degree = n·|Γ₀|`.
pub fn degree_selection_for(graph: &DirectedGraph, n: usize, edge_degree: usize) -> TypeVerdict {
    if graph.edge_count() * edge_degree == n * graph.vertices {
        TypeVerdict::Admissible
    } else {
        TypeVerdict::ZeroByType
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_counts_self_loops_twice() {
        let g = DirectedGraph::new(2, vec![(0, 0), (0, 1), (1, 0)]);
        assert_eq!(g.degree(0), 4);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.half_edges(0).len(), 4);
        assert_eq!(g.half_edges(0)[0], HalfEdge { edge: 0, end: End::Tail });
        assert_eq!(g.half_edges(0)[1], HalfEdge { edge: 0, end: End::Head });
    }

    #[test]
    fn type_verdicts() {
        assert_eq!(degree_selection(&DirectedGraph::banana(1), 1), TypeVerdict::ZeroByType);
        assert_eq!(degree_selection(&DirectedGraph::bouquet(3), 1), TypeVerdict::ZeroByType);
        assert_eq!(degree_selection(&DirectedGraph::bouquet(2), 2), TypeVerdict::Admissible);
        assert_eq!(degree_selection(&DirectedGraph::banana(4), 2), TypeVerdict::Admissible);
        assert_eq!(degree_selection(&DirectedGraph::banana(3), 2), TypeVerdict::ZeroByType);
        assert_eq!(degree_selection(&DirectedGraph::banana(3), 3), TypeVerdict::Admissible);
    }

    #[test]
    fn dangling_endpoint_is_found() {
        let g = DirectedGraph::new(2, vec![(0, 1), (1, 2)]);
        assert_eq!(g.first_dangling(), Some((1, End::Head, 2)));
    }
}
