use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::density::LagrangianDensity;
use crate::graph::{DirectedGraph, End, HalfEdge};

/// First violated invariant of a [`GraphAssignment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    DanglingEndpoint { edge: usize, end: End, vertex: usize },
    DensityCount { vertices: usize, densities: usize },
    DegreeMismatch { vertex: usize, density: usize, graph: usize },
    SlotDimension { vertex: usize, slot: usize, expected: usize, got: usize },
    SlotMapLength { vertex: usize, expected: usize, got: usize },
    SlotMapNotBijective { vertex: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DanglingEndpoint { edge, end, vertex } => {
                write!(f, "edge {edge}: {end:?} index {vertex} is not a vertex")
            }
            Self::DensityCount { vertices, densities } => {
                write!(f, "{densities} densities for {vertices} vertices")
            }
            Self::DegreeMismatch { vertex, density, graph } => {
                write!(f, "vertex {vertex}: density degree {density} but {graph} incident half-edges")
            }
            Self::SlotDimension { vertex, slot, expected, got } => {
                write!(f, "vertex {vertex} slot {slot}: multi-index of length {got}, expected {expected}")
            }
            Self::SlotMapLength { vertex, expected, got } => {
                write!(f, "vertex {vertex}: slot map of length {got}, expected {expected}")
            }
            Self::SlotMapNotBijective { vertex } => write!(f, "vertex {vertex}: slot map is not a bijection"),
        }
    }
}

/// A graph with a density per vertex and an explicit half-edge to slot map.
///
/// `slot_maps[v][k]` is the slot taken by the `k`-th half-edge of
/// [`DirectedGraph::half_edges`]`(v)`. An empty `slot_maps` means identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphAssignment {
    pub n: usize,
    pub graph: DirectedGraph,
    pub densities: Vec<LagrangianDensity>,
    #[serde(default)]
    pub slot_maps: Vec<Vec<usize>>,
}

impl GraphAssignment {
    pub fn new(n: usize, graph: DirectedGraph, densities: Vec<LagrangianDensity>) -> Self {
        Self { n, graph, densities, slot_maps: Vec::new() }
    }

    /// Trivial densities of the matching degree at every vertex.
    pub fn trivial(n: usize, graph: DirectedGraph) -> Self {
        let densities = (0..graph.vertices).map(|v| LagrangianDensity::trivial(graph.degree(v), n)).collect();
        Self::new(n, graph, densities)
    }

    pub fn with_slot_maps(mut self, maps: Vec<Vec<usize>>) -> Self {
        self.slot_maps = maps;
        self
    }

    /// `None` when every invariant holds, otherwise the first violation.
    pub fn validate(&self) -> Option<Diagnostic> {
        let g = &self.graph;
        if let Some((edge, end, vertex)) = g.first_dangling() {
            return Some(Diagnostic::DanglingEndpoint { edge, end, vertex });
        }
        if self.densities.len() != g.vertices {
            return Some(Diagnostic::DensityCount { vertices: g.vertices, densities: self.densities.len() });
        }
        if !self.slot_maps.is_empty() && self.slot_maps.len() != g.vertices {
            return Some(Diagnostic::SlotMapLength { vertex: self.slot_maps.len().min(g.vertices), expected: g.vertices, got: self.slot_maps.len() });
        }
        for (v, d) in self.densities.iter().enumerate() {
            let deg = g.degree(v);
            if d.degree() != deg {
                return Some(Diagnostic::DegreeMismatch { vertex: v, density: d.degree(), graph: deg });
            }
            if let Some((slot, s)) = d.slots.iter().enumerate().find(|(_, s)| s.len() != self.n) {
                return Some(Diagnostic::SlotDimension { vertex: v, slot, expected: self.n, got: s.len() });
            }
            if let Some(map) = self.slot_maps.get(v) {
                if map.len() != deg {
                    return Some(Diagnostic::SlotMapLength { vertex: v, expected: deg, got: map.len() });
                }
                let mut seen = vec![false; deg];
                for &s in map {
                    if s >= deg || seen[s] {
                        return Some(Diagnostic::SlotMapNotBijective { vertex: v });
                    }
                    seen[s] = true;
                }
            }
        }
        None
    }

    fn slot_of(&self, v: usize, k: usize) -> usize {
        self.slot_maps.get(v).map_or(k, |m| m[k])
    }

    /// Holomorphic multi-index carried by each half-edge, per edge as
    /// `(tail, head)`. Assumes a valid assignment.
    pub fn edge_multi_indices(&self) -> Vec<(Vec<u32>, Vec<u32>)> {
        let mut out = vec![(Vec::new(), Vec::new()); self.graph.edge_count()];
        for v in 0..self.graph.vertices {
            for (k, HalfEdge { edge, end }) in self.graph.half_edges(v).into_iter().enumerate() {
                let j = self.densities[v].slots[self.slot_of(v, k)].clone();
                match end {
                    End::Tail => out[edge].0 = j,
                    End::Head => out[edge].1 = j,
                }
            }
        }
        out
    }

    /// Same data with vertex `v` renamed `perm[v]`; half-edges keep their slots.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let graph = self.graph.relabel(perm);
        let mut densities = self.densities.clone();
        for (v, d) in self.densities.iter().enumerate() {
            densities[perm[v]] = d.clone();
        }
        let slot_maps = self.remap_slots(&graph, |v| perm[v], |e| e);
        Self { n: self.n, graph, densities, slot_maps }
    }

    /// Same data with edge `k` of the result equal to edge `order[k]`.
    pub fn reorder_edges(&self, order: &[usize]) -> Self {
        let graph = self.graph.reorder_edges(order);
        let mut inverse = vec![0; order.len()];
        for (k, &e) in order.iter().enumerate() {
            inverse[e] = k;
        }
        let slot_maps = self.remap_slots(&graph, |v| v, |e| inverse[e]);
        Self { n: self.n, graph, densities: self.densities.clone(), slot_maps }
    }

    fn remap_slots(
        &self,
        new_graph: &DirectedGraph,
        vmap: impl Fn(usize) -> usize,
        emap: impl Fn(usize) -> usize,
    ) -> Vec<Vec<usize>> {
        let mut maps = vec![Vec::new(); new_graph.vertices];
        for v in 0..self.graph.vertices {
            let nv = vmap(v);
            let new_half = new_graph.half_edges(nv);
            let mut map = vec![0; new_half.len()];
            for (k, he) in self.graph.half_edges(v).into_iter().enumerate() {
                let target = HalfEdge { edge: emap(he.edge), end: he.end };
                let pos = new_half.iter().position(|x| *x == target).expect("half-edge preserved");
                map[pos] = self.slot_of(v, k);
            }
            maps[nv] = map;
        }
        maps
    }

    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"assignment");
        h.update(self.graph.fingerprint().as_bytes());
        h.update((self.n as u64).to_le_bytes());
        for (v, d) in self.densities.iter().enumerate() {
            for s in &d.slots {
                for &j in s {
                    h.update(j.to_le_bytes());
                }
            }
            h.update(format!("{:?}", d.coefficient).as_bytes());
            for k in 0..d.degree() {
                h.update((self.slot_of(v, k) as u64).to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}
