//! Directed s-t networks and simple undirected graphs.

use crate::error::{Error, Result};

pub type EdgeId = usize;
pub type VertexId = usize;

/// Directed multigraph with a distinguished source and sink. Every edge has
/// unit capacity; edge ids are the positions in `edges`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n_vertices: usize,
    edges: Vec<(VertexId, VertexId)>,
    source: VertexId,
    sink: VertexId,
}

impl DiGraph {
    pub fn new(
        n_vertices: usize,
        edges: Vec<(VertexId, VertexId)>,
        source: VertexId,
        sink: VertexId,
    ) -> Result<Self> {
        if source == sink {
            return Err(Error::InvalidInstance("source and sink coincide".into()));
        }
        if source >= n_vertices || sink >= n_vertices {
            return Err(Error::InvalidInstance(format!(
                "source {source} or sink {sink} outside vertex range 0..{n_vertices}"
            )));
        }
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} = ({u}, {v}) references a vertex outside 0..{n_vertices}"
                )));
            }
        }
        Ok(Self {
            n_vertices,
            edges,
            source,
            sink,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (VertexId, VertexId) {
        self.edges[id]
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    /// Outgoing and incoming edge ids per vertex, in id order.
    pub(crate) fn incidence(&self) -> (Vec<Vec<EdgeId>>, Vec<Vec<EdgeId>>) {
        let mut out = vec![Vec::new(); self.n_vertices];
        let mut inc = vec![Vec::new(); self.n_vertices];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            out[u].push(id);
            inc[v].push(id);
        }
        (out, inc)
    }

    /// Membership mask with every edge allowed.
    pub fn full_mask(&self) -> Vec<bool> {
        vec![true; self.edges.len()]
    }

    /// Membership mask built from a list of edge ids.
    pub fn mask_of(&self, edges: &[EdgeId]) -> Vec<bool> {
        let mut mask = vec![false; self.edges.len()];
        for &e in edges {
            mask[e] = true;
        }
        mask
    }
}

/// Simple undirected graph (no loops, no parallel edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UGraph {
    n_vertices: usize,
    edges: Vec<(VertexId, VertexId)>,
    adjacency: Vec<Vec<VertexId>>,
}

impl UGraph {
    pub fn new(n_vertices: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} = ({u}, {v}) references a vertex outside 0..{n_vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} is a self-loop at {u}"
                )));
            }
            if adjacency[u].contains(&v) {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} = ({u}, {v}) is duplicated"
                )));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n_vertices,
            edges,
            adjacency,
        })
    }

    /// Graph whose edges are the pairs `(i, j)`, `i < j`, with `adj[i][j]` set.
    pub fn from_adjacency(adj: &[Vec<bool>]) -> Self {
        let n = adj.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if adj[i][j] {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, edges).expect("adjacency matrix describes a simple graph")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_vertices)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }
}
