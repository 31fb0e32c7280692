//! Dependency graph of a pruned set system: surviving agents `e`, `e'` are
//! adjacent when every surviving feasible set contains one of them.

use crate::error::Result;
use crate::system::{AgentId, Subsystem, SystemKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: Vec<AgentId>,
    adjacency: Vec<Vec<bool>>,
    components: Vec<Vec<AgentId>>,
}

impl DependencyGraph {
    /// Builds the graph from node agents (sorted) and a symmetric adjacency
    /// matrix indexed by node position.
    pub fn from_adjacency(nodes: Vec<AgentId>, adjacency: Vec<Vec<bool>>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let components = connected_components(&nodes, &adjacency);
        Self {
            nodes,
            adjacency,
            components,
        }
    }

    pub fn nodes(&self) -> &[AgentId] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn position(&self, agent: AgentId) -> Option<usize> {
        self.nodes.binary_search(&agent).ok()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn is_adjacent(&self, a: AgentId, b: AgentId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => self.adjacency[i][j],
            _ => false,
        }
    }

    pub fn neighbors(&self, agent: AgentId) -> Vec<AgentId> {
        let Some(i) = self.position(agent) else {
            return Vec::new();
        };
        (0..self.nodes.len())
            .filter(|&j| self.adjacency[i][j])
            .map(|j| self.nodes[j])
            .collect()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count())
            .sum::<usize>()
            / 2
    }

    /// Connected components, each sorted, ordered by smallest agent id.
    pub fn components(&self) -> &[Vec<AgentId>] {
        &self.components
    }
}

fn connected_components(nodes: &[AgentId], adjacency: &[Vec<bool>]) -> Vec<Vec<AgentId>> {
    let n = nodes.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(nodes[i]);
            for j in 0..n {
                if adjacency[i][j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Dependency graph by pairwise removal: `e ~ e'` iff the surviving agents
/// minus both are infeasible. For k-path systems this is a max-flow test on
/// the pruned subgraph; for an unpruned vertex-cover system it is the input
/// graph itself.
pub fn build_dependency(view: &Subsystem) -> DependencyGraph {
    let nodes = view.members();
    let n = nodes.len();
    let mut adjacency = vec![vec![false; n]; n];
    if let SystemKind::VertexCover { graph } = view.system.kind() {
        if n == graph.n_vertices() {
            for &(u, v) in graph.edges() {
                adjacency[u][v] = true;
                adjacency[v][u] = true;
            }
            return DependencyGraph::from_adjacency(nodes, adjacency);
        }
    }
    let mut probe = view.surviving.clone();
    for i in 0..n {
        probe[nodes[i]] = false;
        for j in i + 1..n {
            probe[nodes[j]] = false;
            let joined = !view.is_feasible_mask(&probe);
            probe[nodes[j]] = true;
            adjacency[i][j] = joined;
            adjacency[j][i] = joined;
        }
        probe[nodes[i]] = true;
    }
    DependencyGraph::from_adjacency(nodes, adjacency)
}

/// Dependency graph from the minimal feasible sets: `e ~ e'` iff every
/// minimal set contains `e` or `e'`.
pub fn build_dependency_enumerated(view: &Subsystem, cap: usize) -> Result<DependencyGraph> {
    let nodes = view.members();
    let sets = view.minimal_feasible_sets(cap)?;
    let n = nodes.len();
    let mut adjacency = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let joined = sets
                .iter()
                .all(|s| s.binary_search(&nodes[i]).is_ok() || s.binary_search(&nodes[j]).is_ok());
            adjacency[i][j] = joined;
            adjacency[j][i] = joined;
        }
    }
    Ok(DependencyGraph::from_adjacency(nodes, adjacency))
}

/// Components of `h`, sorted by smallest contained agent.
pub fn components(h: &DependencyGraph) -> Vec<Vec<AgentId>> {
    h.components().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DiGraph, UGraph};
    use crate::system::SetSystem;

    fn kpath(edges: Vec<(usize, usize)>, n: usize, t: usize, k: usize) -> SetSystem {
        SetSystem::k_path(DiGraph::new(n, edges, 0, t).unwrap(), k).unwrap()
    }

    #[test]
    fn diamond_is_four_cycle() {
        let sys = kpath(vec![(0, 1), (0, 2), (1, 3), (2, 3)], 4, 3, 1);
        let view = Subsystem::whole(&sys).unwrap();
        let h = build_dependency(&view);
        assert_eq!(h.neighbors(0), vec![1, 3]);
        assert!(!h.is_adjacent(0, 2));
        assert_eq!(h.n_edges(), 4);
        assert_eq!(h.components().len(), 1);
        assert_eq!(h, build_dependency_enumerated(&view, 100).unwrap());
    }

    #[test]
    fn disjoint_paths_give_complete_bipartite() {
        // Paths of 2 and 3 edges between s=0 and t=1.
        let sys = kpath(vec![(0, 2), (2, 1), (0, 3), (3, 4), (4, 1)], 5, 1, 1);
        let h = build_dependency(&Subsystem::whole(&sys).unwrap());
        assert_eq!(h.n_edges(), 6);
        for a in 0..2 {
            for b in 2..5 {
                assert!(h.is_adjacent(a, b));
            }
        }
    }

    #[test]
    fn series_diamonds_split() {
        let sys = kpath(
            vec![
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (3, 5),
                (4, 6),
                (5, 6),
            ],
            7,
            6,
            1,
        );
        let h = build_dependency(&Subsystem::whole(&sys).unwrap());
        assert_eq!(components(&h), vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    }

    #[test]
    fn groups_give_complete_multipartite() {
        let sys = SetSystem::r_out_of_k(vec![vec![0], vec![1, 2], vec![3], vec![4]], 2).unwrap();
        let view = Subsystem::new(&sys, &[0, 1, 2, 3]).unwrap();
        let h = build_dependency(&view);
        assert!(!h.is_adjacent(1, 2));
        assert!(h.is_adjacent(0, 1) && h.is_adjacent(0, 3) && h.is_adjacent(2, 3));
        assert_eq!(h.n_edges(), 5);
    }

    #[test]
    fn vertex_cover_is_input_graph() {
        let g = UGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let sys = SetSystem::vertex_cover(g).unwrap();
        let view = Subsystem::whole(&sys).unwrap();
        let fast = build_dependency(&view);
        assert_eq!(fast.n_edges(), 4);
        assert_eq!(fast, build_dependency_enumerated(&view, 100).unwrap());
    }

    #[test]
    fn edgeless_components() {
        let h = DependencyGraph::from_adjacency(vec![2, 5, 7], vec![vec![false; 3]; 3]);
        assert_eq!(components(&h), vec![vec![2], vec![5], vec![7]]);
    }
}
