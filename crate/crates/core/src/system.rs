//! Set systems: agents, feasibility, monopoly-freeness and minimal feasible
//! sets.
//!
//! Feasibility is upward-closed throughout: a subset is feasible when it
//! contains some feasible set. Every instantiation here (flows, covers,
//! group unions, explicit families read as generators) has this property.

use crate::error::{Error, Result};
use crate::flows::{has_flow, max_flow_value};
use crate::graph::{DiGraph, UGraph};

pub type AgentId = usize;

/// Default bound on the number of sets any enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    /// Feasible sets are the supersets of the listed generators.
    Explicit { sets: Vec<Vec<AgentId>> },
    /// Agents are edges; feasible sets carry `k` edge-disjoint s-t paths.
    KPath { graph: DiGraph, k: usize },
    /// Agents are vertices; feasible sets are vertex covers.
    VertexCover { graph: UGraph },
    /// Agents are partitioned into groups; feasible sets contain `r` whole groups.
    ROutOfK { groups: Vec<Vec<AgentId>>, r: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetSystem {
    n_agents: usize,
    kind: SystemKind,
}

impl SetSystem {
    pub fn explicit(n_agents: usize, sets: Vec<Vec<AgentId>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidInstance(
                "explicit family lists no feasible set".into(),
            ));
        }
        let mut sets = sets;
        for set in &mut sets {
            if let Some(&agent) = set.iter().find(|&&a| a >= n_agents) {
                return Err(Error::AgentOutOfRange { agent, n_agents });
            }
            set.sort_unstable();
            set.dedup();
        }
        Ok(Self {
            n_agents,
            kind: SystemKind::Explicit { sets },
        })
    }

    pub fn k_path(graph: DiGraph, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInstance("k-path systems need k >= 1".into()));
        }
        let available = max_flow_value(&graph, &graph.full_mask());
        if available < k {
            return Err(Error::InsufficientFlow {
                required: k,
                available,
            });
        }
        Ok(Self {
            n_agents: graph.n_edges(),
            kind: SystemKind::KPath { graph, k },
        })
    }

    pub fn vertex_cover(graph: UGraph) -> Result<Self> {
        Ok(Self {
            n_agents: graph.n_vertices(),
            kind: SystemKind::VertexCover { graph },
        })
    }

    pub fn r_out_of_k(groups: Vec<Vec<AgentId>>, r: usize) -> Result<Self> {
        if r == 0 || r > groups.len() {
            return Err(Error::InvalidInstance(format!(
                "r = {r} must lie in 1..={} (the number of groups)",
                groups.len()
            )));
        }
        let n_agents = groups.iter().map(Vec::len).sum();
        let mut owner = vec![None; n_agents];
        let mut groups = groups;
        for (i, group) in groups.iter_mut().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidInstance(format!("group {i} is empty")));
            }
            group.sort_unstable();
            for &a in group.iter() {
                if a >= n_agents {
                    return Err(Error::AgentOutOfRange { agent: a, n_agents });
                }
                if let Some(j) = owner[a].replace(i) {
                    return Err(Error::InvalidInstance(format!(
                        "agent {a} belongs to groups {j} and {i}"
                    )));
                }
            }
        }
        Ok(Self {
            n_agents,
            kind: SystemKind::ROutOfK { groups, r },
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SystemKind::Explicit { .. } => "explicit",
            SystemKind::KPath { .. } => "k-path",
            SystemKind::VertexCover { .. } => "vertex-cover",
            SystemKind::ROutOfK { .. } => "r-out-of-k",
        }
    }

    pub fn mask_of(&self, subset: &[AgentId]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n_agents];
        for &a in subset {
            if a >= self.n_agents {
                return Err(Error::AgentOutOfRange {
                    agent: a,
                    n_agents: self.n_agents,
                });
            }
            mask[a] = true;
        }
        Ok(mask)
    }

    /// Whether the agents marked in `mask` contain a feasible set.
    pub fn is_feasible_mask(&self, mask: &[bool]) -> bool {
        debug_assert_eq!(mask.len(), self.n_agents);
        match &self.kind {
            SystemKind::Explicit { sets } => sets.iter().any(|s| s.iter().all(|&a| mask[a])),
            SystemKind::KPath { graph, k } => has_flow(graph, mask, *k),
            SystemKind::VertexCover { graph } => {
                graph.edges().iter().all(|&(u, v)| mask[u] || mask[v])
            }
            SystemKind::ROutOfK { groups, r } => {
                groups.iter().filter(|g| g.iter().all(|&a| mask[a])).count() >= *r
            }
        }
    }

    pub fn is_feasible(&self, subset: &[AgentId]) -> Result<bool> {
        Ok(self.is_feasible_mask(&self.mask_of(subset)?))
    }

    /// `Ok` iff the feasible sets inside `surviving` exist and have empty
    /// intersection; otherwise names the first agent present in all of them.
    pub fn check_monopoly_free_mask(&self, surviving: &[bool]) -> Result<()> {
        if !self.is_feasible_mask(surviving) {
            return Err(Error::NoFeasibleSet);
        }
        let mut probe = surviving.to_vec();
        for agent in 0..self.n_agents {
            if !surviving[agent] {
                continue;
            }
            probe[agent] = false;
            let feasible = self.is_feasible_mask(&probe);
            probe[agent] = true;
            if !feasible {
                return Err(Error::Monopoly { agent });
            }
        }
        Ok(())
    }

    pub fn is_monopoly_free(&self, surviving: &[AgentId]) -> bool {
        self.mask_of(surviving)
            .map(|m| self.check_monopoly_free_mask(&m).is_ok())
            .unwrap_or(false)
    }

    /// All inclusion-minimal feasible sets, sorted lexicographically.
    pub fn minimal_feasible_sets(&self, cap: usize) -> Result<Vec<Vec<AgentId>>> {
        self.minimal_feasible_sets_within(&vec![true; self.n_agents], cap)
    }

    /// Minimal feasible sets using only agents marked in `surviving`.
    pub fn minimal_feasible_sets_within(
        &self,
        surviving: &[bool],
        cap: usize,
    ) -> Result<Vec<Vec<AgentId>>> {
        let mut result = match &self.kind {
            SystemKind::Explicit { sets } => {
                let mut inside: Vec<Vec<AgentId>> = sets
                    .iter()
                    .filter(|s| s.iter().all(|&a| surviving[a]))
                    .cloned()
                    .collect();
                inside.sort();
                inside.dedup();
                let minimal: Vec<Vec<AgentId>> = inside
                    .iter()
                    .filter(|s| {
                        !inside
                            .iter()
                            .any(|t| t.len() < s.len() && t.iter().all(|a| s.contains(a)))
                    })
                    .cloned()
                    .collect();
                minimal
            }
            SystemKind::ROutOfK { groups, r } => {
                let whole: Vec<&Vec<AgentId>> = groups
                    .iter()
                    .filter(|g| g.iter().all(|&a| surviving[a]))
                    .collect();
                let mut sets = Vec::new();
                for choice in combinations(whole.len(), *r) {
                    if sets.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "feasible sets",
                            cap,
                        });
                    }
                    let mut set: Vec<AgentId> = choice
                        .iter()
                        .flat_map(|&i| whole[i].iter().copied())
                        .collect();
                    set.sort_unstable();
                    sets.push(set);
                }
                sets
            }
            SystemKind::KPath { graph, k } => {
                crate::flows::enumerate_flows_within(graph, surviving, *k, cap)?
            }
            _ => {
                let universe: Vec<AgentId> = (0..self.n_agents).filter(|&a| surviving[a]).collect();
                enumerate_minimal_over(self.n_agents, &universe, |m| self.is_feasible_mask(m), cap)?
            }
        };
        if result.len() > cap {
            return Err(Error::CapExceeded {
                what: "feasible sets",
                cap,
            });
        }
        result.sort();
        Ok(result)
    }

    /// The system whose feasible sets are those of `self` lying inside
    /// `surviving`, as an explicit family of its minimal sets. Agent ids are
    /// preserved.
    pub fn restrict(&self, surviving: &[AgentId], cap: usize) -> Result<SetSystem> {
        let mask = self.mask_of(surviving)?;
        self.check_monopoly_free_mask(&mask)?;
        let sets = self.minimal_feasible_sets_within(&mask, cap)?;
        SetSystem::explicit(self.n_agents, sets)
    }
}

/// A set system seen through the agents that survived pruning.
#[derive(Debug, Clone)]
pub struct Subsystem<'a> {
    pub system: &'a SetSystem,
    pub surviving: Vec<bool>,
}

impl<'a> Subsystem<'a> {
    pub fn new(system: &'a SetSystem, surviving: &[AgentId]) -> Result<Self> {
        let surviving = system.mask_of(surviving)?;
        system.check_monopoly_free_mask(&surviving)?;
        Ok(Self { system, surviving })
    }

    pub fn whole(system: &'a SetSystem) -> Result<Self> {
        let surviving = vec![true; system.n_agents()];
        system.check_monopoly_free_mask(&surviving)?;
        Ok(Self { system, surviving })
    }

    pub fn members(&self) -> Vec<AgentId> {
        (0..self.surviving.len())
            .filter(|&a| self.surviving[a])
            .collect()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.surviving.get(agent).copied().unwrap_or(false)
    }

    /// Feasibility of the surviving agents marked in `mask`.
    pub fn is_feasible_mask(&self, mask: &[bool]) -> bool {
        let inside: Vec<bool> = mask
            .iter()
            .zip(&self.surviving)
            .map(|(&a, &b)| a && b)
            .collect();
        self.system.is_feasible_mask(&inside)
    }

    pub fn minimal_feasible_sets(&self, cap: usize) -> Result<Vec<Vec<AgentId>>> {
        self.system
            .minimal_feasible_sets_within(&self.surviving, cap)
    }
}

/// Inclusion-minimal subsets of `0..n` accepted by an upward-closed
/// predicate, sorted lexicographically.
pub fn enumerate_minimal(
    n: usize,
    feasible: impl Fn(&[bool]) -> bool,
    cap: usize,
) -> Result<Vec<Vec<AgentId>>> {
    let universe: Vec<AgentId> = (0..n).collect();
    enumerate_minimal_over(n, &universe, feasible, cap)
}

/// As [`enumerate_minimal`], restricted to subsets of `universe`.
///
/// Include/exclude backtracking over `universe`; a branch is abandoned once
/// the chosen agents plus the undecided ones are infeasible, and closed as
/// soon as the chosen agents alone are feasible.
pub fn enumerate_minimal_over(
    n: usize,
    universe: &[AgentId],
    feasible: impl Fn(&[bool]) -> bool,
    cap: usize,
) -> Result<Vec<Vec<AgentId>>> {
    struct Search<'f, F: Fn(&[bool]) -> bool> {
        universe: &'f [AgentId],
        feasible: F,
        chosen: Vec<bool>,
        open: Vec<bool>,
        found: Vec<Vec<AgentId>>,
        cap: usize,
    }

    impl<F: Fn(&[bool]) -> bool> Search<'_, F> {
        fn run(&mut self, depth: usize) -> Result<()> {
            if !(self.feasible)(&self.open) {
                return Ok(());
            }
            if (self.feasible)(&self.chosen) {
                let set: Vec<AgentId> = self
                    .universe
                    .iter()
                    .copied()
                    .filter(|&a| self.chosen[a])
                    .collect();
                let mut probe = self.chosen.clone();
                let minimal = set.iter().all(|&a| {
                    probe[a] = false;
                    let f = (self.feasible)(&probe);
                    probe[a] = true;
                    !f
                });
                if minimal {
                    if self.found.len() >= self.cap {
                        return Err(Error::CapExceeded {
                            what: "feasible sets",
                            cap: self.cap,
                        });
                    }
                    self.found.push(set);
                }
                return Ok(());
            }
            let Some(&agent) = self.universe.get(depth) else {
                return Ok(());
            };
            // `open` marks chosen plus undecided agents.
            self.open[agent] = false;
            self.run(depth + 1)?;
            self.open[agent] = true;
            self.chosen[agent] = true;
            self.run(depth + 1)?;
            self.chosen[agent] = false;
            Ok(())
        }
    }

    let mut open = vec![false; n];
    for &a in universe {
        open[a] = true;
    }
    let mut search = Search {
        universe,
        feasible,
        chosen: vec![false; n],
        open,
        found: Vec::new(),
        cap,
    };
    search.run(0)?;
    let mut found = search.found;
    found.sort();
    Ok(found)
}

/// All `r`-element index subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == r {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < r - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, r, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        rec(0, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// Total order on agent sets: `a` precedes `b` when the largest agent on
/// which they differ belongs to `b`. Both inputs must be sorted.
pub fn prefers_low_ids(a: &[AgentId], b: &[AgentId]) -> bool {
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 && j > 0 {
        let (x, y) = (a[i - 1], b[j - 1]);
        if x == y {
            i -= 1;
            j -= 1;
        } else {
            return y > x;
        }
    }
    i == 0 && j > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond_system(k: usize) -> SetSystem {
        let g = DiGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3).unwrap();
        SetSystem::k_path(g, k).unwrap()
    }

    fn star(m: usize) -> SetSystem {
        SetSystem::vertex_cover(UGraph::new(m + 1, (1..=m).map(|l| (0, l)).collect()).unwrap())
            .unwrap()
    }

    fn three_groups() -> SetSystem {
        SetSystem::r_out_of_k(vec![vec![0], vec![1, 2], vec![3]], 2).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let sys = three_groups();
        assert!(sys.is_feasible(&[0, 1, 2]).unwrap());
        assert!(!sys.is_feasible(&[0, 1]).unwrap());
        assert!(!sys.is_feasible(&[]).unwrap());
        let d = diamond_system(1);
        assert!(d.is_feasible(&[0, 2]).unwrap());
        assert!(!d.is_feasible(&[0, 3]).unwrap());
        assert!(!d.is_feasible(&[]).unwrap());
        assert!(matches!(
            d.is_feasible(&[4]),
            Err(Error::AgentOutOfRange { agent: 4, .. })
        ));
    }

    #[test]
    fn monopoly_examples() {
        let d = diamond_system(1);
        assert!(d.is_monopoly_free(&[0, 1, 2, 3]));
        assert!(!d.is_monopoly_free(&[0, 2]));
        let edge = SetSystem::vertex_cover(UGraph::new(2, vec![(0, 1)]).unwrap()).unwrap();
        assert!(edge.is_monopoly_free(&[0, 1]));
        assert_eq!(
            d.check_monopoly_free_mask(&[true, false, true, false]),
            Err(Error::Monopoly { agent: 0 })
        );
        assert_eq!(
            d.check_monopoly_free_mask(&[true, false, false, false]),
            Err(Error::NoFeasibleSet)
        );
    }

    #[test]
    fn minimal_sets_examples() {
        assert_eq!(
            diamond_system(1).minimal_feasible_sets(100).unwrap(),
            vec![vec![0, 2], vec![1, 3]]
        );
        assert_eq!(
            star(3).minimal_feasible_sets(100).unwrap(),
            vec![vec![0], vec![1, 2, 3]]
        );
        assert_eq!(
            three_groups().minimal_feasible_sets(100).unwrap(),
            vec![vec![0, 1, 2], vec![0, 3], vec![1, 2, 3]]
        );
        assert_eq!(
            star(3).minimal_feasible_sets(1),
            Err(Error::CapExceeded {
                what: "feasible sets",
                cap: 1
            })
        );
    }

    #[test]
    fn restriction() {
        let d = diamond_system(1);
        let r = d.restrict(&[0, 1, 2, 3], 100).unwrap();
        assert_eq!(
            r.minimal_feasible_sets(100).unwrap(),
            vec![vec![0, 2], vec![1, 3]]
        );
        assert!(matches!(
            d.restrict(&[0, 2], 100),
            Err(Error::Monopoly { .. })
        ));

        let groups = SetSystem::r_out_of_k(vec![vec![0], vec![1], vec![2], vec![3]], 2).unwrap();
        let r = groups.restrict(&[0, 1, 2], 100).unwrap();
        assert_eq!(
            r.minimal_feasible_sets(100).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
    }

    #[test]
    fn explicit_family_reduces_to_minimal() {
        let sys =
            SetSystem::explicit(4, vec![vec![0, 1], vec![0, 1, 2], vec![3], vec![1, 0]]).unwrap();
        assert_eq!(
            sys.minimal_feasible_sets(100).unwrap(),
            vec![vec![0, 1], vec![3]]
        );
        assert!(SetSystem::explicit(2, vec![vec![2]]).is_err());
        assert!(SetSystem::explicit(2, vec![]).is_err());
    }

    #[test]
    fn group_validation() {
        assert!(SetSystem::r_out_of_k(vec![vec![0], vec![0]], 1).is_err());
        assert!(SetSystem::r_out_of_k(vec![vec![0], vec![1]], 3).is_err());
    }

    #[test]
    fn low_id_order() {
        assert!(prefers_low_ids(&[0, 1], &[0, 2]));
        assert!(!prefers_low_ids(&[0, 2], &[0, 1]));
        assert!(prefers_low_ids(&[1], &[0, 2]));
        assert!(prefers_low_ids(&[2], &[0, 2]));
        assert!(!prefers_low_ids(&[0, 2], &[0, 2]));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
    }
}
