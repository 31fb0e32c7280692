use std::collections::VecDeque;

use crate::graph::{DiGraph, EdgeId};

/// Unit-capacity residual network over the allowed edges of a `DiGraph`.
pub(crate) struct Residual<'a> {
    pub(crate) graph: &'a DiGraph,
    pub(crate) allowed: &'a [bool],
    pub(crate) out: Vec<Vec<EdgeId>>,
    pub(crate) inc: Vec<Vec<EdgeId>>,
    /// 1 if the edge carries flow.
    pub(crate) flow: Vec<bool>,
}

/// A residual arc: traverse `edge` forward (push) or backward (cancel).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Arc {
    pub(crate) edge: EdgeId,
    pub(crate) forward: bool,
}

impl<'a> Residual<'a> {
    pub(crate) fn new(graph: &'a DiGraph, allowed: &'a [bool]) -> Self {
        debug_assert_eq!(allowed.len(), graph.n_edges());
        let (out, inc) = graph.incidence();
        Self {
            graph,
            allowed,
            out,
            inc,
            flow: vec![false; graph.n_edges()],
        }
    }

    /// Residual arcs leaving `u`, forward arcs first, each group in edge-id order.
    pub(crate) fn arcs(&self, u: usize) -> impl Iterator<Item = (Arc, usize)> + '_ {
        let fwd = self.out[u]
            .iter()
            .filter(move |&&e| self.allowed[e] && !self.flow[e])
            .map(move |&e| {
                (
                    Arc {
                        edge: e,
                        forward: true,
                    },
                    self.graph.edge(e).1,
                )
            });
        let bwd = self.inc[u]
            .iter()
            .filter(move |&&e| self.allowed[e] && self.flow[e])
            .map(move |&e| {
                (
                    Arc {
                        edge: e,
                        forward: false,
                    },
                    self.graph.edge(e).0,
                )
            });
        fwd.chain(bwd)
    }

    pub(crate) fn apply(&mut self, path: &[Arc]) {
        for arc in path {
            self.flow[arc.edge] = arc.forward;
        }
    }

    /// BFS augmenting path from source to sink, if any.
    fn bfs_path(&self) -> Option<Vec<Arc>> {
        let n = self.graph.n_vertices();
        let (s, t) = (self.graph.source(), self.graph.sink());
        let mut pred: Vec<Option<Arc>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for (arc, v) in self.arcs(u) {
                if !seen[v] {
                    seen[v] = true;
                    pred[v] = Some(arc);
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let arc = pred[v].expect("visited vertex has a predecessor");
            path.push(arc);
            let (tail, head) = self.graph.edge(arc.edge);
            v = if arc.forward { tail } else { head };
        }
        path.reverse();
        Some(path)
    }

    /// Augment until no path remains or `limit` units are routed.
    pub(crate) fn augment_up_to(&mut self, limit: usize) -> usize {
        let mut value = 0;
        while value < limit {
            match self.bfs_path() {
                Some(path) => {
                    self.apply(&path);
                    value += 1;
                }
                None => break,
            }
        }
        value
    }
}

/// Value of a maximum integral s-t flow using only `allowed` edges.
pub fn max_flow_value(g: &DiGraph, allowed: &[bool]) -> usize {
    Residual::new(g, allowed).augment_up_to(usize::MAX)
}

/// `max_flow_value(g, allowed) >= k`, stopping as soon as `k` units are found.
pub fn has_flow(g: &DiGraph, allowed: &[bool], k: usize) -> bool {
    Residual::new(g, allowed).augment_up_to(k) >= k
}
