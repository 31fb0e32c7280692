use thiserror::Error;

use crate::system::AgentId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("agent {agent} out of range (instance has {n_agents} agents)")]
    AgentOutOfRange { agent: AgentId, n_agents: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid bid vector: {0}")]
    InvalidBids(String),

    #[error("surviving set system has a monopoly: agent {agent} belongs to every feasible set")]
    Monopoly { agent: AgentId },

    #[error("surviving set system has no feasible set")]
    NoFeasibleSet,

    #[error("flow of size {required} requested but the maximum flow is {available}")]
    InsufficientFlow { required: usize, available: usize },

    #[error("enumeration exceeded the cap of {cap} {what}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("directed cycle found in a subgraph that must be acyclic")]
    Cycle,

    #[error("subgraph is not a valid union of edge-disjoint s-t paths: {0}")]
    InvalidFlowStructure(String),

    #[error(
        "power iteration did not converge within {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("winner predicate is not monotone in the agent's bid (wins at {wins_at}, loses at {loses_at})")]
    NonMonotone { wins_at: f64, loses_at: f64 },

    #[error("linear program is {0}")]
    Lp(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no assignment of tight sets satisfies the equilibrium conditions")]
    NoTightAssignment,

    #[error("operation `{op}` does not support {kind} systems")]
    Unsupported {
        op: &'static str,
        kind: &'static str,
    },
}
