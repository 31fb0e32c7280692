//! Instance files: a versioned JSON document holding one set system and its
//! cost vector.
//!
//! ```json
//! {
//!   "version": 1,
//!   "system": { "kind": "k-path", "vertices": 4, "source": 0, "sink": 3,
//!               "edges": [[0, 1], [0, 2], [1, 3], [2, 3]] },
//!   "costs": [1.0, 2.0, 3.0, 4.0],
//!   "k": 1
//! }
//! ```
//!
//! Agent ids are edge positions for k-path systems, vertex ids for vertex
//! cover, and explicit ids for r-out-of-k groups and explicit families.
//! Numbers are written in shortest round-trip form, so parsing a written
//! file reproduces every cost bit for bit.

use std::path::Path;

use frugal_core::{DiGraph, Error as CoreError, SetSystem, UGraph};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub system: SystemSpec,
    pub costs: Vec<f64>,
    /// Number of disjoint paths to buy; k-path systems only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Number of groups to buy; r-out-of-k systems only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    KPath {
        vertices: usize,
        source: usize,
        sink: usize,
        /// Directed `(tail, head)` pairs; the position is the agent id.
        edges: Vec<(usize, usize)>,
    },
    VertexCover {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    ROutOfK {
        groups: Vec<Vec<usize>>,
    },
    Explicit {
        agents: usize,
        sets: Vec<Vec<usize>>,
    },
}

/// Generator and seed an instance was produced from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub file: InstanceFile,
    pub system: SetSystem,
}

impl Instance {
    pub fn costs(&self) -> &[f64] {
        &self.file.costs
    }

    /// First 16 hex digits of the SHA-256 of the compact serialization.
    pub fn digest(&self) -> String {
        digest(&self.file)
    }
}

pub fn digest(file: &InstanceFile) -> String {
    let text = serde_json::to_string(file).expect("instance files always serialize");
    let hash = Sha256::digest(text.as_bytes());
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl InstanceFile {
    pub fn new(system: SystemSpec, costs: Vec<f64>) -> Self {
        Self {
            version: SCHEMA_VERSION,
            system,
            costs,
            k: None,
            r: None,
            provenance: None,
        }
    }

    pub fn n_agents(&self) -> usize {
        match &self.system {
            SystemSpec::KPath { edges, .. } => edges.len(),
            SystemSpec::VertexCover { vertices, .. } => *vertices,
            SystemSpec::ROutOfK { groups } => groups.iter().flatten().max().map_or(0, |&a| a + 1),
            SystemSpec::Explicit { agents, .. } => *agents,
        }
    }

    /// Checks every id and parameter, builds the set system and rejects
    /// monopolies.
    pub fn validate(self) -> Result<Instance> {
        if self.version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        let system = match &self.system {
            SystemSpec::KPath {
                vertices,
                source,
                sink,
                edges,
            } => {
                check_vertex("source", *source, *vertices)?;
                check_vertex("sink", *sink, *vertices)?;
                check_edges(edges, *vertices)?;
                let k = self
                    .k
                    .ok_or_else(|| invalid("k-path instance needs `k`".into()))?;
                if k == 0 {
                    return Err(invalid("k must be at least 1".into()));
                }
                let graph =
                    DiGraph::new(*vertices, edges.clone(), *source, *sink).map_err(core_invalid)?;
                SetSystem::k_path(graph, k).map_err(core_invalid)?
            }
            SystemSpec::VertexCover { vertices, edges } => {
                check_edges(edges, *vertices)?;
                SetSystem::vertex_cover(
                    UGraph::new(*vertices, edges.clone()).map_err(core_invalid)?,
                )
                .map_err(core_invalid)?
            }
            SystemSpec::ROutOfK { groups } => {
                let r = self
                    .r
                    .ok_or_else(|| invalid("r-out-of-k instance needs `r`".into()))?;
                SetSystem::r_out_of_k(groups.clone(), r).map_err(core_invalid)?
            }
            SystemSpec::Explicit { agents, sets } => {
                for (i, set) in sets.iter().enumerate() {
                    if let Some(a) = set.iter().find(|&&a| a >= *agents) {
                        return Err(invalid(format!(
                            "set {i} names agent {a} but there are only {agents} agents"
                        )));
                    }
                }
                SetSystem::explicit(*agents, sets.clone()).map_err(core_invalid)?
            }
        };
        if self.k.is_some() && !matches!(self.system, SystemSpec::KPath { .. }) {
            return Err(invalid("`k` only applies to k-path instances".into()));
        }
        if self.r.is_some() && !matches!(self.system, SystemSpec::ROutOfK { .. }) {
            return Err(invalid("`r` only applies to r-out-of-k instances".into()));
        }
        if self.costs.len() != system.n_agents() {
            return Err(invalid(format!(
                "{} costs given for {} agents",
                self.costs.len(),
                system.n_agents()
            )));
        }
        if let Some((a, c)) = self
            .costs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_finite() || **c < 0.0)
        {
            return Err(invalid(format!(
                "cost of agent {a} is {c}; costs must be finite and non-negative"
            )));
        }
        system
            .check_monopoly_free_mask(&vec![true; system.n_agents()])
            .map_err(|e| match e {
                CoreError::Monopoly { agent } => invalid(format!(
                    "monopoly: agent {agent} belongs to every feasible set"
                )),
                other => core_invalid(other),
            })?;
        Ok(Instance { file: self, system })
    }
}

fn invalid(message: String) -> CliError {
    CliError::Validation(message)
}

fn core_invalid(e: CoreError) -> CliError {
    CliError::Validation(e.to_string())
}

fn check_vertex(what: &str, v: usize, vertices: usize) -> Result<()> {
    if v >= vertices {
        return Err(invalid(format!(
            "{what} is vertex {v} but there are only {vertices} vertices"
        )));
    }
    Ok(())
}

fn check_edges(edges: &[(usize, usize)], vertices: usize) -> Result<()> {
    for (i, &(u, v)) in edges.iter().enumerate() {
        if u >= vertices || v >= vertices {
            return Err(invalid(format!(
                "edge {i} ({u}, {v}) has a dangling vertex id (there are {vertices} vertices)"
            )));
        }
    }
    Ok(())
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    file.validate()
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Pretty-printed text, ending in a newline.
pub fn to_text(file: &InstanceFile) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(file).map_err(|e| CliError::Serialize(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, file: &InstanceFile) -> Result<()> {
    std::fs::write(path, to_text(file)?).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = r#"{
        "version": 1,
        "system": {"kind": "k-path", "vertices": 4, "source": 0, "sink": 3,
                   "edges": [[0, 1], [0, 2], [1, 3], [2, 3]]},
        "costs": [1, 2, 3, 4],
        "k": 1
    }"#;

    #[test]
    fn parses_diamond() {
        let inst = parse_instance(DIAMOND).unwrap();
        assert_eq!(inst.system.n_agents(), 4);
        assert_eq!(inst.file.k, Some(1));
        assert_eq!(inst.costs(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_instance("{\n  \"version\": 1,\n  \"costs\": [1,, 2]\n}").unwrap_err();
        match err {
            CliError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 15)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_vertex_is_rejected() {
        let text = DIAMOND.replace("[2, 3]]", "[2, 9]]");
        let err = parse_instance(&text).unwrap_err();
        assert!(
            matches!(&err, CliError::Validation(m) if m.contains("dangling")),
            "{err}"
        );
    }

    #[test]
    fn monopoly_is_rejected() {
        let text = r#"{"version": 1, "system": {"kind": "k-path", "vertices": 3, "source": 0,
            "sink": 2, "edges": [[0, 1], [1, 2], [1, 2]]}, "costs": [1, 1, 1], "k": 1}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(
            matches!(&err, CliError::Validation(m) if m.contains("monopoly: agent 0")),
            "{err}"
        );
    }

    #[test]
    fn parameter_mismatches_are_rejected() {
        for (from, to) in [
            ("\"k\": 1", "\"k\": 0"),
            ("\"k\": 1", "\"r\": 1"),
            ("[1, 2, 3, 4]", "[1, 2, 3]"),
            ("[1, 2, 3, 4]", "[1, -2, 3, 4]"),
            ("\"version\": 1", "\"version\": 2"),
        ] {
            let err = parse_instance(&DIAMOND.replace(from, to)).unwrap_err();
            assert!(
                matches!(err, CliError::Validation(_)),
                "{from} -> {to}: {err}"
            );
        }
        let err =
            parse_instance(&DIAMOND.replace("\"k\": 1", "\"k\": 1, \"extra\": 0")).unwrap_err();
        assert!(matches!(err, CliError::Syntax { .. }));
    }

    #[test]
    fn digest_is_stable_under_round_trip() {
        let inst = parse_instance(DIAMOND).unwrap();
        let again = parse_instance(&to_text(&inst.file).unwrap()).unwrap();
        assert_eq!(inst.digest(), again.digest());
        assert_eq!(inst.digest().len(), 16);
    }
}
