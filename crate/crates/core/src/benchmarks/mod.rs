//! Exact small-instance oracles for the equilibrium benchmarks `nu` and
//! `mu`, flow-based bounds, clique sizes, probe families and frugality
//! reports.

mod bounds;
mod report;

pub use bounds::{alpha_kplus1, mu_lower_flow, nu_lower_kpath, rho_v, MAX_CLIQUE_VERTICES};
pub use report::{
    frugality_report, probe_costs, probe_payments, FrugalityReport, ProbeRow, ProbeTable,
};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::system::{AgentId, SetSystem};
use crate::EPS;

/// Largest reference set accepted by [`compute_nu`].
pub const MAX_NU_SET: usize = 24;
/// Budget of linear programs one [`compute_nu`] call may solve.
pub const MAX_NU_PROGRAMS: usize = 200_000;

/// Result of one benchmark program.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSolution {
    pub value: f64,
    /// Full bid vector: the optimal bids on the reference set, costs elsewhere.
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkValue {
    pub nu: f64,
    pub mu: f64,
    pub nu_witness: Vec<f64>,
    pub mu_witness: Vec<f64>,
    /// Minimum-cost feasible set both programs price.
    pub reference: Vec<AgentId>,
    /// Feasible sets made tight by the `nu` witness, covering every member
    /// of the reference set.
    pub tight_sets: Vec<Vec<AgentId>>,
}

/// The program data shared by both benchmarks.
struct Program {
    n_agents: usize,
    reference: Vec<AgentId>,
    /// Minimal feasible sets other than the reference.
    alternatives: Vec<Vec<AgentId>>,
    costs: Vec<f64>,
}

impl Program {
    fn new(system: &SetSystem, costs: &[f64], cap: usize) -> Result<Self> {
        crate::mechanisms::check_bids(system.n_agents(), costs)?;
        system.check_monopoly_free_mask(&vec![true; system.n_agents()])?;
        let sets = system.minimal_feasible_sets(cap)?;
        let reference = reference_set_from(&sets, costs).ok_or(Error::NoFeasibleSet)?;
        let alternatives = sets.into_iter().filter(|s| *s != reference).collect();
        Ok(Self {
            n_agents: system.n_agents(),
            reference,
            alternatives,
            costs: costs.to_vec(),
        })
    }

    /// `sum_{e in S \ T} b(e)` as a row over the reference set, and
    /// `sum_{e in T \ S} c(e)`.
    fn row(&self, t: &[AgentId]) -> (Vec<f64>, f64) {
        let row = self
            .reference
            .iter()
            .map(|e| if t.binary_search(e).is_ok() { 0.0 } else { 1.0 })
            .collect();
        let rhs = t
            .iter()
            .filter(|e| self.reference.binary_search(e).is_err())
            .map(|&e| self.costs[e])
            .sum();
        (row, rhs)
    }

    /// Constraints (1) and (2) with the given objective sign.
    fn base(&self, sign: f64) -> LinearProgram {
        let mut lp = LinearProgram::maximize(vec![sign; self.reference.len()]);
        lp.lower = self.reference.iter().map(|&e| self.costs[e]).collect();
        for t in &self.alternatives {
            let (row, rhs) = self.row(t);
            if row.iter().any(|&a| a != 0.0) {
                lp.add_le(row, rhs);
            }
        }
        lp
    }

    fn witness(&self, x: &[f64]) -> Vec<f64> {
        let mut w = self.costs.clone();
        for (&e, &b) in self.reference.iter().zip(x) {
            w[e] = b;
        }
        debug_assert_eq!(w.len(), self.n_agents);
        w
    }
}

fn reference_set_from(sets: &[Vec<AgentId>], costs: &[f64]) -> Option<Vec<AgentId>> {
    let cost = |s: &[AgentId]| s.iter().map(|&a| costs[a]).sum::<f64>();
    let best = sets.iter().map(|s| cost(s)).fold(f64::INFINITY, f64::min);
    sets.iter().find(|s| cost(s) <= best + EPS).cloned()
}

/// The minimum-cost minimal feasible set that is lexicographically smallest.
pub fn reference_set(system: &SetSystem, costs: &[f64], cap: usize) -> Result<Vec<AgentId>> {
    crate::mechanisms::check_bids(system.n_agents(), costs)?;
    reference_set_from(&system.minimal_feasible_sets(cap)?, costs).ok_or(Error::NoFeasibleSet)
}

/// `mu(c)`: the largest total bid on the reference set `S` such that every
/// bid covers its cost and no feasible set `T` undercuts `S`.
pub fn compute_mu(system: &SetSystem, costs: &[f64], cap: usize) -> Result<BenchmarkSolution> {
    let program = Program::new(system, costs, cap)?;
    let result = solve_lp(&program.base(1.0))?;
    match result.status {
        LpStatus::Optimal => Ok(BenchmarkSolution {
            value: result.objective,
            witness: program.witness(&result.x),
        }),
        LpStatus::Unbounded => Err(Error::Lp("unbounded")),
        LpStatus::Infeasible => Err(Error::Lp("infeasible")),
    }
}

struct NuSearch<'p> {
    program: &'p Program,
    /// `excludes[t][i]`: alternative `t` avoids the `i`-th reference agent.
    excludes: Vec<Vec<bool>>,
    /// Alternatives in the order they are tried: cheapest first.
    order: Vec<usize>,
    visited: HashSet<Vec<usize>>,
    solved: usize,
    best: Option<(f64, Vec<f64>, Vec<usize>)>,
}

impl NuSearch<'_> {
    fn solve(&mut self, family: &[usize]) -> Result<Option<(f64, Vec<f64>)>> {
        self.solved += 1;
        if self.solved > MAX_NU_PROGRAMS {
            return Err(Error::CapExceeded {
                what: "benchmark linear programs",
                cap: MAX_NU_PROGRAMS,
            });
        }
        let mut lp = self.program.base(-1.0);
        for &t in family {
            let (row, rhs) = self.program.row(&self.program.alternatives[t]);
            lp.add_eq(row, rhs);
        }
        let result = solve_lp(&lp)?;
        Ok(match result.status {
            LpStatus::Optimal => Some((-result.objective, result.x)),
            LpStatus::Infeasible => None,
            LpStatus::Unbounded => return Err(Error::Lp("unbounded")),
        })
    }

    fn run(&mut self, family: &mut Vec<usize>) -> Result<()> {
        let s = self.program.reference.len();
        let uncovered = (0..s).find(|&i| !family.iter().any(|&t| self.excludes[t][i]));
        let Some(i) = uncovered else { return Ok(()) };
        for pos in 0..self.order.len() {
            let t = self.order[pos];
            if !self.excludes[t][i] || family.contains(&t) {
                continue;
            }
            family.push(t);
            let mut key = family.clone();
            key.sort_unstable();
            if self.visited.insert(key) {
                if let Some((value, x)) = self.solve(family)? {
                    let improves = self.best.as_ref().is_none_or(|(b, _, _)| value < *b - EPS);
                    let complete = (0..s).all(|j| family.iter().any(|&t| self.excludes[t][j]));
                    if complete {
                        if improves {
                            self.best = Some((value, x, family.clone()));
                        }
                    } else if improves {
                        self.run(family)?;
                    }
                }
            }
            family.pop();
        }
        Ok(())
    }
}

/// `nu(c)`: the smallest total bid on the reference set `S` such that every
/// bid covers its cost, no feasible set undercuts `S`, and every member of
/// `S` is avoided by some feasible set whose cost ties with `S`.
///
/// The tightness condition is handled by branch and bound over families of
/// tight sets: the program with a partial family bounds all of its
/// extensions from below.
pub fn compute_nu(
    system: &SetSystem,
    costs: &[f64],
    cap: usize,
) -> Result<(BenchmarkSolution, Vec<Vec<AgentId>>)> {
    let program = Program::new(system, costs, cap)?;
    let s = program.reference.len();
    if s > MAX_NU_SET {
        return Err(Error::TooLarge(format!(
            "reference set of {s} agents exceeds {MAX_NU_SET}"
        )));
    }
    let excludes: Vec<Vec<bool>> = program
        .alternatives
        .iter()
        .map(|t| {
            program
                .reference
                .iter()
                .map(|e| t.binary_search(e).is_err())
                .collect()
        })
        .collect();
    let cost = |t: &[AgentId]| t.iter().map(|&a| costs[a]).sum::<f64>();
    let mut order: Vec<usize> = (0..program.alternatives.len()).collect();
    order.sort_by(|&a, &b| {
        cost(&program.alternatives[a])
            .total_cmp(&cost(&program.alternatives[b]))
            .then(a.cmp(&b))
    });
    let mut search = NuSearch {
        program: &program,
        excludes,
        order,
        visited: HashSet::new(),
        solved: 0,
        best: None,
    };
    search.run(&mut Vec::new())?;
    let (value, x, mut family) = search.best.ok_or(Error::NoTightAssignment)?;
    family.sort_unstable();
    let tight = family
        .iter()
        .map(|&t| program.alternatives[t].clone())
        .collect();
    Ok((
        BenchmarkSolution {
            value,
            witness: program.witness(&x),
        },
        tight,
    ))
}

/// Both benchmarks on the same reference set.
pub fn compute_benchmarks(system: &SetSystem, costs: &[f64], cap: usize) -> Result<BenchmarkValue> {
    let mu = compute_mu(system, costs, cap)?;
    let (nu, tight_sets) = compute_nu(system, costs, cap)?;
    Ok(BenchmarkValue {
        nu: nu.value,
        mu: mu.value,
        nu_witness: nu.witness,
        mu_witness: mu.witness,
        reference: reference_set(system, costs, cap)?,
        tight_sets,
    })
}

/// Largest violation of constraints (1) and (2) by a witness bid vector,
/// and of tightness for the given sets.
pub fn witness_violation(
    system: &SetSystem,
    costs: &[f64],
    reference: &[AgentId],
    witness: &[f64],
    tight_sets: &[Vec<AgentId>],
    cap: usize,
) -> Result<f64> {
    let price = |t: &[AgentId]| t.iter().map(|&a| witness[a]).sum::<f64>();
    let s_price = price(reference);
    let mut worst: f64 = reference
        .iter()
        .map(|&e| (costs[e] - witness[e]).max(0.0))
        .fold(0.0, f64::max);
    for t in system.minimal_feasible_sets(cap)? {
        worst = worst.max(s_price - price(&t));
    }
    for t in tight_sets {
        worst = worst.max((s_price - price(t)).abs());
    }
    for &e in reference {
        if !tight_sets.iter().any(|t| t.binary_search(&e).is_err()) && !tight_sets.is_empty() {
            worst = f64::INFINITY;
        }
    }
    Ok(worst)
}
