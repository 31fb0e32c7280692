//! Dense two-phase simplex for the small programs behind the benchmark
//! oracles.

use crate::error::{Error, Result};

pub const MAX_VARIABLES: usize = 500;
pub const MAX_ROWS: usize = 2000;
const PIVOT_TOLERANCE: f64 = 1e-9;
const FEASIBILITY_TOLERANCE: f64 = 1e-7;
const MAX_PIVOTS: usize = 200_000;

/// Maximize `objective . x` subject to `le_rows`, `eq_rows` and `x >= lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Rows `a . x <= b`.
    pub le_rows: Vec<(Vec<f64>, f64)>,
    /// Rows `a . x = b`.
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<f64>,
}

impl LinearProgram {
    /// A program with the given objective and all lower bounds zero.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            le_rows: Vec::new(),
            eq_rows: Vec::new(),
            lower: vec![0.0; n],
        }
    }

    pub fn n_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.le_rows.push((row, rhs));
    }

    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) {
        self.le_rows
            .push((row.into_iter().map(|a| -a).collect(), -rhs));
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_rows.push((row, rhs));
    }

    /// Largest violation of any constraint at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let dot = |a: &[f64]| a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        let le = self.le_rows.iter().map(|(a, b)| (dot(a) - b).max(0.0));
        let eq = self.eq_rows.iter().map(|(a, b)| (dot(a) - b).abs());
        let lo = self.lower.iter().zip(x).map(|(l, x)| (l - x).max(0.0));
        le.chain(eq).chain(lo).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_variables();
        let rows = self.le_rows.len() + self.eq_rows.len();
        if n > MAX_VARIABLES || rows > MAX_ROWS {
            return Err(Error::TooLarge(format!(
                "linear program with {n} variables and {rows} rows exceeds {MAX_VARIABLES} x {MAX_ROWS}"
            )));
        }
        if self.lower.len() != n
            || self
                .le_rows
                .iter()
                .chain(&self.eq_rows)
                .any(|(a, _)| a.len() != n)
        {
            return Err(Error::InvalidInstance(
                "linear program dimensions disagree".into(),
            ));
        }
        let finite = self
            .objective
            .iter()
            .chain(&self.lower)
            .all(|v| v.is_finite())
            && self
                .le_rows
                .iter()
                .chain(&self.eq_rows)
                .all(|(a, b)| b.is_finite() && a.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::InvalidInstance(
                "linear program has non-finite coefficients".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal point; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        self.rows[row].iter_mut().for_each(|v| *v /= p);
        self.rhs[row] /= p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f == 0.0 {
                continue;
            }
            for (v, &pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.rows[i][col] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost` over the current basis, letting only columns below
    /// `n_enterable` enter. Bland's rule for both choices.
    fn optimize(&mut self, cost: &[f64], n_enterable: usize) -> Result<Outcome> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..n_enterable).find(|&j| {
                let reduced = cost[j]
                    - (0..self.rows.len())
                        .map(|i| cost[self.basis[i]] * self.rows[i][j])
                        .sum::<f64>();
                reduced > PIVOT_TOLERANCE
            });
            let Some(col) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a <= PIVOT_TOLERANCE {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((j, best)) => {
                        if ratio < best - PIVOT_TOLERANCE
                            || (ratio <= best + PIVOT_TOLERANCE && self.basis[i] < self.basis[j])
                        {
                            Some((i, ratio))
                        } else {
                            Some((j, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leaving else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::Numerical(format!(
            "simplex exceeded {MAX_PIVOTS} pivots"
        )))
    }
}

/// Solves `lp` by the two-phase tableau simplex method with Bland's rule.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult> {
    lp.validate()?;
    let n = lp.n_variables();
    let dot = |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();

    // Shift to y = x - lower >= 0 and normalise right-hand sides to be
    // non-negative.
    struct Row {
        coeffs: Vec<f64>,
        rhs: f64,
        slack: f64,
    }
    let mut rows = Vec::new();
    for (a, b) in &lp.le_rows {
        let rhs = b - dot(a, &lp.lower);
        if rhs >= 0.0 {
            rows.push(Row {
                coeffs: a.clone(),
                rhs,
                slack: 1.0,
            });
        } else {
            rows.push(Row {
                coeffs: a.iter().map(|v| -v).collect(),
                rhs: -rhs,
                slack: -1.0,
            });
        }
    }
    for (a, b) in &lp.eq_rows {
        let rhs = b - dot(a, &lp.lower);
        let sign = if rhs >= 0.0 { 1.0 } else { -1.0 };
        rows.push(Row {
            coeffs: a.iter().map(|v| sign * v).collect(),
            rhs: sign * rhs,
            slack: 0.0,
        });
    }

    // Columns: structural, one slack per inequality row, then artificials
    // for rows without a usable +1 slack.
    let m = rows.len();
    let n_slack = lp.le_rows.len();
    let needs_artificial: Vec<bool> = rows.iter().map(|r| r.slack != 1.0).collect();
    let n_artificial = needs_artificial.iter().filter(|&&b| b).count();
    let width = n + n_slack + n_artificial;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
    };
    let mut next_artificial = n + n_slack;
    for (i, row) in rows.iter().enumerate() {
        let mut coeffs = vec![0.0; width];
        coeffs[..n].copy_from_slice(&row.coeffs);
        if i < n_slack {
            coeffs[n + i] = row.slack;
        }
        if needs_artificial[i] {
            coeffs[next_artificial] = 1.0;
            tab.basis.push(next_artificial);
            next_artificial += 1;
        } else {
            tab.basis.push(n + i);
        }
        tab.rows.push(coeffs);
        tab.rhs.push(row.rhs);
    }

    if n_artificial > 0 {
        let mut phase1 = vec![0.0; width];
        phase1[n + n_slack..].iter_mut().for_each(|v| *v = -1.0);
        tab.optimize(&phase1, width)?;
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= n + n_slack)
            .map(|i| tab.rhs[i])
            .sum();
        if infeasibility > FEASIBILITY_TOLERANCE {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::NAN,
            });
        }
        // Drive zero-valued artificials out of the basis where possible;
        // rows with no other non-zero entry are redundant and stay inert.
        for i in 0..m {
            if tab.basis[i] >= n + n_slack {
                if let Some(col) =
                    (0..n + n_slack).find(|&j| tab.rows[i][j].abs() > PIVOT_TOLERANCE)
                {
                    tab.pivot(i, col);
                }
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(&lp.objective);
    if let Outcome::Unbounded = tab.optimize(&cost, n + n_slack)? {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: f64::INFINITY,
        });
    }
    let mut x = lp.lower.clone();
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] += tab.rhs[i];
        }
    }
    let violation = lp.violation(&x);
    if violation > FEASIBILITY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "simplex solution violates a constraint by {violation:e}"
        )));
    }
    let objective = dot(&lp.objective, &x);
    Ok(LpResult {
        status: LpStatus::Optimal,
        x,
        objective,
    })
}
