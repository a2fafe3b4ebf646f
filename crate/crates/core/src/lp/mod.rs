//! The max-min coverage linear program.
//!
//! Choosing a target state `j` with probability `pi_j` and then a uniform
//! path through `j` visits state `i` with probability
//! `sum_j alpha(i, j) * pi_j`. The program maximizes the smallest of these
//! visit probabilities:
//!
//! ```text
//! maximize p_min
//!   p_min <= sum_j alpha(i, j) pi_j   for every state i
//!   sum_j pi_j = 1,  pi_j >= floor
//! ```

mod mps;
pub mod simplex;
mod verify;

use serde::Serialize;

use crate::alpha::AlphaMatrix;
use crate::error::{Error, Result};

pub use simplex::PivotRule;
pub use verify::{enumerate_vertices, verify_solution, CheckReport};

/// Feasibility tolerance of returned distributions.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct CoverageLp<'a> {
    alpha: &'a AlphaMatrix,
    floor: f64,
}

impl<'a> CoverageLp<'a> {
    pub fn alpha(&self) -> &'a AlphaMatrix {
        self.alpha
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn num_states(&self) -> usize {
        self.alpha.len()
    }

    /// `pi_1..pi_n` and `p_min`.
    pub fn num_variables(&self) -> usize {
        self.num_states() + 1
    }

    pub fn num_inequalities(&self) -> usize {
        self.num_states()
    }

    pub fn num_equalities(&self) -> usize {
        1
    }

    /// Probability of visiting state `i` under `pi`.
    pub fn coverage(&self, i: usize, pi: &[f64]) -> f64 {
        self.alpha.row(i).iter().zip(pi).map(|(a, p)| a * p).sum()
    }

    /// Fixed-column MPS rendering, for cross-checking with external solvers.
    pub fn to_mps(&self) -> String {
        mps::render(self)
    }
}

/// Builds the program; `floor` is an optional lower bound on every `pi_j`.
pub fn build_lp(alpha: &AlphaMatrix, floor: Option<f64>) -> Result<CoverageLp<'_>> {
    alpha.validate()?;
    let floor = floor.unwrap_or(0.0);
    let n = alpha.len();
    if n == 0 {
        return Err(Error::MalformedAlpha("empty matrix".into()));
    }
    if floor.is_nan() || floor < 0.0 || n as f64 * floor > 1.0 {
        return Err(Error::FloorInfeasible { floor, states: n });
    }
    Ok(CoverageLp { alpha, floor })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageDistribution {
    pub pi: Vec<f64>,
    /// Smallest visit probability achieved by `pi`.
    pub p_min: f64,
    /// Objective value read off the final dictionary.
    pub lp_objective: f64,
    pub status: SolverStatus,
    pub iterations: usize,
}

impl CoverageDistribution {
    /// Point mass or arbitrary hand-made distribution, for callers that
    /// bypass the solver.
    pub fn from_pi(alpha: &AlphaMatrix, pi: Vec<f64>) -> Self {
        let p_min = min_coverage(alpha, &pi);
        Self {
            pi,
            p_min,
            lp_objective: p_min,
            status: SolverStatus::Optimal,
            iterations: 0,
        }
    }
}

pub(crate) fn min_coverage(alpha: &AlphaMatrix, pi: &[f64]) -> f64 {
    alpha
        .rows()
        .map(|row| row.iter().zip(pi).map(|(a, p)| a * p).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

pub fn solve_lp(lp: &CoverageLp<'_>) -> Result<CoverageDistribution> {
    solve_lp_with(lp, PivotRule::default())
}

pub fn solve_lp_with(lp: &CoverageLp<'_>, rule: PivotRule) -> Result<CoverageDistribution> {
    let n = lp.num_states();
    let floor = lp.floor;
    let free_mass = (1.0 - n as f64 * floor).max(0.0);
    if free_mass == 0.0 {
        return Ok(CoverageDistribution::from_pi(lp.alpha, vec![floor; n]));
    }
    // Writing pi = floor + free_mass * sigma with sigma on the simplex turns
    // coverage(i) into (M sigma)_i for M(i,j) = free_mass * alpha(i,j) +
    // floor * rowsum(i), so the program is the value of the matrix game M.
    // That value is 1 / max { 1.u : M^T u <= 1, u >= 0 } and the optimal sigma
    // is the normalized dual. The all-ones right-hand side keeps the starting
    // basis nondegenerate, unlike the direct form whose coverage rows all
    // start at zero.
    let offsets: Vec<f64> = lp
        .alpha
        .rows()
        .map(|row| floor * row.iter().sum::<f64>())
        .collect();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        for (j, &a) in lp.alpha.row(i).iter().enumerate() {
            // row j of M^T, column i
            table[j * n + i] = free_mass * a + offsets[i];
        }
    }
    let solution = simplex::maximize(table, vec![1.0; n], &vec![1.0; n], rule, 50 * (n + 2))?;
    let total: f64 = solution.duals.iter().map(|v| v.max(0.0)).sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NumericInstability {
            iterations: solution.iterations,
        });
    }
    let pi: Vec<f64> = solution
        .duals
        .iter()
        .map(|v| floor + free_mass * v.max(0.0) / total)
        .collect();
    let p_min = min_coverage(lp.alpha, &pi);
    Ok(CoverageDistribution {
        pi,
        p_min,
        lp_objective: 1.0 / solution.objective,
        status: SolverStatus::Optimal,
        iterations: solution.iterations,
    })
}
