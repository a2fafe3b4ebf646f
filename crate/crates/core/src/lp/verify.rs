//! Independent audit of a coverage distribution: constraint residuals and,
//! for small programs, an optimality certificate by brute-force vertex
//! enumeration (no simplex involved).

use serde::Serialize;

use super::{min_coverage, CoverageDistribution, FEASIBILITY_TOL};
use crate::alpha::AlphaMatrix;

/// Largest state count for which vertices are enumerated.
pub const MAX_ENUMERATION_STATES: usize = 10;

/// Allowed gap between a claimed objective and the enumerated optimum.
pub const OPTIMALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    /// `|sum pi - 1|`.
    pub mass_residual: f64,
    /// Largest violation of `pi_j >= 0`.
    pub bound_residual: f64,
    /// Largest violation of `p_min <= coverage(i)`.
    pub coverage_residual: f64,
    /// Smallest visit probability actually achieved.
    pub min_coverage: f64,
    pub feasible: bool,
    /// Optimum found by vertex enumeration, when the program is small enough.
    pub vertex_optimum: Option<f64>,
    pub optimal: Option<bool>,
}

impl CheckReport {
    pub fn max_residual(&self) -> f64 {
        self.mass_residual
            .max(self.bound_residual)
            .max(self.coverage_residual)
    }
}

pub fn verify_solution(alpha: &AlphaMatrix, dist: &CoverageDistribution) -> CheckReport {
    let pi = &dist.pi;
    let mass_residual = (pi.iter().sum::<f64>() - 1.0).abs();
    let bound_residual = pi.iter().map(|&p| (-p).max(0.0)).fold(0.0, f64::max);
    let min_cov = min_coverage(alpha, pi);
    let coverage_residual = (dist.p_min - min_cov).max(0.0);
    let feasible = mass_residual <= FEASIBILITY_TOL
        && bound_residual <= FEASIBILITY_TOL
        && coverage_residual <= FEASIBILITY_TOL;
    let vertex_optimum =
        (alpha.len() <= MAX_ENUMERATION_STATES).then(|| enumerate_vertices(alpha, 0.0));
    let optimal = vertex_optimum.map(|best| feasible && (best - min_cov).abs() <= OPTIMALITY_TOL);
    CheckReport {
        mass_residual,
        bound_residual,
        coverage_residual,
        min_coverage: min_cov,
        feasible,
        vertex_optimum,
        optimal,
    }
}

/// Maximum of `p_min` over all vertices of the feasible polyhedron.
///
/// Variables are `(pi_1..pi_n, p)`. A vertex makes `n` of the `2n`
/// inequalities tight together with `sum pi = 1`; every such choice is
/// solved and kept when feasible.
pub fn enumerate_vertices(alpha: &AlphaMatrix, floor: f64) -> f64 {
    let n = alpha.len();
    let dim = n + 1;
    // inequalities as (coefficients, rhs) meaning coeffs . v >= rhs
    let mut ineq: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut row = alpha.row(i).to_vec();
        row.push(-1.0);
        ineq.push((row, 0.0));
    }
    for j in 0..n {
        let mut row = vec![0.0; dim];
        row[j] = 1.0;
        ineq.push((row, floor));
    }
    let mut mass = vec![1.0; n];
    mass.push(0.0);

    let mut best = f64::NEG_INFINITY;
    let total = 2 * n;
    for mask in 0u64..(1u64 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let mut system: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut rhs = Vec::with_capacity(dim);
        system.push(mass.clone());
        rhs.push(1.0);
        for (k, (row, b)) in ineq.iter().enumerate() {
            if mask >> k & 1 == 1 {
                system.push(row.clone());
                rhs.push(*b);
            }
        }
        let Some(v) = solve_square(system, rhs) else {
            continue;
        };
        let feasible = ineq.iter().all(|(row, b)| {
            row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() >= b - FEASIBILITY_TOL
        });
        if feasible {
            best = best.max(v[n]);
        }
    }
    best
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            let (upper, lower) = m.split_at_mut(r);
            for (x, &y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * y;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_exact;
    use crate::automaton::tests::fig1;

    #[test]
    fn known_toy_distribution_is_optimal() {
        let alpha = alpha_exact(&fig1(), 3).unwrap();
        let d = CoverageDistribution::from_pi(&alpha, vec![0.0, 0.526315, 0.0, 0.473685]);
        let r = verify_solution(&alpha, &d);
        assert!(r.feasible);
        assert!((r.min_coverage - 23.0 / 38.0).abs() < 1e-5);
        assert!((r.vertex_optimum.unwrap() - 23.0 / 38.0).abs() < 1e-12);
        assert_eq!(r.optimal, Some(true));
    }

    #[test]
    fn uniform_is_suboptimal() {
        let alpha = alpha_exact(&fig1(), 3).unwrap();
        let d = CoverageDistribution::from_pi(&alpha, vec![0.25; 4]);
        let r = verify_solution(&alpha, &d);
        assert!(r.feasible);
        let expected = 0.25 * (0.25 + 1.0 + 1.0 / 13.0 + 1.0 / 6.0);
        assert!((r.min_coverage - expected).abs() < 1e-12);
        assert_eq!(r.optimal, Some(false));
    }

    #[test]
    fn identity_uniform_is_optimal() {
        let alpha = AlphaMatrix::identity(3);
        let d = CoverageDistribution::from_pi(&alpha, vec![1.0 / 3.0; 3]);
        assert_eq!(verify_solution(&alpha, &d).optimal, Some(true));
    }

    #[test]
    fn infeasible_claim_is_reported() {
        let alpha = AlphaMatrix::identity(2);
        let mut d = CoverageDistribution::from_pi(&alpha, vec![0.7, 0.7]);
        d.p_min = 0.9;
        let r = verify_solution(&alpha, &d);
        assert!(!r.feasible);
        assert!((r.mass_residual - 0.4).abs() < 1e-12);
        assert!((r.coverage_residual - 0.2).abs() < 1e-12);
    }
}
