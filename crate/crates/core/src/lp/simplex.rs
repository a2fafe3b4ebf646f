//! Dense primal simplex on a dictionary (compact tableau).
//!
//! Solves `maximize c.x  s.t.  A x <= b, x >= 0` with `b >= 0`, so the
//! all-slack basis is feasible and no phase one is needed.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Pivot tolerance: coefficients of smaller magnitude are treated as zero.
pub const PIVOT_TOL: f64 = 1e-9;

/// Rows shorter than this are updated sequentially.
const PAR_MIN_COLS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables; never cycles but
    /// can be very slow on large programs.
    Bland,
    /// Most negative reduced cost, falling back to Bland after a run of
    /// degenerate pivots.
    #[default]
    Dantzig,
}

#[derive(Debug, Clone)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual value of each `<=` row.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

/// Dictionary `x_B + T x_N = rhs`, objective row `z + obj . x_N = value`.
struct Dictionary {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    value: f64,
    // variable ids: 0..cols are structural, cols.. are slacks
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Dictionary {
    fn entering(&self, rule: PivotRule) -> Option<usize> {
        match rule {
            PivotRule::Bland => (0..self.cols)
                .filter(|&c| self.obj[c] < -PIVOT_TOL)
                .min_by_key(|&c| self.nonbasic[c]),
            PivotRule::Dantzig => {
                (0..self.cols)
                    .filter(|&c| self.obj[c] < -PIVOT_TOL)
                    .min_by(|&a, &b| {
                        self.obj[a]
                            .partial_cmp(&self.obj[b])
                            .unwrap()
                            .then(self.nonbasic[a].cmp(&self.nonbasic[b]))
                    })
            }
        }
    }

    /// Minimum-ratio row; ties go to the smallest basic variable id.
    fn leaving(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.table[r * self.cols + e];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs[r] / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio || (ratio == bratio && self.basic[r] < self.basic[br]) {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let cols = self.cols;
        let piv = self.table[r * cols + e];
        let inv = 1.0 / piv;
        {
            let prow = &mut self.table[r * cols..(r + 1) * cols];
            for v in prow.iter_mut() {
                *v *= inv;
            }
            prow[e] = inv;
        }
        self.rhs[r] *= inv;
        let prow: Vec<f64> = self.table[r * cols..(r + 1) * cols].to_vec();
        let nz: Vec<usize> = (0..cols).filter(|&c| c != e && prow[c] != 0.0).collect();
        let prhs = self.rhs[r];

        let update = |row: &mut [f64], rhs: &mut f64| {
            let f = row[e];
            if f == 0.0 {
                return;
            }
            for &c in &nz {
                row[c] -= f * prow[c];
            }
            row[e] = -f * inv;
            *rhs -= f * prhs;
        };

        let (before, rest) = self.table.split_at_mut(r * cols);
        let after = &mut rest[cols..];
        let (rhs_before, rhs_rest) = self.rhs.split_at_mut(r);
        let rhs_after = &mut rhs_rest[1..];
        if cols >= PAR_MIN_COLS {
            before
                .par_chunks_mut(cols)
                .zip(rhs_before.par_iter_mut())
                .for_each(|(row, rhs)| update(row, rhs));
            after
                .par_chunks_mut(cols)
                .zip(rhs_after.par_iter_mut())
                .for_each(|(row, rhs)| update(row, rhs));
        } else {
            for (row, rhs) in before.chunks_mut(cols).zip(rhs_before.iter_mut()) {
                update(row, rhs);
            }
            for (row, rhs) in after.chunks_mut(cols).zip(rhs_after.iter_mut()) {
                update(row, rhs);
            }
        }
        update(&mut self.obj, &mut self.value);

        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[e]);
    }
}

/// Solves the LP; `a` is row-major `rows x cols`.
pub fn maximize(
    a: Vec<f64>,
    b: Vec<f64>,
    c: &[f64],
    rule: PivotRule,
    max_iterations: usize,
) -> Result<SimplexSolution> {
    let cols = c.len();
    let rows = b.len();
    assert_eq!(a.len(), rows * cols);
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::InfeasibleLp);
    }
    let mut d = Dictionary {
        rows,
        cols,
        table: a,
        rhs: b,
        obj: c.iter().map(|v| -v).collect(),
        value: 0.0,
        basic: (cols..cols + rows).collect(),
        nonbasic: (0..cols).collect(),
    };

    let mut iterations = 0;
    let mut degenerate_run = 0;
    loop {
        let active = if rule == PivotRule::Dantzig && degenerate_run < 50 {
            PivotRule::Dantzig
        } else {
            PivotRule::Bland
        };
        let Some(e) = d.entering(active) else {
            break;
        };
        let Some(r) = d.leaving(e) else {
            // the coverage LP is always bounded; an unbounded ray means the
            // tableau has lost precision
            return Err(Error::NumericInstability { iterations });
        };
        if iterations >= max_iterations {
            return Err(Error::NumericInstability { iterations });
        }
        if d.rhs[r].abs() <= PIVOT_TOL {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        d.pivot(r, e);
        iterations += 1;
    }

    let mut x = vec![0.0; cols];
    for (r, &var) in d.basic.iter().enumerate() {
        if var < cols {
            x[var] = d.rhs[r];
        }
    }
    let mut duals = vec![0.0; rows];
    for (c, &var) in d.nonbasic.iter().enumerate() {
        if var >= cols {
            duals[var - cols] = d.obj[c];
        }
    }
    Ok(SimplexSolution {
        x,
        objective: d.value,
        duals,
        iterations,
    })
}
