//! Dense two-phase simplex for the small linear programs that describe
//! zero-discord channels.
//!
//! Problems are `min c·x` subject to `A_eq x = b_eq`, `A_le x <= b_le`,
//! `x >= 0`. Pivoting follows Bland's rule, which rules out cycling; an
//! iteration cap still guards against numerical stalls.

use nalgebra::{DMatrix, DVector};

use crate::error::{DiscordError, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: DVector<f64>,
    pub a_eq: DMatrix<f64>,
    pub b_eq: DVector<f64>,
    pub a_le: DMatrix<f64>,
    pub b_le: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    /// Equality-constrained program with no inequality rows.
    pub fn equality(objective: DVector<f64>, a_eq: DMatrix<f64>, b_eq: DVector<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            a_eq,
            b_eq,
            a_le: DMatrix::zeros(0, n),
            b_le: DVector::zeros(0),
        }
    }

    pub fn with_le_row(mut self, row: &[f64], rhs: f64) -> Self {
        let n = self.objective.len();
        assert_eq!(row.len(), n, "inequality row has wrong length");
        let k = self.a_le.nrows();
        self.a_le = self.a_le.insert_row(k, 0.0);
        for (j, &v) in row.iter().enumerate() {
            self.a_le[(k, j)] = v;
        }
        self.b_le = self.b_le.push(rhs);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |expected: usize, found: usize| Err(DiscordError::DimensionMismatch { expected, found });
        if self.a_eq.ncols() != n {
            return bad(n, self.a_eq.ncols());
        }
        if self.a_le.ncols() != n {
            return bad(n, self.a_le.ncols());
        }
        if self.a_eq.nrows() != self.b_eq.len() {
            return bad(self.a_eq.nrows(), self.b_eq.len());
        }
        if self.a_le.nrows() != self.b_le.len() {
            return bad(self.a_le.nrows(), self.b_le.len());
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        self.check_shapes()?;
        let n = self.num_vars();
        let m_eq = self.a_eq.nrows();
        let m_le = self.a_le.nrows();
        let m = m_eq + m_le;
        // columns: originals | slacks | artificials | rhs
        let n_slack = m_le;
        let art0 = n + n_slack;
        let width = art0 + m + 1;
        let mut rows = Vec::with_capacity(m);
        for r in 0..m {
            let mut row = vec![0.0; width];
            let rhs = if r < m_eq {
                for j in 0..n {
                    row[j] = self.a_eq[(r, j)];
                }
                self.b_eq[r]
            } else {
                let k = r - m_eq;
                for j in 0..n {
                    row[j] = self.a_le[(k, j)];
                }
                row[n + k] = 1.0;
                self.b_le[k]
            };
            row[width - 1] = rhs;
            if rhs < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            row[art0 + r] = 1.0;
            rows.push(row);
        }
        let mut tab = Tableau {
            rows,
            basis: (art0..art0 + m).collect(),
            width,
        };
        let max_iter = 200 * (width + m) + 1000;

        // Phase 1: drive the artificials to zero.
        let mut phase1_cost = vec![0.0; width - 1];
        phase1_cost[art0..art0 + m].iter_mut().for_each(|c| *c = 1.0);
        match tab.optimize(&phase1_cost, |_| true, max_iter)? {
            Status::Optimal => {}
            Status::Unbounded => {
                return Err(DiscordError::NumericalFailure(
                    "phase-1 objective reported unbounded".into(),
                ))
            }
        }
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.rows)
            .filter(|(&b, _)| b >= art0)
            .map(|(_, row)| row[width - 1])
            .sum();
        if infeasibility > FEASIBILITY_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        tab.expel_artificials(art0);

        // Phase 2 on the original objective, artificials frozen out.
        let mut cost = vec![0.0; width - 1];
        cost[..n].copy_from_slice(self.objective.as_slice());
        match tab.optimize(&cost, |j| j < art0, max_iter)? {
            Status::Unbounded => return Ok(LpOutcome::Unbounded),
            Status::Optimal => {}
        }
        let mut x = DVector::zeros(n);
        for (r, &b) in tab.basis.iter().enumerate() {
            if b < n {
                x[b] = tab.rows[r][width - 1].max(0.0);
            }
        }
        let value = self.objective.dot(&x);
        Ok(LpOutcome::Optimal { x, value })
    }
}

enum Status {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width - 1]
    }

    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool, max_iter: usize) -> Result<Status> {
        let ncols = self.width - 1;
        for _ in 0..max_iter {
            let mut is_basic = vec![false; ncols];
            self.basis.iter().for_each(|&b| is_basic[b] = true);
            // Bland: lowest-index improving column enters
            let entering = (0..ncols).find(|&j| {
                if is_basic[j] || !allowed(j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&b, row)| cost[b] * row[j])
                        .sum::<f64>();
                reduced < -PIVOT_TOL
            });
            let Some(col) = entering else {
                return Ok(Status::Optimal);
            };
            // ratio test; ties go to the lowest basic index
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - 1e-12
                            || (ratio <= best_ratio + 1e-12 && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(Status::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(DiscordError::NumericalFailure(format!(
            "simplex exceeded {max_iter} iterations"
        )))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        self.rows[row].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = other[col];
            if f != 0.0 {
                for (v, &pv) in other.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                other[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and get dropped.
    fn expel_artificials(&mut self, art0: usize) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < art0 {
                r += 1;
                continue;
            }
            let candidate = (0..art0)
                .filter(|j| !self.basis.contains(j))
                .max_by(|&a, &b| self.rows[r][a].abs().total_cmp(&self.rows[r][b].abs()))
                .filter(|&j| self.rows[r][j].abs() > 1e-9);
            match candidate {
                Some(j) => {
                    self.pivot(r, j);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }
}
