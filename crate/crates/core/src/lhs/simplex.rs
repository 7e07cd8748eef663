//! Dense revised simplex for `min cᵀw  s.t.  X w = b, w ≥ 0` with few rows
//! and many columns.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 50;
const DEGENERATE_STREAK: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Phase-2 objective when optimal, residual phase-1 infeasibility otherwise.
    pub objective: f64,
    /// Nonzero structural variables as (column index, value).
    pub primal: Vec<(usize, f64)>,
    /// Optimal dual y (yᵀX ≤ c) when optimal, Farkas ray (yᵀX ≤ 0 < yᵀb)
    /// when infeasible. Expressed in the original row signs.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

struct Tableau<'a> {
    rows: usize,
    cols: usize,
    // column-major copy of X with rows sign-flipped so that b ≥ 0
    data: Vec<f64>,
    cost: &'a [f64],
    sign: Vec<f64>,
    rhs: DVector<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: DMatrix<f64>,
    xb: DVector<f64>,
    iterations: usize,
}

enum Phase {
    One,
    Two,
}

impl<'a> Tableau<'a> {
    fn column(&self, id: usize) -> DVector<f64> {
        if id < self.cols {
            DVector::from_column_slice(&self.data[id * self.rows..(id + 1) * self.rows])
        } else {
            let mut e = DVector::zeros(self.rows);
            e[id - self.cols] = 1.0;
            e
        }
    }

    fn cost_of(&self, id: usize, phase: &Phase) -> f64 {
        match phase {
            Phase::One => {
                if id >= self.cols {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if id >= self.cols {
                    0.0
                } else {
                    self.cost[id]
                }
            }
        }
    }

    fn duals(&self, phase: &Phase) -> DVector<f64> {
        let cb = DVector::from_iterator(
            self.rows,
            self.basis.iter().map(|&id| self.cost_of(id, phase)),
        );
        self.binv.tr_mul(&cb)
    }

    fn refactor(&mut self) -> Result<()> {
        let mut b = DMatrix::zeros(self.rows, self.rows);
        for (k, &id) in self.basis.iter().enumerate() {
            b.set_column(k, &self.column(id));
        }
        self.binv = b
            .try_inverse()
            .ok_or_else(|| Error::Lp("basis matrix became singular".into()))?;
        self.xb = &self.binv * &self.rhs;
        for v in self.xb.iter_mut() {
            if *v < 0.0 && *v > -1e-11 {
                *v = 0.0;
            }
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &DVector<f64>) {
        let pr = u[r];
        let theta = self.xb[r] / pr;
        for i in 0..self.rows {
            if i != r {
                self.xb[i] -= theta * u[i];
            }
        }
        self.xb[r] = theta;
        let row_r: Vec<f64> = (0..self.rows).map(|j| self.binv[(r, j)] / pr).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = u[i];
            if f != 0.0 {
                for (j, &rv) in row_r.iter().enumerate() {
                    self.binv[(i, j)] -= f * rv;
                }
            }
        }
        for (j, rv) in row_r.into_iter().enumerate() {
            self.binv[(r, j)] = rv;
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
    }

    fn run(&mut self, phase: Phase, max_iterations: usize) -> Result<()> {
        let mut streak = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= max_iterations {
                return Err(Error::Lp(format!(
                    "simplex exceeded {max_iterations} iterations"
                )));
            }
            let y = self.duals(&phase);
            let bland = streak > DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = -PRICE_TOL;
            for j in 0..self.cols {
                if self.is_basic[j] {
                    continue;
                }
                let col = &self.data[j * self.rows..(j + 1) * self.rows];
                let yx: f64 = col.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
                let d = self.cost_of(j, &phase) - yx;
                if bland {
                    if d < -PRICE_TOL {
                        entering = Some(j);
                        break;
                    }
                } else if d < best {
                    best = d;
                    entering = Some(j);
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };
            let u = &self.binv * self.column(q);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                if u[i] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.xb[i].max(0.0) / u[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio);
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                // prefer pushing artificials out, then larger pivots
                                let ai = self.basis[i] >= self.cols;
                                let ar = self.basis[r] >= self.cols;
                                (ai && !ar) || (ai == ar && u[i] > u[r])
                            }
                        } else {
                            ratio < best_ratio
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((r, best_ratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Lp("linear program is unbounded".into()));
            };
            streak = if ratio <= 1e-14 { streak + 1 } else { 0 };
            self.pivot(r, q, &u);
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
        }
    }

    /// Replace artificial basics sitting at zero by structural columns where
    /// possible; rows for which no column qualifies are redundant.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] < self.cols {
                continue;
            }
            let row: Vec<f64> = (0..self.rows).map(|j| self.binv[(r, j)]).collect();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                if self.is_basic[j] {
                    continue;
                }
                let col = &self.data[j * self.rows..(j + 1) * self.rows];
                let v: f64 = col.iter().zip(&row).map(|(a, b)| a * b).sum();
                if v.abs() > 1e-9 && best.is_none_or(|(_, bv)| v.abs() > bv) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                let u = &self.binv * self.column(j);
                self.pivot(r, j, &u);
            }
        }
    }
}

/// Solve `min cᵀw s.t. Σ_j w_j x_j = b, w ≥ 0`.
///
/// `columns` holds the x_j, each of length `rhs.len()`.
pub fn solve(columns: &[Vec<f64>], cost: &[f64], rhs: &[f64]) -> Result<LpSolution> {
    let rows = rhs.len();
    let cols = columns.len();
    if rows == 0 || cols == 0 {
        return Err(Error::Lp("empty linear program".into()));
    }
    if cost.len() != cols {
        return Err(Error::Lp(format!(
            "{} costs supplied for {cols} columns",
            cost.len()
        )));
    }
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Lp("column length does not match the right-hand side".into()));
    }
    if rhs.iter().chain(cost).chain(columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Lp("non-finite coefficient".into()));
    }

    let sign: Vec<f64> = rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut data = Vec::with_capacity(rows * cols);
    for c in columns {
        data.extend(c.iter().zip(&sign).map(|(v, s)| v * s));
    }
    let b = DVector::from_iterator(rows, rhs.iter().zip(&sign).map(|(v, s)| v * s));
    let mut is_basic = vec![false; cols + rows];
    for flag in &mut is_basic[cols..] {
        *flag = true;
    }
    let mut t = Tableau {
        rows,
        cols,
        data,
        cost,
        sign,
        xb: b.clone(),
        rhs: b,
        basis: (cols..cols + rows).collect(),
        is_basic,
        binv: DMatrix::identity(rows, rows),
        iterations: 0,
    };
    let max_iterations = 50_000 + 20 * (rows + cols);

    t.run(Phase::One, max_iterations)?;
    t.refactor()?;
    let infeasibility: f64 = t
        .basis
        .iter()
        .zip(t.xb.iter())
        .filter(|(id, _)| **id >= cols)
        .map(|(_, v)| v.max(0.0))
        .sum();
    let scale = 1.0 + t.rhs.iter().map(|v| v.abs()).sum::<f64>();
    if infeasibility > 1e-9 * scale {
        let y = t.duals(&Phase::One);
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: infeasibility,
            primal: Vec::new(),
            dual: y.iter().zip(&t.sign).map(|(v, s)| v * s).collect(),
            iterations: t.iterations,
        });
    }

    t.drive_out_artificials();
    t.refactor()?;
    t.run(Phase::Two, max_iterations)?;
    t.refactor()?;

    let primal: Vec<(usize, f64)> = t
        .basis
        .iter()
        .zip(t.xb.iter())
        .filter(|(id, v)| **id < cols && **v > 0.0)
        .map(|(id, v)| (*id, *v))
        .collect();
    let objective = primal.iter().map(|(id, v)| cost[*id] * v).sum();
    let y = t.duals(&Phase::Two);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        primal,
        dual: y.iter().zip(&t.sign).map(|(v, s)| v * s).collect(),
        iterations: t.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp_with_known_optimum() {
        // min w0 + 2 w1 + 3 w2  s.t.  w0 + w1 + w2 = 1,  w1 − w2 = −0.5
        let cols = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, -1.0]];
        let sol = solve(&cols, &[1.0, 2.0, 3.0], &[1.0, -0.5]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // w2 = 0.5, w0 = 0.5 gives 2.0
        assert!((sol.objective - 2.0).abs() < 1e-12, "{}", sol.objective);
        // strong duality
        let dual_obj = sol.dual[0] * 1.0 + sol.dual[1] * -0.5;
        assert!((dual_obj - 2.0).abs() < 1e-12);
        for (j, c) in cols.iter().enumerate() {
            let yx = sol.dual[0] * c[0] + sol.dual[1] * c[1];
            assert!(yx <= [1.0, 2.0, 3.0][j] + 1e-12);
        }
    }

    #[test]
    fn infeasible_lp_returns_farkas_ray() {
        // only nonnegative combinations of (1, 1): cannot reach (1, −1)
        let cols = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        let sol = solve(&cols, &[1.0, 1.0], &[1.0, -1.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let yb = sol.dual[0] - sol.dual[1];
        assert!(yb > 0.0);
        for c in &cols {
            assert!(sol.dual[0] * c[0] + sol.dual[1] * c[1] <= 1e-12);
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let cols = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![-1.0, -2.0]];
        let sol = solve(&cols, &[1.0, 1.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example in equality form with slacks
        let cols = vec![
            vec![0.25, 0.5, 0.0],
            vec![-60.0, -90.0, 0.0],
            vec![-0.04, -0.02, 1.0],
            vec![9.0, 3.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let cost = [-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0];
        let sol = solve(&cols, &cost, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-10, "{}", sol.objective);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(solve(&[vec![1.0]], &[1.0, 2.0], &[1.0]).is_err());
        assert!(solve(&[vec![f64::NAN]], &[1.0], &[1.0]).is_err());
        assert!(solve(&[], &[], &[1.0]).is_err());
    }
}
