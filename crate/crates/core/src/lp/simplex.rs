//! Dense two-phase revised simplex over an explicit basis inverse.
//!
//! The model is first rewritten as `min c^T y, A y = b, y >= 0, b >= 0` by
//! shifting, mirroring, splitting or substituting variables, turning finite
//! upper bounds into rows, and adding slack, surplus and artificial columns.
//! The basis inverse is kept row-major and updated by elementary row
//! operations after each pivot; it is rebuilt from scratch every
//! `REFACTOR_EVERY` pivots and before optimality is declared.

use nalgebra::DMatrix;

use super::{ConstraintSense, LpModel, LpSolution, LpStatus, ObjectiveSense, SolverConfig};
use crate::error::{Error, ResourceKind, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 30;

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Fixed(f64),
    Shifted { col: usize, lower: f64 },
    Mirrored { col: usize, upper: f64 },
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    a: DMatrix<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    /// Row -> column that can start in the basis (a +1 slack), if any.
    slack_basis: Vec<Option<usize>>,
    num_structural: usize,
    maps: Vec<VarMap>,
}

impl StandardForm {
    fn build(model: &LpModel) -> Self {
        let mut maps = Vec::with_capacity(model.num_vars());
        let mut ncols = 0;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for v in model.variables() {
            let map = if v.lower == v.upper {
                VarMap::Fixed(v.lower)
            } else if v.lower.is_finite() {
                let col = ncols;
                ncols += 1;
                if v.upper.is_finite() {
                    bound_rows.push((col, v.upper - v.lower));
                }
                VarMap::Shifted {
                    col,
                    lower: v.lower,
                }
            } else if v.upper.is_finite() {
                let col = ncols;
                ncols += 1;
                VarMap::Mirrored {
                    col,
                    upper: v.upper,
                }
            } else {
                let pos = ncols;
                ncols += 2;
                VarMap::Split { pos, neg: pos + 1 }
            };
            maps.push(map);
        }
        let num_structural = ncols;

        // Rows over structural columns plus a slack sign.
        let mut rows: Vec<(Vec<f64>, f64, f64)> = Vec::new();
        for c in model.constraints() {
            let mut coef = vec![0.0; num_structural];
            let mut rhs = c.rhs;
            for &(j, a) in &c.terms {
                match maps[j] {
                    VarMap::Fixed(v) => rhs -= a * v,
                    VarMap::Shifted { col, lower } => {
                        coef[col] += a;
                        rhs -= a * lower;
                    }
                    VarMap::Mirrored { col, upper } => {
                        coef[col] -= a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coef[pos] += a;
                        coef[neg] -= a;
                    }
                }
            }
            let slack = match c.sense {
                ConstraintSense::Le => 1.0,
                ConstraintSense::Ge => -1.0,
                ConstraintSense::Eq => 0.0,
            };
            rows.push((coef, slack, rhs));
        }
        for (col, width) in bound_rows {
            let mut coef = vec![0.0; num_structural];
            coef[col] = 1.0;
            rows.push((coef, 1.0, width));
        }

        let m = rows.len();
        let num_slacks = rows.iter().filter(|r| r.1 != 0.0).count();
        for row in rows.iter_mut() {
            if row.2 < 0.0 {
                row.0.iter_mut().for_each(|v| *v = -*v);
                row.1 = -row.1;
                row.2 = -row.2;
            }
        }
        let needs_artificial = rows.iter().filter(|r| r.1 != 1.0).count();
        let total = num_structural + num_slacks + needs_artificial;
        let mut a = DMatrix::<f64>::zeros(m, total);
        let mut b = Vec::with_capacity(m);
        let mut slack_basis = Vec::with_capacity(m);
        let mut next_slack = num_structural;
        let mut next_art = num_structural + num_slacks;
        for (i, (coef, slack, rhs)) in rows.into_iter().enumerate() {
            for (j, v) in coef.into_iter().enumerate() {
                a[(i, j)] = v;
            }
            if slack != 0.0 {
                a[(i, next_slack)] = slack;
                next_slack += 1;
            }
            if slack == 1.0 {
                slack_basis.push(Some(next_slack - 1));
            } else {
                a[(i, next_art)] = 1.0;
                slack_basis.push(None);
                next_art += 1;
            }
            b.push(rhs);
        }

        let sign = match model.objective_sense() {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; total];
        for &(j, c) in model.objective() {
            match maps[j] {
                VarMap::Fixed(_) => {}
                VarMap::Shifted { col, .. } => cost[col] += sign * c,
                VarMap::Mirrored { col, .. } => cost[col] -= sign * c,
                VarMap::Split { pos, neg } => {
                    cost[pos] += sign * c;
                    cost[neg] -= sign * c;
                }
            }
        }

        StandardForm {
            a,
            b,
            cost,
            slack_basis,
            num_structural,
            maps,
        }
    }

    fn first_artificial(&self) -> usize {
        self.a.ncols() - self.slack_basis.iter().filter(|s| s.is_none()).count()
    }

    fn recover(&self, y: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|map| match *map {
                VarMap::Fixed(v) => v,
                VarMap::Shifted { col, lower } => lower + y[col],
                VarMap::Mirrored { col, upper } => upper - y[col],
                VarMap::Split { pos, neg } => y[pos] - y[neg],
            })
            .collect()
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    a: &'a DMatrix<f64>,
    b: &'a [f64],
    m: usize,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    /// Row-major basis inverse.
    binv: Vec<f64>,
    xb: Vec<f64>,
    barred: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
}

impl<'a> Simplex<'a> {
    fn new(
        a: &'a DMatrix<f64>,
        b: &'a [f64],
        basis: Vec<usize>,
        max_iterations: usize,
    ) -> Result<Self> {
        let m = a.nrows();
        let mut position = vec![None; a.ncols()];
        for (r, &col) in basis.iter().enumerate() {
            position[col] = Some(r);
        }
        let mut s = Simplex {
            a,
            b,
            m,
            basis,
            position,
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            barred: vec![false; a.ncols()],
            iterations: 0,
            max_iterations,
            since_refactor: 0,
        };
        s.refactor()?;
        Ok(s)
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut basis_matrix = DMatrix::<f64>::zeros(m, m);
        for (r, &col) in self.basis.iter().enumerate() {
            basis_matrix.set_column(r, &self.a.column(col));
        }
        let inv = basis_matrix
            .try_inverse()
            .ok_or_else(|| Error::domain("simplex basis became singular"))?;
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = inv[(i, k)];
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v: f64 = row.iter().zip(self.b).map(|(x, y)| x * y).sum();
            // Primal feasibility is maintained; clamp accumulated round-off.
            self.xb[i] = if v < 0.0 && v > -1e-9 { 0.0 } else { v };
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, &col) in self.basis.iter().enumerate() {
            let c = cost[col];
            if c == 0.0 {
                continue;
            }
            let row = &self.binv[r * m..(r + 1) * m];
            for (yk, bk) in y.iter_mut().zip(row) {
                *yk += c * bk;
            }
        }
        y
    }

    fn column_image(&self, col: usize) -> Vec<f64> {
        let m = self.m;
        let a_col = self.a.column(col);
        (0..m)
            .map(|i| {
                let row = &self.binv[i * m..(i + 1) * m];
                row.iter().zip(a_col.iter()).map(|(x, y)| x * y).sum()
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, entering: usize, w: &[f64]) {
        let m = self.m;
        let theta = self.xb[r] / w[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * w[i];
                if self.xb[i] < 0.0 && self.xb[i] > -1e-11 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;

        let inv_piv = 1.0 / w[r];
        for k in 0..m {
            self.binv[r * m + k] *= inv_piv;
        }
        let (pivot_row, _) = {
            let start = r * m;
            (self.binv[start..start + m].to_vec(), ())
        };
        for i in 0..m {
            if i == r || w[i] == 0.0 {
                continue;
            }
            let f = w[i];
            let row = &mut self.binv[i * m..(i + 1) * m];
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
        }

        let leaving = self.basis[r];
        self.position[leaving] = None;
        self.position[entering] = Some(r);
        self.basis[r] = entering;
        self.since_refactor += 1;
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<Outcome> {
        let ncols = self.a.ncols();
        let mut degenerate_run = 0;
        let mut bland = false;
        let mut fresh = false;
        loop {
            let y = self.duals(cost);
            let mut entering = None;
            let mut best = -OPTIMALITY_TOL;
            for j in 0..ncols {
                if self.position[j].is_some() || self.barred[j] {
                    continue;
                }
                let col = self.a.column(j);
                let d = cost[j] - y.iter().zip(col.iter()).map(|(u, v)| u * v).sum::<f64>();
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                if fresh || self.since_refactor == 0 {
                    return Ok(Outcome::Optimal);
                }
                self.refactor()?;
                fresh = true;
                continue;
            };
            fresh = false;

            let w = self.column_image(q);
            let mut min_ratio = f64::INFINITY;
            for r in 0..self.m {
                if w[r] > PIVOT_TOL {
                    min_ratio = min_ratio.min(self.xb[r].max(0.0) / w[r]);
                }
            }
            if min_ratio == f64::INFINITY {
                return Ok(Outcome::Unbounded);
            }
            let slack = 1e-12 * (1.0 + min_ratio);
            let mut leave: Option<usize> = None;
            for r in 0..self.m {
                if w[r] <= PIVOT_TOL || self.xb[r].max(0.0) / w[r] > min_ratio + slack {
                    continue;
                }
                leave = match leave {
                    None => Some(r),
                    Some(cur) => {
                        let better = if bland {
                            self.basis[r] < self.basis[cur]
                        } else {
                            w[r] > w[cur]
                        };
                        Some(if better { r } else { cur })
                    }
                };
            }
            let r = leave.expect("ratio test found a candidate");

            if min_ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_SWITCH {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }

            self.pivot(r, q, &w);
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::resource(
                    ResourceKind::IterationLimit,
                    format!("simplex exceeded {} pivots", self.max_iterations),
                ));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
        }
    }

    /// Pivots basic artificials out where some real column can replace them.
    fn expel_artificials(&mut self, first_artificial: usize) -> Result<()> {
        let m = self.m;
        for r in 0..m {
            if self.basis[r] < first_artificial {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..first_artificial {
                if self.position[j].is_some() {
                    continue;
                }
                let alpha: f64 = row
                    .iter()
                    .zip(self.a.column(j).iter())
                    .map(|(x, y)| x * y)
                    .sum();
                if alpha.abs() > 1e-7 && best.is_none_or(|(_, b)| alpha.abs() > b) {
                    best = Some((j, alpha.abs()));
                }
            }
            if let Some((j, _)) = best {
                let w = self.column_image(j);
                self.pivot(r, j, &w);
            }
        }
        self.refactor()
    }
}

pub(super) fn solve(model: &LpModel, config: &SolverConfig) -> Result<LpSolution> {
    let sf = StandardForm::build(model);
    let m = sf.a.nrows();
    let ncols = sf.a.ncols();
    let first_art = sf.first_artificial();
    let max_iterations = config.max_iterations.unwrap_or(20_000 + 100 * (m + ncols));

    let mut next_art = first_art;
    let basis: Vec<usize> = sf
        .slack_basis
        .iter()
        .map(|s| {
            s.unwrap_or_else(|| {
                next_art += 1;
                next_art - 1
            })
        })
        .collect();

    let mut simplex = Simplex::new(&sf.a, &sf.b, basis, max_iterations)?;

    if first_art < ncols {
        let mut phase_one = vec![0.0; ncols];
        phase_one[first_art..].iter_mut().for_each(|c| *c = 1.0);
        simplex.optimize(&phase_one)?;
        let infeasibility: f64 = simplex
            .basis
            .iter()
            .zip(&simplex.xb)
            .filter(|(col, _)| **col >= first_art)
            .map(|(_, x)| x.max(0.0))
            .sum();
        let scale = sf.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > config.feasibility_tol * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible));
        }
        simplex.expel_artificials(first_art)?;
        for j in first_art..ncols {
            simplex.barred[j] = true;
        }
    }

    if let Outcome::Unbounded = simplex.optimize(&sf.cost)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut y = vec![0.0; ncols];
    for (r, &col) in simplex.basis.iter().enumerate() {
        y[col] = simplex.xb[r].max(0.0);
    }
    let mut values = sf.recover(&y[..sf.num_structural]);
    for (x, v) in values.iter_mut().zip(model.variables()) {
        *x = x.clamp(v.lower, v.upper);
    }
    let objective = model.objective_value(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}
