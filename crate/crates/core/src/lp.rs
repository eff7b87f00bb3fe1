//! Dense two-phase simplex.
//!
//! Problems are `maximize c·x` subject to `≤`, `≥` and `=` rows with `x ≥ 0`.
//! Pivoting uses the most negative reduced cost and switches permanently to
//! Bland's rule once degenerate pivots pile up, so the method terminates and
//! repeated solves of the same program agree bit for bit.

use serde::{Deserialize, Serialize};

/// Pivot and reduced-cost tolerance.
const EPS: f64 = 1e-10;
/// Phase-one residual above which the program is declared infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub kind: ConstraintKind,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// `maximize objective · x`, `x ≥ 0`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<f64>, kind: ConstraintKind, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width mismatch");
        self.constraints.push(Constraint { coeffs, kind, rhs });
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, ConstraintKind::Le, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, ConstraintKind::Ge, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, ConstraintKind::Eq, rhs)
    }

    /// Largest constraint violation of `x` (including `x ≥ 0`).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.kind {
                ConstraintKind::Le => lhs - c.rhs,
                ConstraintKind::Ge => c.rhs - lhs,
                ConstraintKind::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgramSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows + 1` rows of `cols + 1` entries; last row is reduced costs, last
    /// column is the right-hand side
    data: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    degenerate: usize,
    bland: bool,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        self.data[pr * w + pc] = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.data[pr * w + c];
                if v != 0.0 {
                    self.data[r * w + c] -= f * v;
                }
            }
            self.data[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Rebuilds the reduced-cost row for `maximize cost · x`.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        let base = self.rows * w;
        for c in 0..w {
            let mut v = if c < self.cols { -cost[c] } else { 0.0 };
            for r in 0..self.rows {
                let cb = cost[self.basis[r]];
                if cb != 0.0 {
                    v += cb * self.at(r, c);
                }
            }
            self.data[base + c] = v;
        }
    }

    /// Runs the simplex method over columns allowed by `allowed`.
    /// Returns false when unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool, max_pivots: usize) -> bool {
        let degenerate_limit = 10 * (self.rows + self.cols);
        loop {
            if self.pivots >= max_pivots {
                return true;
            }
            let obj = self.rows;
            let entering = if self.bland {
                (0..self.cols).find(|&c| allowed(c) && self.at(obj, c) < -EPS)
            } else {
                let mut best = None;
                let mut most = -EPS;
                for c in 0..self.cols {
                    let v = self.at(obj, c);
                    if v < most && allowed(c) {
                        most = v;
                        best = Some(c);
                    }
                }
                best
            };
            let Some(pc) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, ratio)) = leave else {
                return false;
            };
            if ratio <= EPS {
                self.degenerate += 1;
                if self.degenerate > degenerate_limit {
                    self.bland = true;
                }
            }
            self.pivot(pr, pc);
        }
    }
}

/// Solves `lp` with the two-phase method.
pub fn lp_solve(lp: &LinearProgram) -> LinearProgramSolution {
    let n = lp.num_vars;
    let m = lp.constraints.len();

    // normalise so every right-hand side is non-negative
    let rows: Vec<(Vec<f64>, ConstraintKind, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let kind = match c.kind {
                    ConstraintKind::Le => ConstraintKind::Ge,
                    ConstraintKind::Ge => ConstraintKind::Le,
                    ConstraintKind::Eq => ConstraintKind::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), kind, -c.rhs)
            } else {
                (c.coeffs.clone(), c.kind, c.rhs)
            }
        })
        .collect();

    let n_slack = rows.iter().filter(|r| r.1 != ConstraintKind::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != ConstraintKind::Le).count();
    let cols = n + n_slack + n_art;
    let art_start = n + n_slack;
    let w = cols + 1;
    let mut data = vec![0.0; (m + 1) * w];
    let mut basis = vec![0; m];
    let (mut slack, mut art) = (n, art_start);
    for (r, (coeffs, kind, rhs)) in rows.iter().enumerate() {
        data[r * w..r * w + n].copy_from_slice(coeffs);
        data[r * w + cols] = *rhs;
        match kind {
            ConstraintKind::Le => {
                data[r * w + slack] = 1.0;
                basis[r] = slack;
                slack += 1;
            }
            ConstraintKind::Ge => {
                data[r * w + slack] = -1.0;
                slack += 1;
                data[r * w + art] = 1.0;
                basis[r] = art;
                art += 1;
            }
            ConstraintKind::Eq => {
                data[r * w + art] = 1.0;
                basis[r] = art;
                art += 1;
            }
        }
    }

    let mut t = Tableau {
        rows: m,
        cols,
        data,
        basis,
        pivots: 0,
        degenerate: 0,
        bland: false,
    };
    let max_pivots = 50 * (m + cols) + 1000;

    if n_art > 0 {
        let cost: Vec<f64> = (0..cols).map(|c| if c >= art_start { -1.0 } else { 0.0 }).collect();
        t.set_objective(&cost);
        t.optimize(&|_| true, max_pivots);
        let residual = -t.at(m, cols);
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if residual > FEASIBILITY_TOL * scale {
            return LinearProgramSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective: f64::NAN,
                pivots: t.pivots,
            };
        }
        // drive remaining artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| t.at(r, c).abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    t.set_objective(&cost);
    t.degenerate = 0;
    let bounded = t.optimize(&|c| c < art_start, max_pivots + t.pivots);
    if !bounded {
        return LinearProgramSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; n],
            objective: f64::INFINITY,
            pivots: t.pivots,
        };
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LinearProgramSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        pivots: t.pivots,
    }
}
