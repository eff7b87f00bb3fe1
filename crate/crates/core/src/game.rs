//! Two-player zero-sum (constant-sum) matrix games solved by linear
//! programming.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{lp_solve, LinearProgram, LpStatus};

/// Probabilities below this are clipped to zero before renormalising.
pub const PROB_CLIP: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("payoff matrix is empty")]
    Empty,
    #[error("payoff matrix rows have different lengths")]
    Ragged,
    #[error("payoff matrix has a non-finite entry")]
    NonFinite,
    #[error("linear program ended with status {0:?}")]
    Numerical(LpStatus),
}

/// Payoffs to the row (maximising) player.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    payoff: Vec<f64>,
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let rows = payoff.len();
        let cols = payoff.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(GameError::Empty);
        }
        if payoff.iter().any(|r| r.len() != cols) {
            return Err(GameError::Ragged);
        }
        let flat: Vec<f64> = payoff.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(GameError::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            payoff: flat,
        })
    }

    /// Defender-vs-attacker game where row `r` protects the targets flagged
    /// in `protects[r]`: `U(r, t) = 1 - (1 - I(r, t)) · values[t]`.
    pub fn security(protects: &[Vec<bool>], values: &[f64]) -> Result<Self, GameError> {
        Self::new(
            protects
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(values)
                        .map(|(&covered, &v)| if covered { 1.0 } else { 1.0 - v })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.payoff[r * self.cols + c]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            payoff: self.payoff.iter().map(|v| v * factor).collect(),
        }
    }

    /// Worst-case payoff of a row mixture.
    pub fn guaranteed_by_row(&self, row: &[f64]) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| row[r] * self.get(r, c)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Best-response payoff the row player gets against a column mixture.
    pub fn conceded_by_col(&self, col: &[f64]) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| col[c] * self.get(r, c)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    pub probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn pure(n: usize, action: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[action] = 1.0;
        Self { probs }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Clips tiny and negative entries and renormalises.
    pub fn from_weights(weights: &[f64]) -> Self {
        let clipped: Vec<f64> = weights.iter().map(|&p| if p < PROB_CLIP { 0.0 } else { p }).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Self::uniform(weights.len().max(1));
        }
        Self {
            probs: clipped.into_iter().map(|p| p / total).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|&p| p >= 0.0) && (self.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    /// maxmin strategy of the row player
    pub row: MixedStrategy,
    /// minmax strategy of the column player
    pub col: MixedStrategy,
    /// value from the row player's program
    pub value: f64,
    /// value from the column player's program
    pub col_value: f64,
}

/// Solves both players' programs. Payoffs are shifted to be at least one so
/// the value variable can be kept non-negative.
pub fn solve_zero_sum(game: &MatrixGame) -> Result<ZeroSumSolution, GameError> {
    let (rows, cols) = (game.rows, game.cols);
    let min = game.payoff.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;

    // row player: max v s.t. Σ_r x_r A(r,c) >= v for all c, Σ x = 1
    let mut objective = vec![0.0; rows + 1];
    objective[rows] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for c in 0..cols {
        let mut coeffs: Vec<f64> = (0..rows).map(|r| game.get(r, c) + shift).collect();
        coeffs.push(-1.0);
        lp.add_ge(coeffs, 0.0);
    }
    let mut simplex = vec![1.0; rows];
    simplex.push(0.0);
    lp.add_eq(simplex, 1.0);
    let row_sol = lp_solve(&lp);
    if row_sol.status != LpStatus::Optimal {
        return Err(GameError::Numerical(row_sol.status));
    }

    // column player: max -w s.t. Σ_c y_c A(r,c) <= w for all r, Σ y = 1
    let mut objective = vec![0.0; cols + 1];
    objective[cols] = -1.0;
    let mut lp = LinearProgram::maximize(objective);
    for r in 0..rows {
        let mut coeffs: Vec<f64> = (0..cols).map(|c| game.get(r, c) + shift).collect();
        coeffs.push(-1.0);
        lp.add_le(coeffs, 0.0);
    }
    let mut simplex = vec![1.0; cols];
    simplex.push(0.0);
    lp.add_eq(simplex, 1.0);
    let col_sol = lp_solve(&lp);
    if col_sol.status != LpStatus::Optimal {
        return Err(GameError::Numerical(col_sol.status));
    }

    Ok(ZeroSumSolution {
        row: MixedStrategy::from_weights(&row_sol.x[..rows]),
        col: MixedStrategy::from_weights(&col_sol.x[..cols]),
        value: row_sol.x[rows] - shift,
        col_value: col_sol.x[cols] - shift,
    })
}
