//! Reference implementations used as oracles by the integration tests. They
//! are deliberately naive and share no code with the library.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use sigpatrol::model::{build_setting, PatrollingSetting, RawSetting, RawTarget};

/// Small graph description with dense vertex indices.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// (vertex, value, deadline), in vertex order
    pub targets: Vec<(usize, f64, u32)>,
}

impl Graph {
    pub fn setting(&self) -> PatrollingSetting {
        let name = |v: usize| format!("v{v}");
        build_setting(&RawSetting {
            vertices: (0..self.n).map(name).collect(),
            edges: self.edges.iter().map(|&(a, b)| (name(a), name(b))).collect(),
            targets: self
                .targets
                .iter()
                .map(|&(v, value, d)| RawTarget {
                    id: name(v),
                    value,
                    deadline: i64::from(d),
                })
                .collect(),
        })
        .expect("test graphs are valid")
    }

    pub fn distances(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        (0..self.n)
            .map(|s| {
                let mut d = vec![u32::MAX; self.n];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(u) = q.pop_front() {
                    for &w in &adj[u] {
                        if d[w] == u32::MAX {
                            d[w] = d[u] + 1;
                            q.push_back(w);
                        }
                    }
                }
                d
            })
            .collect()
    }

    /// Bitmask of targets (by position in `targets`) each vertex covers.
    pub fn cover_masks(&self) -> Vec<u64> {
        let dist = self.distances();
        (0..self.n)
            .map(|v| {
                self.targets
                    .iter()
                    .enumerate()
                    .filter(|(_, &(t, _, d))| dist[v][t] <= d)
                    .fold(0u64, |m, (i, _)| m | (1 << i))
            })
            .collect()
    }

    pub fn is_cover(&self, positions: &[usize]) -> bool {
        let masks = self.cover_masks();
        let full = (1u64 << self.targets.len()) - 1;
        positions.iter().fold(0, |m, &v| m | masks[v]) == full
    }

    /// Smallest covering placement size by trying every subset in order of
    /// size.
    pub fn exhaustive_min_cover(&self) -> usize {
        let masks = self.cover_masks();
        let full = (1u64 << self.targets.len()) - 1;
        for size in 1..=self.n {
            if subsets(self.n, size).any(|s| s.iter().fold(0, |m, &v| m | masks[v]) == full) {
                return size;
            }
        }
        unreachable!("every target covers itself")
    }

    /// Every covering placement with exactly `m` vertices, sorted.
    pub fn covering_placements(&self, m: usize) -> Vec<Vec<usize>> {
        let masks = self.cover_masks();
        let full = (1u64 << self.targets.len()) - 1;
        subsets(self.n, m)
            .filter(|s| s.iter().fold(0, |acc, &v| acc | masks[v]) == full)
            .collect()
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut c = out.clone();
        let mut i = k;
        current = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break Some(c);
            }
        };
        Some(out)
    })
}

fn random_targets<R: Rng>(rng: &mut R, n: usize, deadlines: (u32, u32), target_prob: f64) -> Vec<(usize, f64, u32)> {
    let mut targets = Vec::new();
    for v in 0..n {
        if rng.gen_bool(target_prob) {
            targets.push((v, 1.0 - rng.gen::<f64>(), rng.gen_range(deadlines.0..=deadlines.1)));
        }
    }
    if targets.is_empty() {
        let v = rng.gen_range(0..n);
        targets.push((v, 1.0, deadlines.0));
    }
    targets
}

/// Random recursive tree; each vertex is a target with probability
/// `target_prob`.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, deadlines: (u32, u32), target_prob: f64) -> Graph {
    let edges = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph {
        n,
        edges,
        targets: random_targets(rng, n, deadlines, target_prob),
    }
}

pub fn random_cycle<R: Rng>(rng: &mut R, n: usize, deadlines: (u32, u32), target_prob: f64) -> Graph {
    let edges = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph {
        n,
        edges,
        targets: random_targets(rng, n, deadlines, target_prob),
    }
}

/// Random tree plus `extra` random edges.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize, deadlines: (u32, u32), target_prob: f64) -> Graph {
    let mut g = random_tree(rng, n, deadlines, target_prob);
    let max = n * (n - 1) / 2;
    let mut tries = 0;
    while g.edges.len() < (n - 1 + extra).min(max) && tries < 10_000 {
        tries += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !g.edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
            g.edges.push((a, b));
        }
    }
    g
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[row][k] -= f * a[col][k];
                    }
                    b[row] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Value of a zero-sum game (row player maximises) by enumerating square
/// supports and checking the equilibrium conditions.
pub fn support_enumeration_value(payoff: &[Vec<f64>]) -> Option<f64> {
    let rows = payoff.len();
    let cols = payoff[0].len();
    for k in 1..=rows.min(cols) {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                // column mix y on cs making every row in rs indifferent at v
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut b = vec![0.0; k + 1];
                for (i, &r) in rs.iter().enumerate() {
                    for (j, &c) in cs.iter().enumerate() {
                        a[i][j] = payoff[r][c];
                    }
                    a[i][k] = -1.0;
                }
                a[k][..k].fill(1.0);
                b[k] = 1.0;
                let Some(y) = gauss(a, b) else { continue };
                // row mix x on rs making every column in cs indifferent
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut b = vec![0.0; k + 1];
                for (j, &c) in cs.iter().enumerate() {
                    for (i, &r) in rs.iter().enumerate() {
                        a[j][i] = payoff[r][c];
                    }
                    a[j][k] = -1.0;
                }
                a[k][..k].fill(1.0);
                b[k] = 1.0;
                let Some(x) = gauss(a, b) else { continue };
                let v = y[k];
                if y[..k].iter().chain(&x[..k]).any(|&p| p < -1e-12) || (x[k] - v).abs() > 1e-9 {
                    continue;
                }
                let row_ok = (0..rows).all(|r| cs.iter().enumerate().map(|(j, &c)| y[j] * payoff[r][c]).sum::<f64>() <= v + 1e-9);
                let col_ok = (0..cols).all(|c| rs.iter().enumerate().map(|(i, &r)| x[i] * payoff[r][c]).sum::<f64>() >= v - 1e-9);
                if row_ok && col_ok {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// `1 - Σ_{t uncovered} σ(t)·π(t)`, summed in target order.
pub fn response_objective(values: &[f64], attacker: &[f64], covered: &[bool]) -> f64 {
    let mut lost = 0.0;
    for t in 0..values.len() {
        if !covered[t] {
            lost += attacker[t] * values[t];
        }
    }
    1.0 - lost
}

/// All joint choices (one index per resource) of the given sizes.
pub fn joint_choices(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &n| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |r| {
                    let mut c = prefix.clone();
                    c.push(r);
                    c
                })
            })
            .collect()
    })
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
