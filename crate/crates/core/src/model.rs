//! Patrolling settings, alarm systems and the distance/coverage queries every
//! solver in the crate is built on.
//!
//! Vertex ids are opaque strings at the boundary; internally every vertex is a
//! dense index in declaration order and every target is a dense index into
//! [`PatrollingSetting::targets`].

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Set of target indices.
pub type TargetSet = FixedBitSet;

/// Tolerance on `Σ_s p(s|t) = 1`.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge ({0}, {1}) references an undeclared vertex")]
    DanglingEdge(String, String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("graph is disconnected: `{0}` is unreachable from `{1}`")]
    DisconnectedGraph(String, String),
    #[error("target `{0}` is not a declared vertex")]
    TargetNotVertex(String),
    #[error("target `{0}` declared twice")]
    DuplicateTarget(String),
    #[error("target `{target}` has value {value}, expected a value in (0, 1]")]
    BadValue { target: String, value: f64 },
    #[error("target `{target}` has deadline {deadline}, expected a positive integer")]
    BadDeadline { target: String, deadline: i64 },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("duplicate signal id `{0}`")]
    DuplicateSignal(String),
    #[error("p({signal}|{target}) = {prob} is not a probability")]
    BadProbability { signal: String, target: String, prob: f64 },
    #[error("signal probabilities for target `{target}` sum to {sum}, expected 1")]
    ProbabilitySum { target: String, sum: f64 },
}

/// Target description as it appears in an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTarget {
    pub id: String,
    pub value: f64,
    pub deadline: i64,
}

/// Unvalidated graph description. Edges are id pairs; anything else (for
/// instance a weight as a third element) fails to deserialize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSetting {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub targets: Vec<RawTarget>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub vertex: usize,
    pub value: f64,
    pub deadline: u32,
}

/// Hop-count shortest paths between every pair of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

/// A validated patrolling setting: connected unit-cost graph plus valued,
/// deadline-bearing targets.
#[derive(Debug, Clone)]
pub struct PatrollingSetting {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    targets: Vec<Target>,
    target_of: Vec<Option<usize>>,
    dist: DistanceMatrix,
}

/// Validates a raw description and builds the setting, including its distance
/// matrix.
pub fn build_setting(raw: &RawSetting) -> Result<PatrollingSetting, ModelError> {
    if raw.vertices.is_empty() {
        return Err(ModelError::EmptyGraph);
    }
    let mut index = HashMap::with_capacity(raw.vertices.len());
    for (i, v) in raw.vertices.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            return Err(ModelError::DuplicateVertex(v.clone()));
        }
    }
    let n = raw.vertices.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (a, b) in &raw.edges {
        let (Some(&u), Some(&v)) = (index.get(a), index.get(b)) else {
            return Err(ModelError::DanglingEdge(a.clone(), b.clone()));
        };
        if u == v {
            return Err(ModelError::SelfLoop(a.clone()));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(ModelError::DuplicateEdge(a.clone(), b.clone()));
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
        edges.push((u, v));
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    let mut target_of = vec![None; n];
    let mut targets = Vec::with_capacity(raw.targets.len());
    for t in &raw.targets {
        let &vertex = index
            .get(&t.id)
            .ok_or_else(|| ModelError::TargetNotVertex(t.id.clone()))?;
        if target_of[vertex].is_some() {
            return Err(ModelError::DuplicateTarget(t.id.clone()));
        }
        if !(t.value > 0.0 && t.value <= 1.0) {
            return Err(ModelError::BadValue {
                target: t.id.clone(),
                value: t.value,
            });
        }
        if t.deadline < 1 || t.deadline > u32::MAX as i64 / 2 {
            return Err(ModelError::BadDeadline {
                target: t.id.clone(),
                deadline: t.deadline,
            });
        }
        target_of[vertex] = Some(targets.len());
        targets.push(Target {
            vertex,
            value: t.value,
            deadline: t.deadline as u32,
        });
    }

    let dist = bfs_all_pairs(&adjacency);
    if let Some(v) = (0..n).find(|&v| dist.get(0, v) == u32::MAX) {
        return Err(ModelError::DisconnectedGraph(
            raw.vertices[v].clone(),
            raw.vertices[0].clone(),
        ));
    }

    Ok(PatrollingSetting {
        names: raw.vertices.clone(),
        index,
        adjacency,
        edges,
        targets,
        target_of,
        dist,
    })
}

fn bfs_all_pairs(adjacency: &[Vec<usize>]) -> DistanceMatrix {
    let n = adjacency.len();
    let mut dist = vec![u32::MAX; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &w in &adjacency[u] {
                if row[w] == u32::MAX {
                    row[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    DistanceMatrix { n, dist }
}

/// Breadth-first hop counts between all vertex pairs.
pub fn all_pairs_distances(setting: &PatrollingSetting) -> DistanceMatrix {
    bfs_all_pairs(&setting.adjacency)
}

impl PatrollingSetting {
    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, t: usize) -> &Target {
        &self.targets[t]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn target_name(&self, t: usize) -> &str {
        &self.names[self.targets[t].vertex]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize, ModelError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownVertex(id.to_owned()))
    }

    pub fn target_index(&self, id: &str) -> Result<usize, ModelError> {
        self.index
            .get(id)
            .and_then(|&v| self.target_of[v])
            .ok_or_else(|| ModelError::UnknownTarget(id.to_owned()))
    }

    /// Target index hosted at vertex `v`, if any.
    pub fn target_at(&self, v: usize) -> Option<usize> {
        self.target_of[v]
    }

    pub fn max_value(&self) -> f64 {
        self.targets.iter().map(|t| t.value).fold(0.0, f64::max)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.num_vertices()
    }

    pub fn is_cycle(&self) -> bool {
        self.num_vertices() >= 3
            && self.edges.len() == self.num_vertices()
            && self.adjacency.iter().all(|a| a.len() == 2)
    }

    /// Inverse of [`build_setting`].
    pub fn to_raw(&self) -> RawSetting {
        RawSetting {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (self.names[u].clone(), self.names[v].clone()))
                .collect(),
            targets: self
                .targets
                .iter()
                .map(|t| RawTarget {
                    id: self.names[t.vertex].clone(),
                    value: t.value,
                    deadline: t.deadline as i64,
                })
                .collect(),
        }
    }

    /// Targets that a resource sitting on `v` can reach by their deadline.
    pub fn coverage_set(&self, v: usize) -> Result<TargetSet, ModelError> {
        if v >= self.num_vertices() {
            return Err(ModelError::UnknownVertex(v.to_string()));
        }
        Ok(coverage_set(self, &self.dist, v))
    }
}

/// `{t | dist(v, t) <= deadline(t)}`. Panics if `v` is out of range; use
/// [`PatrollingSetting::coverage_set`] for a checked lookup.
pub fn coverage_set(setting: &PatrollingSetting, dist: &DistanceMatrix, v: usize) -> TargetSet {
    let mut set = TargetSet::with_capacity(setting.num_targets());
    for (i, t) in setting.targets.iter().enumerate() {
        if dist.get(v, t.vertex) <= t.deadline {
            set.insert(i);
        }
    }
    set
}

/// Signal description as it appears in an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSignal {
    pub id: String,
    pub probs: BTreeMap<String, f64>,
}

/// Alarm system `(S, p)`: `prob[s][t] = p(s | t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlarmSystem {
    names: Vec<String>,
    prob: Vec<Vec<f64>>,
}

impl AlarmSystem {
    pub fn from_raw(raw: &[RawSignal], setting: &PatrollingSetting) -> Result<Self, ModelError> {
        let n_targets = setting.num_targets();
        let mut names = Vec::with_capacity(raw.len());
        let mut prob = Vec::with_capacity(raw.len());
        let mut seen = HashSet::new();
        for s in raw {
            if !seen.insert(s.id.as_str()) {
                return Err(ModelError::DuplicateSignal(s.id.clone()));
            }
            let mut row = vec![0.0; n_targets];
            for (tid, &p) in &s.probs {
                let t = setting.target_index(tid)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(ModelError::BadProbability {
                        signal: s.id.clone(),
                        target: tid.clone(),
                        prob: p,
                    });
                }
                row[t] = p;
            }
            names.push(s.id.clone());
            prob.push(row);
        }
        for t in 0..n_targets {
            let sum: f64 = prob.iter().map(|row| row[t]).sum();
            if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
                return Err(ModelError::ProbabilitySum {
                    target: setting.target_name(t).to_owned(),
                    sum,
                });
            }
        }
        Ok(Self { names, prob })
    }

    /// One signal raised by every target with certainty.
    pub fn single_signal(n_targets: usize) -> Self {
        Self {
            names: vec!["s0".to_owned()],
            prob: vec![vec![1.0; n_targets]],
        }
    }

    pub fn to_raw(&self, setting: &PatrollingSetting) -> Vec<RawSignal> {
        self.names
            .iter()
            .zip(&self.prob)
            .map(|(id, row)| RawSignal {
                id: id.clone(),
                probs: row
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(t, &p)| (setting.target_name(t).to_owned(), p))
                    .collect(),
            })
            .collect()
    }

    pub fn num_signals(&self) -> usize {
        self.names.len()
    }

    pub fn signal_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn signal_index(&self, id: &str) -> Result<usize, ModelError> {
        self.names
            .iter()
            .position(|n| n == id)
            .ok_or_else(|| ModelError::UnknownSignal(id.to_owned()))
    }

    /// `p(s | t)`.
    pub fn prob(&self, s: usize, t: usize) -> f64 {
        self.prob[s][t]
    }

    /// `T(s) = {t | p(s|t) > 0}` as ascending target indices.
    pub fn signal_support(&self, s: usize) -> Result<Vec<usize>, ModelError> {
        let row = self
            .prob
            .get(s)
            .ok_or_else(|| ModelError::UnknownSignal(s.to_string()))?;
        Ok(row
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(t, _)| t)
            .collect())
    }

    /// `S(t) = {s | p(s|t) > 0}` as ascending signal indices.
    pub fn target_support(&self, t: usize) -> Result<Vec<usize>, ModelError> {
        if self.prob.first().is_some_and(|row| t >= row.len()) {
            return Err(ModelError::UnknownTarget(t.to_string()));
        }
        Ok(self
            .prob
            .iter()
            .enumerate()
            .filter(|(_, row)| row[t] > 0.0)
            .map(|(s, _)| s)
            .collect())
    }
}
