//! Minimum covering placements.
//!
//! A placement is covering when every target is within its deadline of some
//! position. On arbitrary graphs this is set cover over the per-vertex
//! coverage sets, solved greedily (plus local search) or exactly by
//! branch-and-bound. Trees and cycles get the bottom-up profile recursion,
//! which is exact in linear time.

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{coverage_set, PatrollingSetting, TargetSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("target {0} is not covered by any candidate set")]
    Infeasible(usize),
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not a simple cycle")]
    NotACycle,
    #[error("root vertex {0} out of range")]
    BadRoot(usize),
}

/// Set cover view of a setting: the universe is the target set and vertex `v`
/// contributes `sets[v] = coverage_set(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetCoverInstance {
    universe: usize,
    sets: Vec<TargetSet>,
}

impl SetCoverInstance {
    /// Builds an instance from explicit sets; element ids must be `< universe`.
    pub fn new(universe: usize, sets: Vec<Vec<usize>>) -> Self {
        let sets = sets
            .into_iter()
            .map(|elems| {
                let mut s = TargetSet::with_capacity(universe);
                s.extend(elems);
                s
            })
            .collect();
        Self { universe, sets }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, v: usize) -> &TargetSet {
        &self.sets[v]
    }

    fn union_of(&self, positions: &[usize]) -> TargetSet {
        let mut covered = TargetSet::with_capacity(self.universe);
        for &p in positions {
            covered.union_with(&self.sets[p]);
        }
        covered
    }

    pub fn is_cover(&self, positions: &[usize]) -> bool {
        self.union_of(positions).count_ones(..) == self.universe
    }

    fn check_feasible(&self) -> Result<(), CoverError> {
        let all: Vec<usize> = (0..self.sets.len()).collect();
        let covered = self.union_of(&all);
        match (0..self.universe).find(|&t| !covered.contains(t)) {
            Some(t) => Err(CoverError::Infeasible(t)),
            None => Ok(()),
        }
    }
}

pub fn to_set_cover(setting: &PatrollingSetting) -> SetCoverInstance {
    let dist = setting.distances();
    SetCoverInstance {
        universe: setting.num_targets(),
        sets: (0..setting.num_vertices())
            .map(|v| coverage_set(setting, dist, v))
            .collect(),
    }
}

/// Distinct resource positions, kept sorted by vertex index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoveringPlacement {
    positions: Vec<usize>,
}

impl CoveringPlacement {
    pub fn new(mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        Self { positions }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.positions.binary_search(&v).is_ok()
    }

    pub fn is_covering(&self, setting: &PatrollingSetting) -> bool {
        let dist = setting.distances();
        setting.targets().iter().all(|t| {
            self.positions
                .iter()
                .any(|&p| dist.get(p, t.vertex) <= t.deadline)
        })
    }
}

/// Chvátal greedy: repeatedly take the set with the largest number of
/// still-uncovered elements, lowest index on ties.
pub fn greedy_cover(instance: &SetCoverInstance) -> Result<CoveringPlacement, CoverError> {
    instance.check_feasible()?;
    let mut uncovered = TargetSet::with_capacity(instance.universe);
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (best, gain) = instance
            .sets
            .iter()
            .enumerate()
            .map(|(v, s)| (v, s.intersection(&uncovered).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        debug_assert!(gain > 0);
        chosen.push(best);
        uncovered.difference_with(&instance.sets[best]);
    }
    Ok(CoveringPlacement::new(chosen))
}

/// Local search to a fixed point of two moves: drop a redundant position, or
/// replace two positions by one vertex covering everything only they covered.
pub fn local_search_improve(placement: &CoveringPlacement, instance: &SetCoverInstance) -> CoveringPlacement {
    let mut positions = placement.positions.clone();
    'improve: loop {
        // multiplicity of coverage per element
        let mut count = vec![0u32; instance.universe];
        for &p in &positions {
            for t in instance.sets[p].ones() {
                count[t] += 1;
            }
        }

        for i in 0..positions.len() {
            if instance.sets[positions[i]].ones().all(|t| count[t] >= 2) {
                positions.remove(i);
                continue 'improve;
            }
        }

        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let (a, b) = (positions[i], positions[j]);
                let mut exclusive = TargetSet::with_capacity(instance.universe);
                for t in instance.sets[a].union(&instance.sets[b]) {
                    let own = instance.sets[a].contains(t) as u32 + instance.sets[b].contains(t) as u32;
                    if count[t] == own {
                        exclusive.insert(t);
                    }
                }
                let replacement = (0..instance.sets.len()).find(|&w| {
                    exclusive.is_subset(&instance.sets[w]) && (w == a || w == b || !positions.contains(&w))
                });
                if let Some(w) = replacement {
                    positions.retain(|&p| p != a && p != b);
                    positions.push(w);
                    positions.sort_unstable();
                    continue 'improve;
                }
            }
        }
        break;
    }
    CoveringPlacement::new(positions)
}

/// Result of the exact solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactCover {
    Optimal(CoveringPlacement),
    /// Budget ran out; carries the best cover found so far.
    Timeout(CoveringPlacement),
}

impl ExactCover {
    pub fn placement(&self) -> &CoveringPlacement {
        match self {
            ExactCover::Optimal(p) | ExactCover::Timeout(p) => p,
        }
    }

    pub fn into_placement(self) -> CoveringPlacement {
        match self {
            ExactCover::Optimal(p) | ExactCover::Timeout(p) => p,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, ExactCover::Optimal(_))
    }
}

struct BranchAndBound<'a> {
    sets: &'a [TargetSet],
    /// candidate set indices (into `sets`) per element
    covering: Vec<Vec<usize>>,
    vertex: Vec<usize>,
    best: Option<Vec<usize>>,
    best_len: usize,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl BranchAndBound<'_> {
    fn lower_bound(&self, uncovered: &TargetSet, excluded: &[bool]) -> Option<usize> {
        let remaining = uncovered.count_ones(..);
        if remaining == 0 {
            return Some(0);
        }
        let mut max_gain = 0;
        for (c, s) in self.sets.iter().enumerate() {
            if !excluded[c] {
                max_gain = max_gain.max(s.intersection(uncovered).count());
            }
        }
        if max_gain == 0 {
            return None;
        }
        let counting = remaining.div_ceil(max_gain);

        // elements with pairwise disjoint candidate lists each need their own set
        let mut used = vec![false; self.sets.len()];
        let mut packing = 0;
        let mut order: Vec<usize> = uncovered.ones().collect();
        order.sort_by_key(|&t| (self.covering[t].len(), t));
        for t in order {
            let live = self.covering[t].iter().filter(|&&c| !excluded[c]);
            if live.clone().all(|&c| !used[c]) {
                packing += 1;
                for &c in live {
                    used[c] = true;
                }
            }
        }
        Some(counting.max(packing))
    }

    fn search(&mut self, uncovered: &TargetSet, chosen: &mut Vec<usize>, excluded: &mut Vec<bool>) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        if uncovered.is_clear() {
            if chosen.len() < self.best_len {
                self.best_len = chosen.len();
                self.best = Some(chosen.clone());
            }
            return;
        }
        let Some(lb) = self.lower_bound(uncovered, excluded) else {
            return;
        };
        if chosen.len() + lb >= self.best_len {
            return;
        }

        // branch on the element with the fewest live candidates
        let mut pivot = None;
        let mut fewest = usize::MAX;
        for t in uncovered.ones() {
            let live = self.covering[t].iter().filter(|&&c| !excluded[c]).count();
            if live == 0 {
                return;
            }
            if live < fewest {
                fewest = live;
                pivot = Some(t);
            }
        }
        let pivot = pivot.expect("uncovered is nonempty");
        let mut branches: Vec<(usize, usize)> = self.covering[pivot]
            .iter()
            .filter(|&&c| !excluded[c])
            .map(|&c| (c, self.sets[c].intersection(uncovered).count()))
            .collect();
        branches.sort_by(|a, b| b.1.cmp(&a.1).then(self.vertex[a.0].cmp(&self.vertex[b.0])));

        let mut newly_excluded = Vec::with_capacity(branches.len());
        for (c, _) in branches {
            let mut rest = uncovered.clone();
            rest.difference_with(&self.sets[c]);
            chosen.push(c);
            self.search(&rest, chosen, excluded);
            chosen.pop();
            excluded[c] = true;
            newly_excluded.push(c);
        }
        for c in newly_excluded {
            excluded[c] = false;
        }
    }
}

/// Minimum-cardinality cover by depth-first branch-and-bound. The greedy +
/// local search cover seeds the incumbent; candidates whose sets are contained
/// in another candidate's set are pruned up front.
pub fn exact_cover(instance: &SetCoverInstance, time_budget: Duration) -> Result<ExactCover, CoverError> {
    let start = Instant::now();
    let greedy = greedy_cover(instance)?;
    let incumbent = local_search_improve(&greedy, instance);

    // keep one representative per maximal set, lowest vertex index on ties
    let mut keep = Vec::new();
    for v in 0..instance.sets.len() {
        let sv = &instance.sets[v];
        if sv.is_clear() {
            continue;
        }
        let dominated = (0..instance.sets.len()).any(|w| {
            let sw = &instance.sets[w];
            w != v && sv.is_subset(sw) && (sw.count_ones(..) > sv.count_ones(..) || w < v)
        });
        if !dominated {
            keep.push(v);
        }
    }
    let sets: Vec<TargetSet> = keep.iter().map(|&v| instance.sets[v].clone()).collect();
    let mut covering = vec![Vec::new(); instance.universe];
    for (c, s) in sets.iter().enumerate() {
        for t in s.ones() {
            covering[t].push(c);
        }
    }

    let mut bb = BranchAndBound {
        sets: &sets,
        covering,
        vertex: keep.clone(),
        best: None,
        best_len: incumbent.len(),
        deadline: start + time_budget,
        nodes: 0,
        timed_out: false,
    };
    let mut uncovered = TargetSet::with_capacity(instance.universe);
    uncovered.insert_range(..);
    let mut excluded = vec![false; sets.len()];
    bb.search(&uncovered, &mut Vec::new(), &mut excluded);

    let found = match &bb.best {
        Some(best) => CoveringPlacement::new(best.iter().map(|&c| keep[c]).collect()),
        None => incumbent,
    };
    Ok(if bb.timed_out {
        ExactCover::Timeout(found)
    } else {
        ExactCover::Optimal(found)
    })
}

/// Hop count that may be unbounded. `Infinite` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hops {
    Finite(u32),
    Infinite,
}

impl Hops {
    fn plus_one(self) -> Self {
        match self {
            Hops::Finite(k) => Hops::Finite(k + 1),
            Hops::Infinite => Hops::Infinite,
        }
    }

    fn minus_one(self) -> Self {
        match self {
            Hops::Finite(k) => Hops::Finite(k - 1),
            Hops::Infinite => Hops::Infinite,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Hops::Finite(_))
    }
}

impl fmt::Display for Hops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hops::Finite(k) => write!(f, "{k}"),
            Hops::Infinite => f.write_str("inf"),
        }
    }
}

/// What a subtree reports to its parent: either the subtree is covered and
/// the nearest resource is `cov` hops from the parent, or it still needs a
/// resource within `uncov` hops of the parent. A subtree without targets
/// reports `(inf, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageProfile {
    pub cov: Hops,
    pub uncov: Hops,
}

/// Bottom-up recursion over a rooted tree. `demand[v]` is `Some(deadline)` for
/// targets. Returns the placed vertices (including the root when the root
/// profile still carries a pending demand) and the root profile.
fn profile_cover(adjacency: &[Vec<usize>], root: usize, demand: &[Option<u32>]) -> (Vec<usize>, CoverageProfile) {
    let n = adjacency.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &adjacency[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }

    let mut profile = vec![
        CoverageProfile {
            cov: Hops::Infinite,
            uncov: Hops::Infinite,
        };
        n
    ];
    let mut placed = Vec::new();
    for &v in order.iter().rev() {
        let own = demand[v].map_or(Hops::Infinite, Hops::Finite);
        let children: Vec<usize> = adjacency[v].iter().copied().filter(|&w| w != v && parent[w] == v).collect();
        if children.is_empty() {
            // leaf: a target asks for a resource within d(v) - 1 of its parent
            profile[v] = CoverageProfile {
                cov: Hops::Infinite,
                uncov: own.minus_one(),
            };
            continue;
        }
        let min_cov = children.iter().map(|&w| profile[w].cov).min().unwrap_or(Hops::Infinite);
        let need = children
            .iter()
            .map(|&w| profile[w].uncov)
            .chain(std::iter::once(own))
            .min()
            .unwrap_or(Hops::Infinite);
        profile[v] = if need == Hops::Infinite || min_cov <= need {
            // covered by resources below (or nothing to cover)
            CoverageProfile {
                cov: min_cov.plus_one(),
                uncov: Hops::Infinite,
            }
        } else if need >= Hops::Finite(1) {
            // postpone to an ancestor
            CoverageProfile {
                cov: Hops::Infinite,
                uncov: need.minus_one(),
            }
        } else {
            placed.push(v);
            CoverageProfile {
                cov: Hops::Finite(1),
                uncov: Hops::Infinite,
            }
        };
    }
    let root_profile = profile[root];
    if root_profile.uncov.is_finite() {
        placed.push(root);
    }
    (placed, root_profile)
}

fn demands(setting: &PatrollingSetting) -> Vec<Option<u32>> {
    (0..setting.num_vertices())
        .map(|v| setting.target_at(v).map(|t| setting.target(t).deadline))
        .collect()
}

/// Coverage profile the recursion computes for `root` (before the root
/// placement rule is applied).
pub fn root_profile(setting: &PatrollingSetting, root: usize) -> Result<CoverageProfile, CoverError> {
    if !setting.is_tree() {
        return Err(CoverError::NotATree);
    }
    if root >= setting.num_vertices() {
        return Err(CoverError::BadRoot(root));
    }
    Ok(profile_cover(setting.adjacency(), root, &demands(setting)).1)
}

/// Exact minimum covering placement on a tree rooted at `root`.
pub fn tree_min_cover(setting: &PatrollingSetting, root: usize) -> Result<CoveringPlacement, CoverError> {
    if !setting.is_tree() {
        return Err(CoverError::NotATree);
    }
    if root >= setting.num_vertices() {
        return Err(CoverError::BadRoot(root));
    }
    let (placed, _) = profile_cover(setting.adjacency(), root, &demands(setting));
    Ok(CoveringPlacement::new(placed))
}

/// Exact minimum covering placement on a cycle: solve each of the paths
/// obtained by deleting one edge and keep the smallest. Path distances are
/// never shorter than cycle distances, so each path cover is valid on the
/// cycle.
pub fn cycle_min_cover(setting: &PatrollingSetting) -> Result<CoveringPlacement, CoverError> {
    if !setting.is_cycle() {
        return Err(CoverError::NotACycle);
    }
    let demand = demands(setting);
    let mut best: Option<Vec<usize>> = None;
    for &(u, v) in setting.edges() {
        let mut adjacency = setting.adjacency().to_vec();
        adjacency[u].retain(|&w| w != v);
        adjacency[v].retain(|&w| w != u);
        let (placed, _) = profile_cover(&adjacency, u, &demand);
        if best.as_ref().is_none_or(|b| placed.len() < b.len()) {
            best = Some(placed);
        }
    }
    Ok(CoveringPlacement::new(best.unwrap_or_default()))
}

/// Overlap indicators of a covering placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapMetrics {
    /// extra coverings `Σ|T(p_i)| - |T|`
    pub eta: i64,
    /// average overlap per target
    pub tau: f64,
    /// `eta / ((|T| - m)(m - 1))`, 0 when the denominator vanishes
    pub tau_hat: f64,
}

pub fn overlap_metrics(placement: &CoveringPlacement, setting: &PatrollingSetting) -> OverlapMetrics {
    let dist = setting.distances();
    let n = setting.num_targets() as i64;
    let m = placement.len() as i64;
    let total: i64 = placement
        .positions()
        .iter()
        .map(|&p| coverage_set(setting, dist, p).count_ones(..) as i64)
        .sum();
    let eta = total - n;
    let tau = if n > 0 { eta as f64 / n as f64 } else { 0.0 };
    let denom = (n - m) * (m - 1);
    let tau_hat = if m <= 1 || denom <= 0 { 0.0 } else { eta as f64 / denom as f64 };
    OverlapMetrics { eta, tau, tau_hat }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    Exact,
    Greedy,
    #[serde(rename = "greedy+ls")]
    GreedyLs,
    Tree,
    Cycle,
    Auto,
}

impl std::str::FromStr for CoverMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "greedy" => Ok(Self::Greedy),
            "greedy+ls" | "greedy-ls" => Ok(Self::GreedyLs),
            "tree" => Ok(Self::Tree),
            "cycle" => Ok(Self::Cycle),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown cover method `{other}`")),
        }
    }
}

impl fmt::Display for CoverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Greedy => "greedy",
            Self::GreedyLs => "greedy+ls",
            Self::Tree => "tree",
            Self::Cycle => "cycle",
            Self::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCoverOutcome {
    pub placement: CoveringPlacement,
    /// Method that produced the placement (resolved from `auto`).
    pub method: CoverMethod,
    /// Whether the placement is certified minimum.
    pub optimal: bool,
}

/// Minimum covering placement with the requested method. `auto` uses the
/// tree or cycle recursion when the topology allows, otherwise the exact
/// solver within `budget`, whose incumbent already improves on greedy + local
/// search.
pub fn min_cover(setting: &PatrollingSetting, method: CoverMethod, budget: Duration) -> Result<MinCoverOutcome, CoverError> {
    let outcome = |placement, method, optimal| MinCoverOutcome {
        placement,
        method,
        optimal,
    };
    match method {
        CoverMethod::Tree => Ok(outcome(tree_min_cover(setting, 0)?, method, true)),
        CoverMethod::Cycle => Ok(outcome(cycle_min_cover(setting)?, method, true)),
        CoverMethod::Greedy => Ok(outcome(greedy_cover(&to_set_cover(setting))?, method, false)),
        CoverMethod::GreedyLs => {
            let instance = to_set_cover(setting);
            let greedy = greedy_cover(&instance)?;
            Ok(outcome(local_search_improve(&greedy, &instance), method, false))
        }
        CoverMethod::Exact => {
            let result = exact_cover(&to_set_cover(setting), budget)?;
            let optimal = result.is_optimal();
            Ok(outcome(result.into_placement(), method, optimal))
        }
        CoverMethod::Auto if setting.is_tree() => min_cover(setting, CoverMethod::Tree, budget),
        CoverMethod::Auto if setting.is_cycle() => min_cover(setting, CoverMethod::Cycle, budget),
        CoverMethod::Auto => {
            let result = exact_cover(&to_set_cover(setting), budget)?;
            let optimal = result.is_optimal();
            let method = if optimal { CoverMethod::Exact } else { CoverMethod::GreedyLs };
            Ok(outcome(result.into_placement(), method, optimal))
        }
    }
}

/// Sorts placements by size then positions; used for deterministic output.
pub fn placement_order(a: &CoveringPlacement, b: &CoveringPlacement) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.positions.cmp(&b.positions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_setting;
    use crate::model::tests::raw;

    fn path(n: usize, deadline: i64) -> PatrollingSetting {
        let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let edges: Vec<_> = refs.windows(2).map(|w| (w[0], w[1])).collect();
        let targets: Vec<_> = refs.iter().map(|&v| (v, 1.0, deadline)).collect();
        build_setting(&raw(&refs, &edges, &targets)).unwrap()
    }

    fn cycle(n: usize, deadline: i64) -> PatrollingSetting {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let edges: Vec<_> = (0..n).map(|i| (refs[i], refs[(i + 1) % n])).collect();
        let targets: Vec<_> = refs.iter().map(|&v| (v, 1.0, deadline)).collect();
        build_setting(&raw(&refs, &edges, &targets)).unwrap()
    }

    #[test]
    fn set_cover_view_of_a_path() {
        let inst = to_set_cover(&path(3, 1));
        assert_eq!(inst.set(1).ones().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(inst.set(0).ones().collect::<Vec<_>>(), vec![0, 1]);
        let single = to_set_cover(&path(1, 1));
        assert_eq!(single.universe(), 1);
        assert_eq!(single.set(0).ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn greedy_follows_the_largest_gain_rule() {
        // a={1,2}, b={2,3}, c={3} over universe {1,2,3} (0-based here)
        let inst = SetCoverInstance::new(3, vec![vec![0, 1], vec![1, 2], vec![2]]);
        assert_eq!(greedy_cover(&inst).unwrap().positions(), &[0, 1]);
        let inst = SetCoverInstance::new(1, vec![vec![0]]);
        assert_eq!(greedy_cover(&inst).unwrap().positions(), &[0]);
        let inst = SetCoverInstance::new(2, vec![vec![0]]);
        assert_eq!(greedy_cover(&inst), Err(CoverError::Infeasible(1)));
    }

    #[test]
    fn local_search_drops_redundant_positions() {
        let inst = SetCoverInstance::new(3, vec![vec![0, 1, 2], vec![0], vec![2]]);
        let improved = local_search_improve(&CoveringPlacement::new(vec![0, 1]), &inst);
        assert_eq!(improved.positions(), &[0]);
        let minimal = CoveringPlacement::new(vec![0]);
        assert_eq!(local_search_improve(&minimal, &inst), minimal);
    }

    #[test]
    fn local_search_merges_pairs() {
        // {0,1} and {2,3} both subsumed by set 2
        let inst = SetCoverInstance::new(4, vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]]);
        let improved = local_search_improve(&CoveringPlacement::new(vec![0, 1]), &inst);
        assert_eq!(improved.positions(), &[2]);
    }

    #[test]
    fn exact_cover_examples() {
        let five = exact_cover(&to_set_cover(&path(5, 1)), Duration::from_secs(5)).unwrap();
        assert!(five.is_optimal());
        assert_eq!(five.placement().len(), 2);

        let star = build_setting(&raw(
            &["c", "l1", "l2", "l3"],
            &[("c", "l1"), ("c", "l2"), ("c", "l3")],
            &[("c", 1.0, 1), ("l1", 1.0, 1), ("l2", 1.0, 1), ("l3", 1.0, 1)],
        ))
        .unwrap();
        let star_cover = exact_cover(&to_set_cover(&star), Duration::from_secs(5)).unwrap();
        assert_eq!(star_cover.placement().positions(), &[0]);
    }

    #[test]
    fn exact_cover_zero_budget_keeps_incumbent() {
        let result = exact_cover(&to_set_cover(&path(9, 1)), Duration::ZERO).unwrap();
        assert!(result.placement().is_covering(&path(9, 1)));
    }

    #[test]
    fn tree_recursion_traces() {
        let p3 = path(3, 1);
        assert_eq!(tree_min_cover(&p3, 0).unwrap().positions(), &[1]);

        // v4 (index 3) placed by case 3, v1 (index 0) by the root rule
        let p5 = path(5, 1);
        assert_eq!(tree_min_cover(&p5, 0).unwrap().positions(), &[0, 3]);

        let single = path(1, 1);
        assert_eq!(
            root_profile(&single, 0).unwrap(),
            CoverageProfile {
                cov: Hops::Infinite,
                uncov: Hops::Finite(0)
            }
        );
        assert_eq!(tree_min_cover(&single, 0).unwrap().positions(), &[0]);
        assert_eq!(tree_min_cover(&cycle(4, 1), 0), Err(CoverError::NotATree));
    }

    #[test]
    fn non_target_vertices_in_trees() {
        // a - x - b with x not a target, deadlines 1: x covers both
        let s = build_setting(&raw(
            &["a", "x", "b"],
            &[("a", "x"), ("x", "b")],
            &[("a", 1.0, 1), ("b", 1.0, 1)],
        ))
        .unwrap();
        for root in 0..3 {
            assert_eq!(tree_min_cover(&s, root).unwrap().positions(), &[1]);
        }
        // no targets at all
        let s = build_setting(&raw(&["a", "b"], &[("a", "b")], &[])).unwrap();
        assert!(tree_min_cover(&s, 0).unwrap().is_empty());
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(cycle_min_cover(&cycle(3, 1)).unwrap().len(), 1);
        assert_eq!(cycle_min_cover(&cycle(6, 1)).unwrap().len(), 2);
        assert_eq!(cycle_min_cover(&cycle(4, 2)).unwrap().len(), 1);
        assert_eq!(cycle_min_cover(&path(4, 1)), Err(CoverError::NotACycle));
    }

    #[test]
    fn overlap_examples() {
        // |T|=4, m=2, coverage sizes 3 and 3: a-b-c-d path, deadlines 1, positions b, c
        let s = path(4, 1);
        let m = overlap_metrics(&CoveringPlacement::new(vec![1, 2]), &s);
        assert_eq!(m.eta, 2);
        assert_eq!(m.tau, 0.5);
        assert_eq!(m.tau_hat, 1.0);

        let disjoint = overlap_metrics(&CoveringPlacement::new(vec![0, 3]), &s);
        assert_eq!((disjoint.eta, disjoint.tau, disjoint.tau_hat), (0, 0.0, 0.0));

        let whole = overlap_metrics(&CoveringPlacement::new(vec![1]), &path(3, 1));
        assert_eq!((whole.eta, whole.tau_hat), (0, 0.0));
    }

    #[test]
    fn auto_dispatches_on_topology() {
        let out = min_cover(&path(5, 1), CoverMethod::Auto, Duration::from_secs(1)).unwrap();
        assert_eq!(out.method, CoverMethod::Tree);
        let out = min_cover(&cycle(6, 1), CoverMethod::Auto, Duration::from_secs(1)).unwrap();
        assert_eq!(out.method, CoverMethod::Cycle);
        assert_eq!(out.placement.len(), 2);
    }
}
