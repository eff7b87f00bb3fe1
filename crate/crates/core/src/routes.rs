//! Covering routes: target visiting orders from a start vertex in which every
//! visited target is reached by its deadline.
//!
//! Generation is a dynamic program over `(visited set, last target)` states
//! keeping the earliest completion time per state. Only routes whose visited
//! set is maximal are returned, since a route visiting a subset of another
//! route's targets is weakly dominated in every response game.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::{DistanceMatrix, PatrollingSetting, TargetSet};

/// Reachable supports up to this size use the exact dynamic program.
pub const EXACT_SUPPORT_LIMIT: usize = 20;
/// Default number of states kept per layer by the beam variant.
pub const DEFAULT_BEAM_WIDTH: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoveringRoute {
    pub start: usize,
    /// target indices in visiting order
    pub visits: Vec<usize>,
    /// arrival time at each visit, counted from leaving `start`
    pub arrivals: Vec<u32>,
}

impl CoveringRoute {
    pub fn empty(start: usize) -> Self {
        Self {
            start,
            visits: Vec::new(),
            arrivals: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    /// Whether the route protects target `t`.
    pub fn covers(&self, t: usize) -> bool {
        self.visits.contains(&t)
    }

    pub fn covered_set(&self, n_targets: usize) -> TargetSet {
        let mut set = TargetSet::with_capacity(n_targets);
        set.extend(self.visits.iter().copied());
        set
    }

    /// Checks arrivals against distances and deadlines, and visits against
    /// `support` (ascending target indices).
    pub fn is_valid(&self, setting: &PatrollingSetting, support: &[usize]) -> bool {
        if self.visits.len() != self.arrivals.len() {
            return false;
        }
        let dist = setting.distances();
        let mut at = self.start;
        let mut time = 0u32;
        for (i, (&t, &arrival)) in self.visits.iter().zip(&self.arrivals).enumerate() {
            let target = setting.target(t);
            time += dist.get(at, target.vertex);
            if arrival != time || arrival > target.deadline || support.binary_search(&t).is_err() {
                return false;
            }
            if self.visits[..i].contains(&t) {
                return false;
            }
            at = target.vertex;
        }
        true
    }
}

/// One covering route per resource, index-aligned with the placement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointRoute {
    pub routes: Vec<CoveringRoute>,
}

impl JointRoute {
    pub fn covers(&self, t: usize) -> bool {
        self.routes.iter().any(|r| r.covers(t))
    }
}

/// Free-function form of [`CoveringRoute::covers`].
pub fn covers(route: &CoveringRoute, t: usize) -> bool {
    route.covers(t)
}

/// Free-function form of [`JointRoute::covers`].
pub fn joint_covers(route: &JointRoute, t: usize) -> bool {
    route.covers(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSet {
    pub start: usize,
    pub routes: Vec<CoveringRoute>,
    /// false when the beam variant truncated the state space
    pub complete: bool,
}

impl RouteSet {
    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteLimits {
    pub exact_support_limit: usize,
    pub beam_width: usize,
}

impl Default for RouteLimits {
    fn default() -> Self {
        Self {
            exact_support_limit: EXACT_SUPPORT_LIMIT,
            beam_width: DEFAULT_BEAM_WIDTH,
        }
    }
}

#[derive(Clone, Copy)]
struct StateInfo {
    time: u32,
    /// previous last-target (local index), `u8::MAX` for the first visit
    prev: u8,
}

type Mask = u128;

/// Maximal covering routes from `start` over `support` with default limits.
pub fn covering_routes(setting: &PatrollingSetting, dist: &DistanceMatrix, start: usize, support: &[usize]) -> RouteSet {
    covering_routes_with(setting, dist, start, support, RouteLimits::default())
}

pub fn covering_routes_with(
    setting: &PatrollingSetting,
    dist: &DistanceMatrix,
    start: usize,
    support: &[usize],
    limits: RouteLimits,
) -> RouteSet {
    // only support targets reachable from start by their deadline can appear
    let mut local: Vec<usize> = support
        .iter()
        .copied()
        .filter(|&t| {
            let target = setting.target(t);
            dist.get(start, target.vertex) <= target.deadline
        })
        .collect();
    local.sort_unstable();
    local.dedup();
    if local.is_empty() {
        return RouteSet {
            start,
            routes: vec![CoveringRoute::empty(start)],
            complete: true,
        };
    }
    // masks are u128 and predecessors u8, which bounds the local support
    let truncated_support = local.len() > 127;
    local.truncate(127);

    let k = local.len();
    let vertex: Vec<usize> = local.iter().map(|&t| setting.target(t).vertex).collect();
    let deadline: Vec<u32> = local.iter().map(|&t| setting.target(t).deadline).collect();
    let beam = (k > limits.exact_support_limit).then_some(limits.beam_width.max(1));

    // layer[i] holds states with i+1 visits
    let mut layers: Vec<HashMap<(Mask, u8), StateInfo>> = Vec::new();
    let mut first = HashMap::new();
    for j in 0..k {
        let time = dist.get(start, vertex[j]);
        first.insert((1 << j, j as u8), StateInfo { time, prev: u8::MAX });
    }
    layers.push(first);
    let mut truncated = truncated_support;
    loop {
        let current = layers.last().expect("at least one layer");
        let mut next: HashMap<(Mask, u8), StateInfo> = HashMap::new();
        for (&(mask, last), info) in current {
            for j in 0..k {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let time = info.time + dist.get(vertex[last as usize], vertex[j]);
                if time > deadline[j] {
                    continue;
                }
                let key = (mask | (1 << j), j as u8);
                let candidate = StateInfo { time, prev: last };
                next.entry(key)
                    .and_modify(|e| {
                        if (candidate.time, candidate.prev) < (e.time, e.prev) {
                            *e = candidate;
                        }
                    })
                    .or_insert(candidate);
            }
        }
        if next.is_empty() {
            break;
        }
        if let Some(width) = beam {
            if next.len() > width {
                let mut states: Vec<_> = next.into_iter().collect();
                states.sort_by_key(|&((mask, last), info)| (info.time, mask, last));
                states.truncate(width);
                next = states.into_iter().collect();
                truncated = true;
            }
        }
        layers.push(next);
    }

    // best end state per visited set
    let mut ends: HashMap<Mask, (u32, u8, usize)> = HashMap::new();
    for (depth, layer) in layers.iter().enumerate() {
        for (&(mask, last), info) in layer {
            ends.entry(mask)
                .and_modify(|e| {
                    if (info.time, last) < (e.0, e.1) {
                        *e = (info.time, last, depth);
                    }
                })
                .or_insert((info.time, last, depth));
        }
    }

    // keep masks that are not strict subsets of another reachable mask
    let mut masks: Vec<Mask> = ends.keys().copied().collect();
    masks.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
    let mut maximal: Vec<Mask> = Vec::new();
    for &mask in &masks {
        if !maximal.iter().any(|&big| big & mask == mask) {
            maximal.push(mask);
        }
    }

    let mut routes: Vec<CoveringRoute> = maximal
        .iter()
        .map(|&mask| {
            let (_, mut last, mut depth) = ends[&mask];
            let mut m = mask;
            let mut rev = Vec::new();
            loop {
                let info = layers[depth][&(m, last)];
                rev.push((local[last as usize], info.time));
                if info.prev == u8::MAX {
                    break;
                }
                m &= !(1 << last);
                last = info.prev;
                depth -= 1;
            }
            rev.reverse();
            CoveringRoute {
                start,
                visits: rev.iter().map(|&(t, _)| t).collect(),
                arrivals: rev.iter().map(|&(_, a)| a).collect(),
            }
        })
        .collect();
    routes.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.visits.cmp(&b.visits)));

    RouteSet {
        start,
        routes,
        complete: !truncated,
    }
}
