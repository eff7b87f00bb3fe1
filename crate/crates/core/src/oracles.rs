//! Signal response oracles.
//!
//! Once a signal is raised the resources, sitting on a covering placement,
//! pick covering routes and the attacker picks a target in the signal's
//! support. Three coordination schemes are solved here:
//!
//! * full coordination (FC): one correlated distribution over joint routes,
//!   computed by row generation with an exact or relaxed best response;
//! * partial coordination (PC): independent per-resource strategies chosen
//!   jointly (team maxmin), approximated by alternating linear programs;
//! * no coordination (NC): each resource solves its own game on the targets
//!   it can reach, and the attacker best-responds to the product.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::{solve_zero_sum, GameError, MatrixGame, MixedStrategy};
use crate::lp::{lp_solve, LinearProgram, LpStatus};
use crate::model::{coverage_set, AlarmSystem, PatrollingSetting, TargetSet};
use crate::routes::RouteSet;

/// Stop iterating once the value improves by less than this.
pub const CONVERGENCE_EPS: f64 = 1e-7;
/// Slack used when comparing a best-response objective with a game value.
const CERTIFICATE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    Fc,
    Pc,
    Nc,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Fc => "FC",
            Scheme::Pc => "PC",
            Scheme::Nc => "NC",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fc" => Ok(Scheme::Fc),
            "pc" => Ok(Scheme::Pc),
            "nc" => Ok(Scheme::Nc),
            other => Err(format!("unknown oracle `{other}` (expected fc, pc or nc)")),
        }
    }
}

/// Response game for one signal: targets of the signal's support, their
/// values, and what every route of every resource protects.
#[derive(Debug, Clone)]
pub struct ResponseGame {
    targets: Vec<usize>,
    values: Vec<f64>,
    /// `protects[i][r]`: local targets protected by route `r` of resource `i`
    protects: Vec<Vec<TargetSet>>,
    /// local targets resource `i` can reach by their deadline
    reach: Vec<TargetSet>,
}

impl ResponseGame {
    /// Builds the game for `support` (global target indices) with resource
    /// `i` sitting on `positions[i]` and choosing from `route_sets[i]`.
    pub fn new(setting: &PatrollingSetting, positions: &[usize], route_sets: &[RouteSet], support: &[usize]) -> Self {
        assert_eq!(positions.len(), route_sets.len(), "one route set per resource");
        let k = support.len();
        let local = |t: usize| support.iter().position(|&s| s == t);
        let protects = route_sets
            .iter()
            .map(|set| {
                set.routes
                    .iter()
                    .map(|route| {
                        let mut covered = TargetSet::with_capacity(k);
                        covered.extend(route.visits.iter().filter_map(|&t| local(t)));
                        covered
                    })
                    .collect()
            })
            .collect();
        let reach = positions
            .iter()
            .map(|&p| {
                let all = coverage_set(setting, setting.distances(), p);
                let mut set = TargetSet::with_capacity(k);
                set.extend(support.iter().enumerate().filter(|(_, &t)| all.contains(t)).map(|(i, _)| i));
                set
            })
            .collect();
        Self {
            targets: support.to_vec(),
            values: support.iter().map(|&t| setting.target(t).value).collect(),
            protects,
            reach,
        }
    }

    /// Game from explicit route coverage lists (local target indices). Each
    /// resource reaches the union of what its routes protect.
    pub fn from_coverage(values: Vec<f64>, coverage: Vec<Vec<Vec<usize>>>) -> Self {
        let k = values.len();
        let protects: Vec<Vec<TargetSet>> = coverage
            .into_iter()
            .map(|routes| {
                routes
                    .into_iter()
                    .map(|covered| {
                        let mut set = TargetSet::with_capacity(k);
                        set.extend(covered);
                        set
                    })
                    .collect()
            })
            .collect();
        let reach = protects
            .iter()
            .map(|routes| {
                let mut set = TargetSet::with_capacity(k);
                for r in routes {
                    set.union_with(r);
                }
                set
            })
            .collect();
        Self {
            targets: (0..k).collect(),
            values,
            protects,
            reach,
        }
    }

    pub fn num_resources(&self) -> usize {
        self.protects.len()
    }

    pub fn num_targets(&self) -> usize {
        self.values.len()
    }

    pub fn num_routes(&self, resource: usize) -> usize {
        self.protects[resource].len()
    }

    /// Global target index of local target `t`.
    pub fn target(&self, t: usize) -> usize {
        self.targets[t]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `I(r, t)` for route `route` of `resource`.
    pub fn protects(&self, resource: usize, route: usize, t: usize) -> bool {
        self.protects[resource][route].contains(t)
    }

    /// Number of joint routes, saturating.
    pub fn joint_space(&self) -> usize {
        self.protects.iter().fold(1usize, |acc, r| acc.saturating_mul(r.len()))
    }

    fn joint_protects(&self, choice: &[usize]) -> TargetSet {
        let mut covered = TargetSet::with_capacity(self.num_targets());
        for (i, &r) in choice.iter().enumerate() {
            covered.union_with(&self.protects[i][r]);
        }
        covered
    }

    /// Marginal protection probability of every target under resource `i`'s
    /// strategy.
    fn marginal(&self, resource: usize, strategy: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.num_targets()];
        for (r, &p) in strategy.iter().enumerate() {
            if p > 0.0 {
                for t in self.protects[resource][r].ones() {
                    c[t] += p;
                }
            }
        }
        c
    }

    /// Probability each target is left unprotected by independent strategies.
    pub fn uncovered_independent(&self, strategies: &[MixedStrategy]) -> Vec<f64> {
        let mut u = vec![1.0; self.num_targets()];
        for (i, s) in strategies.iter().enumerate() {
            for (t, c) in self.marginal(i, &s.probs).into_iter().enumerate() {
                u[t] *= (1.0 - c).max(0.0);
            }
        }
        u
    }

    /// Probability each target is left unprotected by a joint distribution.
    pub fn uncovered_joint(&self, joint: &[(Vec<usize>, f64)]) -> Vec<f64> {
        let mut u = vec![1.0; self.num_targets()];
        for (choice, p) in joint {
            for t in self.joint_protects(choice).ones() {
                u[t] -= p;
            }
        }
        u.iter_mut().for_each(|v| *v = v.max(0.0));
        u
    }

    /// Defender value when the attacker best-responds: `1 - max_t π(t)·u(t)`.
    pub fn value_from_uncovered(&self, uncovered: &[f64]) -> f64 {
        1.0 - self
            .values
            .iter()
            .zip(uncovered)
            .map(|(v, u)| v * u)
            .fold(0.0, f64::max)
    }

    pub fn evaluate_independent(&self, strategies: &[MixedStrategy]) -> f64 {
        self.value_from_uncovered(&self.uncovered_independent(strategies))
    }

    pub fn evaluate_joint(&self, joint: &[(Vec<usize>, f64)]) -> f64 {
        self.value_from_uncovered(&self.uncovered_joint(joint))
    }

    /// `1 - Σ_t w(t)·(1 - y_t)` for the joint route `choice`, summed in
    /// target order.
    pub fn response_objective(&self, attacker: &[f64], choice: &[usize]) -> f64 {
        let covered = self.joint_protects(choice);
        let mut lost = 0.0;
        for t in 0..self.num_targets() {
            if !covered.contains(t) {
                lost += attacker[t] * self.values[t];
            }
        }
        1.0 - lost
    }

    fn restricted_game(&self, joint: &[Vec<usize>]) -> Result<MatrixGame, GameError> {
        let protects: Vec<Vec<bool>> = joint
            .iter()
            .map(|choice| {
                let covered = self.joint_protects(choice);
                (0..self.num_targets()).map(|t| covered.contains(t)).collect()
            })
            .collect();
        MatrixGame::security(&protects, &self.values)
    }
}

/// Strategy returned by an oracle, route indices per resource.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseStrategy {
    /// Distribution over joint routes (route index per resource).
    Joint(Vec<(Vec<usize>, f64)>),
    /// One mixed strategy per resource.
    Independent(Vec<MixedStrategy>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// joint routes generated (FC) or linear programs solved (PC, NC)
    pub routes_generated: usize,
    pub wall_time_ms: f64,
    /// false when a budget or iteration cap cut the computation short
    pub optimal: bool,
    /// defender value after every iteration
    pub value_trace: Vec<f64>,
    /// best-response objective after every FC iteration
    pub bound_trace: Vec<f64>,
    /// FC heuristic: iterations whose relaxed response was fractional
    pub fractional_iterations: usize,
    /// FC heuristic: joint routes obtained by sampling
    pub sampled_routes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub scheme: Scheme,
    pub strategy: ResponseStrategy,
    pub value: f64,
    /// unprotected probability per local target
    pub uncovered: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl OracleResult {
    pub fn independent_strategies(&self) -> Option<&[MixedStrategy]> {
        match &self.strategy {
            ResponseStrategy::Independent(s) => Some(s),
            ResponseStrategy::Joint(_) => None,
        }
    }
}

/// Value of a strategy in `game`.
pub fn evaluate_profile(game: &ResponseGame, strategy: &ResponseStrategy) -> f64 {
    match strategy {
        ResponseStrategy::Joint(j) => game.evaluate_joint(j),
        ResponseStrategy::Independent(s) => game.evaluate_independent(s),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// No coordination: every resource plays the maxmin strategy of its own game
/// restricted to the targets it can reach.
pub fn nc_sro(game: &ResponseGame) -> Result<OracleResult, GameError> {
    let start = Instant::now();
    let mut strategies = Vec::with_capacity(game.num_resources());
    for i in 0..game.num_resources() {
        let reach: Vec<usize> = game.reach[i].ones().collect();
        if reach.is_empty() || game.num_routes(i) == 0 {
            strategies.push(MixedStrategy::pure(game.num_routes(i).max(1), 0));
            continue;
        }
        let protects: Vec<Vec<bool>> = game.protects[i]
            .iter()
            .map(|route| reach.iter().map(|&t| route.contains(t)).collect())
            .collect();
        let values: Vec<f64> = reach.iter().map(|&t| game.values[t]).collect();
        let sol = solve_zero_sum(&MatrixGame::security(&protects, &values)?)?;
        strategies.push(sol.row);
    }
    let uncovered = game.uncovered_independent(&strategies);
    let value = game.value_from_uncovered(&uncovered);
    Ok(OracleResult {
        scheme: Scheme::Nc,
        strategy: ResponseStrategy::Independent(strategies),
        value,
        uncovered,
        diagnostics: Diagnostics {
            iterations: 1,
            routes_generated: game.num_resources(),
            wall_time_ms: elapsed_ms(start),
            optimal: true,
            value_trace: vec![value],
            ..Diagnostics::default()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseMode {
    Exact,
    Heuristic,
}

impl std::str::FromStr for ResponseMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "heuristic" => Ok(Self::Heuristic),
            other => Err(format!("unknown mode `{other}` (expected exact or heuristic)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    /// route index per resource
    pub choice: Vec<usize>,
    pub objective: f64,
    /// exact mode: search finished; heuristic mode: the relaxation was integral
    pub optimal: bool,
    /// heuristic mode: relaxed route weights per resource
    pub relaxed: Option<Vec<Vec<f64>>>,
    /// heuristic mode: optimum of the relaxation (an upper bound)
    pub relaxed_objective: Option<f64>,
}

struct ResponseSearch<'a> {
    game: &'a ResponseGame,
    weights: Vec<f64>,
    /// route orders per resource, best standalone weight first
    order: Vec<Vec<usize>>,
    best: Vec<usize>,
    best_objective: f64,
    choice: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl ResponseSearch<'_> {
    fn gain(&self, covered: &TargetSet, resource: usize, route: usize) -> f64 {
        self.game.protects[resource][route]
            .ones()
            .filter(|&t| !covered.contains(t))
            .map(|t| self.weights[t])
            .sum()
    }

    fn dfs(&mut self, resource: usize, covered: &TargetSet, covered_weight: f64) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        let m = self.game.num_resources();
        if resource == m {
            let objective = self.game.response_objective_weighted(&self.weights, covered);
            if objective > self.best_objective {
                self.best_objective = objective;
                self.best = self.choice.clone();
            }
            return;
        }
        let total: f64 = self.weights.iter().sum();
        let mut optimistic = covered_weight;
        let mut gains_here = Vec::new();
        for j in resource..m {
            let mut best_gain: f64 = 0.0;
            for &r in &self.order[j] {
                let g = self.gain(covered, j, r);
                if j == resource {
                    gains_here.push((r, g));
                }
                best_gain = best_gain.max(g);
            }
            optimistic += best_gain;
        }
        let optimistic = optimistic.min(total);
        if 1.0 - (total - optimistic) < self.best_objective - CERTIFICATE_EPS {
            return;
        }
        gains_here.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (r, g) in gains_here {
            let mut next = covered.clone();
            next.union_with(&self.game.protects[resource][r]);
            self.choice[resource] = r;
            self.dfs(resource + 1, &next, covered_weight + g);
        }
    }
}

impl ResponseGame {
    fn response_objective_weighted(&self, weights: &[f64], covered: &TargetSet) -> f64 {
        let mut lost = 0.0;
        for (t, &w) in weights.iter().enumerate() {
            if !covered.contains(t) {
                lost += w;
            }
        }
        1.0 - lost
    }
}

/// Best joint route against `attacker` by branch-and-bound over per-resource
/// route choices. Bounded by `budget`; the incumbent is returned on timeout.
pub fn best_response_exact(game: &ResponseGame, attacker: &[f64], budget: Duration) -> BestResponse {
    let m = game.num_resources();
    // the same weighted sum as `response_objective`
    let weights: Vec<f64> = attacker.iter().zip(&game.values).map(|(a, v)| a * v).collect();
    let order: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            let mut routes: Vec<(usize, f64)> = (0..game.num_routes(i))
                .map(|r| (r, game.protects[i][r].ones().map(|t| weights[t]).sum()))
                .collect();
            routes.sort_by(|a, b| b.1.total_cmp(&a.1));
            routes.into_iter().map(|(r, _)| r).collect()
        })
        .collect();
    let greedy: Vec<usize> = {
        let mut covered = TargetSet::with_capacity(game.num_targets());
        (0..m)
            .map(|i| {
                let r = (0..game.num_routes(i))
                    .max_by(|&a, &b| {
                        let ga: f64 = game.protects[i][a].ones().filter(|&t| !covered.contains(t)).map(|t| weights[t]).sum();
                        let gb: f64 = game.protects[i][b].ones().filter(|&t| !covered.contains(t)).map(|t| weights[t]).sum();
                        ga.total_cmp(&gb).then(b.cmp(&a))
                    })
                    .unwrap_or(0);
                covered.union_with(&game.protects[i][r]);
                r
            })
            .collect()
    };
    let greedy_objective = game.response_objective(attacker, &greedy);
    let mut search = ResponseSearch {
        game,
        weights,
        order,
        best: greedy,
        best_objective: greedy_objective,
        choice: vec![0; m],
        deadline: Instant::now() + budget,
        nodes: 0,
        timed_out: false,
    };
    let empty = TargetSet::with_capacity(game.num_targets());
    search.dfs(0, &empty, 0.0);
    let objective = game.response_objective(attacker, &search.best);
    BestResponse {
        choice: search.best,
        objective,
        optimal: !search.timed_out,
        relaxed: None,
        relaxed_objective: None,
    }
}

/// Linear relaxation of the best-response program: route weights per
/// resource and the relaxed optimum.
pub fn best_response_relaxation(game: &ResponseGame, attacker: &[f64]) -> Result<(Vec<Vec<f64>>, f64), GameError> {
    let m = game.num_resources();
    let k = game.num_targets();
    let offsets: Vec<usize> = (0..m)
        .scan(0, |acc, i| {
            let o = *acc;
            *acc += game.num_routes(i);
            Some(o)
        })
        .collect();
    let n_routes: usize = (0..m).map(|i| game.num_routes(i)).sum();
    let n = n_routes + k;
    let mut objective = vec![0.0; n];
    for t in 0..k {
        objective[n_routes + t] = attacker[t] * game.values[t];
    }
    let mut lp = LinearProgram::maximize(objective);
    for t in 0..k {
        let mut row = vec![0.0; n];
        for i in 0..m {
            for r in 0..game.num_routes(i) {
                if game.protects[i][r].contains(t) {
                    row[offsets[i] + r] = -1.0;
                }
            }
        }
        row[n_routes + t] = 1.0;
        lp.add_le(row, 0.0);
        let mut cap = vec![0.0; n];
        cap[n_routes + t] = 1.0;
        lp.add_le(cap, 1.0);
    }
    for i in 0..m {
        let mut row = vec![0.0; n];
        row[offsets[i]..offsets[i] + game.num_routes(i)].fill(1.0);
        lp.add_eq(row, 1.0);
    }
    let sol = lp_solve(&lp);
    if sol.status != LpStatus::Optimal {
        return Err(GameError::Numerical(sol.status));
    }
    let total: f64 = attacker.iter().zip(&game.values).map(|(a, v)| a * v).sum();
    let x = (0..m)
        .map(|i| sol.x[offsets[i]..offsets[i] + game.num_routes(i)].to_vec())
        .collect();
    Ok((x, 1.0 - total + sol.objective))
}

/// Relaxation followed by sampling one route per resource from its relaxed
/// weights.
pub fn best_response_heuristic<R: Rng>(game: &ResponseGame, attacker: &[f64], rng: &mut R) -> Result<BestResponse, GameError> {
    let (x, relaxed_objective) = best_response_relaxation(game, attacker)?;
    let integral = x.iter().flatten().all(|&v| !(1e-9..=1.0 - 1e-9).contains(&v));
    let choice: Vec<usize> = x
        .iter()
        .map(|weights| {
            let clipped: Vec<f64> = weights.iter().map(|&w| w.max(0.0)).collect();
            match WeightedIndex::new(&clipped) {
                Ok(dist) => dist.sample(rng),
                Err(_) => 0,
            }
        })
        .collect();
    Ok(BestResponse {
        objective: game.response_objective(attacker, &choice),
        choice,
        optimal: integral,
        relaxed: Some(x),
        relaxed_objective: Some(relaxed_objective),
    })
}

/// Best-response program in either mode. `budget` bounds exact mode; `seed`
/// drives heuristic sampling.
pub fn best_response_ilp(game: &ResponseGame, attacker: &[f64], mode: ResponseMode, budget: Duration, seed: u64) -> Result<BestResponse, GameError> {
    match mode {
        ResponseMode::Exact => Ok(best_response_exact(game, attacker, budget)),
        ResponseMode::Heuristic => best_response_heuristic(game, attacker, &mut ChaCha8Rng::seed_from_u64(seed)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcOptions {
    pub mode: ResponseMode,
    pub budget: Duration,
    pub seed: u64,
    /// heuristic mode iteration cap
    pub heuristic_iterations: usize,
}

impl Default for FcOptions {
    fn default() -> Self {
        Self {
            mode: ResponseMode::Exact,
            budget: Duration::from_secs(60),
            seed: 0,
            heuristic_iterations: 100,
        }
    }
}

/// Initial joint routes built from NC supports: the j-th joint route gives
/// every resource its j-th most likely route (cycling through shorter
/// supports).
pub fn initial_joint_routes(nc: &OracleResult) -> Vec<Vec<usize>> {
    let Some(strategies) = nc.independent_strategies() else {
        return Vec::new();
    };
    let supports: Vec<Vec<usize>> = strategies
        .iter()
        .map(|s| {
            let mut support = s.support();
            support.sort_by(|&a, &b| s.probs[b].total_cmp(&s.probs[a]).then(a.cmp(&b)));
            if support.is_empty() {
                support.push(0);
            }
            support
        })
        .collect();
    let width = supports.iter().map(Vec::len).max().unwrap_or(0);
    let mut seen = HashSet::new();
    (0..width)
        .map(|j| supports.iter().map(|s| s[j % s.len()]).collect::<Vec<_>>())
        .filter(|c| seen.insert(c.clone()))
        .collect()
}

/// Full coordination by row generation over joint routes.
pub fn fc_sro(game: &ResponseGame, options: &FcOptions, initial: &[Vec<usize>]) -> Result<OracleResult, GameError> {
    let start = Instant::now();
    let deadline = start + options.budget;
    let m = game.num_resources();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let mut joint: Vec<Vec<usize>> = Vec::new();
    let mut present = HashSet::new();
    for c in initial {
        if c.len() == m && present.insert(c.clone()) {
            joint.push(c.clone());
        }
    }
    if joint.is_empty() {
        let c = vec![0; m];
        present.insert(c.clone());
        joint.push(c);
    }

    let mut diag = Diagnostics::default();
    let mut best_bound = f64::INFINITY;
    let (solution, optimal) = loop {
        diag.iterations += 1;
        let sol = solve_zero_sum(&game.restricted_game(&joint)?)?;
        diag.value_trace.push(sol.value);

        let (response, certified) = match options.mode {
            ResponseMode::Exact => {
                let remaining = deadline.saturating_duration_since(Instant::now());
                let br = best_response_exact(game, &sol.col.probs, remaining);
                let certified = br.optimal && br.objective <= sol.value + CERTIFICATE_EPS;
                best_bound = best_bound.min(if br.optimal { br.objective } else { f64::INFINITY });
                diag.bound_trace.push(best_bound);
                (br, certified)
            }
            ResponseMode::Heuristic => {
                let br = best_response_heuristic(game, &sol.col.probs, &mut rng)?;
                let relaxed = br.relaxed_objective.unwrap_or(f64::INFINITY);
                best_bound = best_bound.min(relaxed);
                diag.bound_trace.push(best_bound);
                if !br.optimal {
                    diag.fractional_iterations += 1;
                }
                diag.sampled_routes += 1;
                let in_support = joint
                    .iter()
                    .zip(&sol.row.probs)
                    .any(|(c, &p)| p > 0.0 && *c == br.choice);
                // a relaxation bound at the value certifies optimality as well
                let certified = (br.optimal && in_support) || relaxed <= sol.value + CERTIFICATE_EPS;
                (br, certified)
            }
        };
        if certified {
            break (sol, true);
        }
        let out_of_time = Instant::now() >= deadline;
        let capped = options.mode == ResponseMode::Heuristic && diag.iterations >= options.heuristic_iterations;
        if out_of_time || capped {
            break (sol, false);
        }
        if present.insert(response.choice.clone()) {
            joint.push(response.choice);
        } else if options.mode == ResponseMode::Exact {
            // exact response already present: its payoff is at most the value
            break (sol, response.optimal);
        }
    };

    let strategy: Vec<(Vec<usize>, f64)> = joint
        .iter()
        .zip(&solution.row.probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(c, &p)| (c.clone(), p))
        .collect();
    let uncovered = game.uncovered_joint(&strategy);
    diag.routes_generated = joint.len();
    diag.optimal = optimal;
    diag.wall_time_ms = elapsed_ms(start);
    Ok(OracleResult {
        scheme: Scheme::Fc,
        value: solution.value,
        strategy: ResponseStrategy::Joint(strategy),
        uncovered,
        diagnostics: diag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PcOptions {
    fn default() -> Self {
        Self {
            restarts: 0,
            max_iterations: 200,
            seed: 0,
        }
    }
}

/// Best strategy of `resource` with every other resource fixed, and the
/// resulting value.
fn improve_one(game: &ResponseGame, profile: &[MixedStrategy], resource: usize) -> Result<(MixedStrategy, f64), GameError> {
    let k = game.num_targets();
    let mut others = vec![1.0; k];
    for (j, s) in profile.iter().enumerate() {
        if j != resource {
            for (t, c) in game.marginal(j, &s.probs).into_iter().enumerate() {
                others[t] *= (1.0 - c).max(0.0);
            }
        }
    }
    let payoff: Vec<Vec<f64>> = game.protects[resource]
        .iter()
        .map(|route| {
            (0..k)
                .map(|t| {
                    if route.contains(t) {
                        1.0
                    } else {
                        1.0 - game.values[t] * others[t]
                    }
                })
                .collect()
        })
        .collect();
    let sol = solve_zero_sum(&MatrixGame::new(payoff)?)?;
    Ok((sol.row, sol.value))
}

fn alternate(game: &ResponseGame, mut profile: Vec<MixedStrategy>, options: &PcOptions, diag: &mut Diagnostics) -> Result<(Vec<MixedStrategy>, f64), GameError> {
    let mut value = game.evaluate_independent(&profile);
    diag.value_trace.push(value);
    for _ in 0..options.max_iterations {
        diag.iterations += 1;
        let mut best: Option<(usize, MixedStrategy, f64)> = None;
        for i in 0..game.num_resources() {
            let (strategy, nu) = improve_one(game, &profile, i)?;
            diag.routes_generated += 1;
            if best.as_ref().is_none_or(|b| nu > b.2) {
                best = Some((i, strategy, nu));
            }
        }
        let Some((i, strategy, nu)) = best else {
            break;
        };
        if nu <= value + CONVERGENCE_EPS {
            break;
        }
        let previous = std::mem::replace(&mut profile[i], strategy);
        let updated = game.evaluate_independent(&profile);
        if updated <= value {
            profile[i] = previous;
            break;
        }
        value = updated;
        diag.value_trace.push(value);
    }
    Ok((profile, value))
}

/// Random starting profile: every resource on one uniformly drawn route when
/// `pure`, otherwise a uniform point of each simplex.
fn random_profile<R: Rng>(game: &ResponseGame, rng: &mut R, pure: bool) -> Vec<MixedStrategy> {
    (0..game.num_resources())
        .map(|i| {
            let n = game.num_routes(i).max(1);
            if pure {
                return MixedStrategy::pure(n, rng.gen_range(0..n));
            }
            // exponential weights give a uniform point of the simplex
            let weights: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            MixedStrategy::from_weights(&weights)
        })
        .collect()
}

/// Partial coordination: alternating best responses of single resources from
/// `initial` (NC strategies when `None`), plus random restarts alternating
/// between pure and interior starting profiles. The trace of
/// each run is non-decreasing; the best run is reported.
pub fn pc_sro(game: &ResponseGame, options: &PcOptions, initial: Option<&[MixedStrategy]>) -> Result<OracleResult, GameError> {
    let start = Instant::now();
    let initial = match initial {
        Some(s) => s.to_vec(),
        None => nc_sro(game)?
            .independent_strategies()
            .expect("NC returns independent strategies")
            .to_vec(),
    };
    let mut diag = Diagnostics::default();
    let (mut best_profile, mut best_value) = alternate(game, initial, options, &mut diag)?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for restart in 0..options.restarts {
        let mut restart_diag = Diagnostics::default();
        let start = random_profile(game, &mut rng, restart % 2 == 0);
        let (profile, value) = alternate(game, start, options, &mut restart_diag)?;
        diag.iterations += restart_diag.iterations;
        diag.routes_generated += restart_diag.routes_generated;
        if value > best_value {
            best_value = value;
            best_profile = profile;
        }
    }
    let uncovered = game.uncovered_independent(&best_profile);
    diag.optimal = diag.iterations < options.max_iterations * (options.restarts + 1);
    diag.wall_time_ms = elapsed_ms(start);
    Ok(OracleResult {
        scheme: Scheme::Pc,
        value: game.value_from_uncovered(&uncovered),
        strategy: ResponseStrategy::Independent(best_profile),
        uncovered,
        diagnostics: diag,
    })
}

/// Overall value when each signal is answered by its own oracle result and
/// the attacker picks a target before the signal realises:
/// `1 - max_t π(t) · Σ_s p(s|t) · u_s(t)`.
pub fn aggregate_signals(setting: &PatrollingSetting, alarm: &AlarmSystem, per_signal: &[(&ResponseGame, &OracleResult)]) -> f64 {
    assert_eq!(per_signal.len(), alarm.num_signals(), "one result per signal");
    let mut worst: f64 = 0.0;
    for t in 0..setting.num_targets() {
        let mut uncovered = 0.0;
        for (s, (game, result)) in per_signal.iter().enumerate() {
            let p = alarm.prob(s, t);
            if p > 0.0 {
                let local = game.targets.iter().position(|&g| g == t).expect("target in signal support");
                uncovered += p * result.uncovered[local];
            }
        }
        worst = worst.max(setting.target(t).value * uncovered);
    }
    1.0 - worst
}
