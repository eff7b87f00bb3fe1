//! Anytime resolution: minimum cover, placement enumeration, route
//! generation and oracle evaluation with incumbent tracking. Also hosts the
//! random instance generator.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::game::GameError;
use crate::mincover::{
    min_cover, overlap_metrics, to_set_cover, CoverError, CoverMethod, CoveringPlacement, OverlapMetrics,
    SetCoverInstance,
};
use crate::model::{build_setting, AlarmSystem, ModelError, PatrollingSetting, RawSetting, RawTarget, TargetSet};
use crate::oracles::{
    aggregate_signals, fc_sro, initial_joint_routes, nc_sro, pc_sro, FcOptions, OracleResult, PcOptions,
    ResponseGame, ResponseMode, Scheme,
};
use crate::routes::{covering_routes_with, RouteLimits, RouteSet};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("time budget expired before a minimum cover was available")]
    BudgetTooSmall,
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Independent seed for the stream named `label`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let digest = Sha256::new()
        .chain_update(seed.to_le_bytes())
        .chain_update(label.as_bytes())
        .finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionConfig {
    #[serde(with = "duration_text")]
    pub budget: Duration,
    pub oracles: Vec<Scheme>,
    pub method: CoverMethod,
    pub route_limits: RouteLimits,
    pub seed: u64,
    pub workers: usize,
    /// stop after this many evaluated placements
    pub max_placements: Option<usize>,
    /// resources sharing each position (guard posts)
    pub resources_per_post: usize,
    pub fc_mode: ResponseMode,
    pub pc_restarts: usize,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        Self {
            budget: Duration::from_secs(60 * 60),
            oracles: vec![Scheme::Fc, Scheme::Pc, Scheme::Nc],
            method: CoverMethod::Auto,
            route_limits: RouteLimits::default(),
            seed: 0,
            workers: 1,
            max_placements: None,
            resources_per_post: 1,
            fc_mode: ResponseMode::Exact,
            pc_restarts: 0,
        }
    }
}

impl ResolutionConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: &str| Err(PipelineError::Config(msg.to_string()));
        if self.budget.is_zero() {
            return fail("budget must be positive");
        }
        if self.oracles.is_empty() {
            return fail("select at least one oracle");
        }
        if self.workers == 0 {
            return fail("workers must be at least 1");
        }
        if self.resources_per_post == 0 {
            return fail("resources per post must be at least 1");
        }
        if self.max_placements == Some(0) {
            return fail("max placements must be at least 1");
        }
        Ok(())
    }

    /// Oracles in a fixed order, without duplicates.
    fn oracle_order(&self) -> Vec<Scheme> {
        let mut o = self.oracles.clone();
        o.sort();
        o.dedup();
        o
    }
}

mod duration_text {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&humantime::format_duration(*d).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let s = String::deserialize(d)?;
        humantime::parse_duration(&s).map_err(serde::de::Error::custom)
    }
}

/// Routes and oracle results for one signal.
#[derive(Debug, Clone)]
pub struct SignalSolution {
    pub signal: usize,
    /// one route set per resource
    pub route_sets: Vec<Arc<RouteSet>>,
    pub game: ResponseGame,
    pub results: BTreeMap<Scheme, OracleResult>,
}

/// Oracle results of one placement.
#[derive(Debug, Clone)]
pub struct PlacementEvaluation {
    pub placement: CoveringPlacement,
    pub metrics: OverlapMetrics,
    /// aggregated value per selected oracle
    pub values: BTreeMap<Scheme, f64>,
    pub signals: Vec<SignalSolution>,
    /// every route set was complete
    pub routes_complete: bool,
    /// every oracle finished without a budget cut
    pub certified: bool,
}

/// Resource positions: each placed vertex repeated `per_post` times.
pub fn resource_positions(placement: &CoveringPlacement, per_post: usize) -> Vec<usize> {
    placement
        .positions()
        .iter()
        .flat_map(|&p| std::iter::repeat_n(p, per_post))
        .collect()
}

type RouteCache = HashMap<(usize, usize), Arc<RouteSet>>;

fn route_set(
    cache: &RouteCache,
    setting: &PatrollingSetting,
    supports: &[Vec<usize>],
    limits: RouteLimits,
    position: usize,
    signal: usize,
) -> Arc<RouteSet> {
    cache.get(&(position, signal)).cloned().unwrap_or_else(|| {
        Arc::new(covering_routes_with(setting, setting.distances(), position, &supports[signal], limits))
    })
}

/// Runs the selected oracles on every signal for `placement` and aggregates
/// their values. `deadline` bounds the FC searches.
pub fn evaluate_placement(
    setting: &PatrollingSetting,
    alarm: &AlarmSystem,
    placement: &CoveringPlacement,
    config: &ResolutionConfig,
    deadline: Instant,
) -> Result<PlacementEvaluation, PipelineError> {
    let supports = signal_supports(alarm)?;
    evaluate_with_cache(setting, alarm, &supports, &RouteCache::new(), placement, config, deadline)
}

fn signal_supports(alarm: &AlarmSystem) -> Result<Vec<Vec<usize>>, PipelineError> {
    (0..alarm.num_signals())
        .map(|s| alarm.signal_support(s).map_err(PipelineError::from))
        .collect()
}

fn evaluate_with_cache(
    setting: &PatrollingSetting,
    alarm: &AlarmSystem,
    supports: &[Vec<usize>],
    cache: &RouteCache,
    placement: &CoveringPlacement,
    config: &ResolutionConfig,
    deadline: Instant,
) -> Result<PlacementEvaluation, PipelineError> {
    let oracles = config.oracle_order();
    let positions = resource_positions(placement, config.resources_per_post);
    let mut routes_complete = true;
    let mut certified = true;
    let mut signals = Vec::with_capacity(supports.len());
    for (s, support) in supports.iter().enumerate() {
        let route_sets: Vec<Arc<RouteSet>> = positions
            .iter()
            .map(|&p| route_set(cache, setting, supports, config.route_limits, p, s))
            .collect();
        routes_complete &= route_sets.iter().all(|r| r.complete);
        let owned: Vec<RouteSet> = route_sets.iter().map(|r| (**r).clone()).collect();
        let game = ResponseGame::new(setting, &positions, &owned, support);
        let nc = nc_sro(&game)?;
        let mut results = BTreeMap::new();
        if oracles.contains(&Scheme::Pc) {
            let options = PcOptions {
                restarts: config.pc_restarts,
                seed: derive_seed(config.seed, &format!("pc/{s}")),
                ..PcOptions::default()
            };
            let pc = pc_sro(&game, &options, nc.independent_strategies())?;
            results.insert(Scheme::Pc, pc);
        }
        if oracles.contains(&Scheme::Fc) {
            let options = FcOptions {
                mode: config.fc_mode,
                budget: deadline.saturating_duration_since(Instant::now()),
                seed: derive_seed(config.seed, &format!("fc/{s}")),
                ..FcOptions::default()
            };
            let fc = fc_sro(&game, &options, &initial_joint_routes(&nc))?;
            if config.fc_mode == ResponseMode::Exact {
                certified &= fc.diagnostics.optimal;
            }
            results.insert(Scheme::Fc, fc);
        }
        if oracles.contains(&Scheme::Nc) {
            results.insert(Scheme::Nc, nc);
        }
        signals.push(SignalSolution {
            signal: s,
            route_sets,
            game,
            results,
        });
    }
    let values = oracles
        .iter()
        .map(|&scheme| {
            let per_signal: Vec<(&ResponseGame, &OracleResult)> =
                signals.iter().map(|sol| (&sol.game, &sol.results[&scheme])).collect();
            (scheme, aggregate_signals(setting, alarm, &per_signal))
        })
        .collect();
    Ok(PlacementEvaluation {
        placement: placement.clone(),
        metrics: overlap_metrics(placement, setting),
        values,
        signals,
        routes_complete,
        certified,
    })
}

/// Yields distinct covering placements of exactly `m` vertices: swap
/// neighbourhoods first (breadth-first from the seed placement), then random
/// perturbations of the incumbent, then a lexicographic sweep of every
/// `m`-subset so nothing is missed.
pub struct PlacementEnumerator {
    instance: SetCoverInstance,
    m: usize,
    seen: HashSet<Vec<usize>>,
    queue: VecDeque<Vec<usize>>,
    incumbent: Option<Vec<usize>>,
    last: Option<Vec<usize>>,
    rng: ChaCha8Rng,
    sweep: Option<Vec<usize>>,
    sweep_done: bool,
    perturbation_attempts: usize,
}

impl PlacementEnumerator {
    /// `seed_placement` must cover; it is padded with the lowest unused
    /// vertices when smaller than `m`.
    pub fn new(instance: SetCoverInstance, m: usize, seed_placement: &CoveringPlacement, seed: u64) -> Self {
        let mut start: Vec<usize> = seed_placement.positions().to_vec();
        let mut v = 0;
        while start.len() < m && v < instance.num_sets() {
            if !start.contains(&v) {
                start.push(v);
            }
            v += 1;
        }
        start.sort_unstable();
        let mut queue = VecDeque::new();
        let mut seen = HashSet::new();
        if start.len() == m && instance.is_cover(&start) {
            seen.insert(start.clone());
            queue.push_back(start);
        }
        Self {
            instance,
            m,
            seen,
            queue,
            incumbent: None,
            last: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
            sweep: None,
            sweep_done: false,
            perturbation_attempts: 64,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Perturbations restart from this placement.
    pub fn set_incumbent(&mut self, placement: &CoveringPlacement) {
        self.incumbent = Some(placement.positions().to_vec());
    }

    fn enqueue_neighbours(&mut self, p: &[usize]) {
        let n = self.instance.num_sets();
        for i in 0..p.len() {
            for v in 0..n {
                if p.contains(&v) {
                    continue;
                }
                let mut q = p.to_vec();
                q[i] = v;
                q.sort_unstable();
                if !self.seen.contains(&q) && self.instance.is_cover(&q) {
                    self.seen.insert(q.clone());
                    self.queue.push_back(q);
                }
            }
        }
    }

    fn perturb(&mut self) -> Option<Vec<usize>> {
        let base = self.incumbent.clone().or_else(|| self.last.clone())?;
        let n = self.instance.num_sets();
        for _ in 0..self.perturbation_attempts {
            let mut p = base.clone();
            p.shuffle(&mut self.rng);
            let drop = self.rng.gen_range(1..=p.len().clamp(1, 2));
            p.truncate(p.len().saturating_sub(drop));
            // greedy repair with random tie-breaking
            let mut covered = TargetSet::with_capacity(self.instance.universe());
            for &v in &p {
                covered.union_with(self.instance.set(v));
            }
            while covered.count_ones(..) < self.instance.universe() && p.len() < self.m {
                let mut best = Vec::new();
                let mut best_gain = 0;
                for v in (0..n).filter(|v| !p.contains(v)) {
                    let gain = self.instance.set(v).difference(&covered).count();
                    if gain > best_gain {
                        best_gain = gain;
                        best.clear();
                    }
                    if gain == best_gain && gain > 0 {
                        best.push(v);
                    }
                }
                let Some(&v) = best.choose(&mut self.rng) else { break };
                covered.union_with(self.instance.set(v));
                p.push(v);
            }
            while p.len() < self.m {
                let free: Vec<usize> = (0..n).filter(|v| !p.contains(v)).collect();
                match free.choose(&mut self.rng) {
                    Some(&v) => p.push(v),
                    None => break,
                }
            }
            p.sort_unstable();
            if p.len() == self.m && !self.seen.contains(&p) && self.instance.is_cover(&p) {
                self.seen.insert(p.clone());
                return Some(p);
            }
        }
        None
    }

    fn next_combination(&mut self) -> Option<Vec<usize>> {
        let n = self.instance.num_sets();
        let m = self.m;
        if self.sweep_done || m == 0 || m > n {
            self.sweep_done = true;
            return None;
        }
        loop {
            let next = match self.sweep.take() {
                None => (0..m).collect::<Vec<_>>(),
                Some(mut c) => {
                    let mut i = m;
                    loop {
                        if i == 0 {
                            self.sweep_done = true;
                            return None;
                        }
                        i -= 1;
                        if c[i] < n - m + i {
                            break;
                        }
                    }
                    c[i] += 1;
                    for j in i + 1..m {
                        c[j] = c[j - 1] + 1;
                    }
                    c
                }
            };
            self.sweep = Some(next.clone());
            if !self.seen.contains(&next) && self.instance.is_cover(&next) {
                self.seen.insert(next.clone());
                return Some(next);
            }
        }
    }
}

impl Iterator for PlacementEnumerator {
    type Item = CoveringPlacement;

    fn next(&mut self) -> Option<CoveringPlacement> {
        let p = match self.queue.pop_front() {
            Some(p) => p,
            None => match self.perturb() {
                Some(p) => p,
                None => self.next_combination()?,
            },
        };
        self.enqueue_neighbours(&p);
        self.last = Some(p.clone());
        Some(CoveringPlacement::new(p))
    }
}

/// Convenience wrapper: every covering placement of size `m`, enumerated from
/// a greedy seed.
pub fn enumerate_placements(setting: &PatrollingSetting, m: usize, seed: u64) -> Result<PlacementEnumerator, PipelineError> {
    let instance = to_set_cover(setting);
    let start = min_cover(setting, CoverMethod::GreedyLs, Duration::ZERO)?.placement;
    Ok(PlacementEnumerator::new(instance, m, &start, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: usize,
    /// wall-clock since the run started
    pub elapsed_ms: f64,
    pub placement_id: usize,
    pub oracle: Scheme,
    /// this placement's value
    pub value: f64,
    /// best value so far for this oracle
    pub incumbent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub oracle: Scheme,
    pub value: f64,
    pub placement_id: usize,
    pub placement: CoveringPlacement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementSummary {
    pub id: usize,
    pub placement: CoveringPlacement,
    pub metrics: OverlapMetrics,
    pub values: BTreeMap<Scheme, f64>,
    pub routes_complete: bool,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    /// minimum number of positions
    pub m: usize,
    pub resources: usize,
    pub cover_method: CoverMethod,
    pub cover_optimal: bool,
    pub best: Vec<Incumbent>,
    pub trace: Vec<TraceEntry>,
    pub placements_evaluated: usize,
    pub placements: Vec<PlacementSummary>,
    /// no covering placement of size `m` was left unevaluated
    pub exhausted: bool,
    pub elapsed_ms: f64,
}

impl ResolutionReport {
    pub fn best_value(&self, oracle: Scheme) -> Option<f64> {
        self.best.iter().find(|b| b.oracle == oracle).map(|b| b.value)
    }

    /// Every solver result was proven: min cover certified and no FC
    /// search cut by the budget.
    pub fn certified(&self) -> bool {
        self.cover_optimal && self.placements.iter().all(|p| p.certified)
    }
}

/// Anytime resolver. Each [`Resolver::step`] evaluates one batch of
/// placements (one per worker); the report is valid between steps.
pub struct Resolver<'a> {
    setting: &'a PatrollingSetting,
    alarm: &'a AlarmSystem,
    config: ResolutionConfig,
    supports: Vec<Vec<usize>>,
    cache: RouteCache,
    enumerator: PlacementEnumerator,
    pool: Option<rayon::ThreadPool>,
    start: Instant,
    deadline: Instant,
    report: ResolutionReport,
}

impl<'a> Resolver<'a> {
    pub fn new(setting: &'a PatrollingSetting, alarm: &'a AlarmSystem, config: ResolutionConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let start = Instant::now();
        let deadline = start + config.budget;
        // the cover search gets a quarter of the budget; its incumbent is
        // at least as good as greedy + local search
        let cover = min_cover(setting, config.method, config.budget / 4)?;
        if Instant::now() >= deadline {
            return Err(PipelineError::BudgetTooSmall);
        }
        let m = cover.placement.len();
        let enumerator = PlacementEnumerator::new(
            to_set_cover(setting),
            m,
            &cover.placement,
            derive_seed(config.seed, "enumerate"),
        );
        let pool = if config.workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| PipelineError::Config(e.to_string()))?,
            )
        } else {
            None
        };
        let report = ResolutionReport {
            m,
            resources: m * config.resources_per_post,
            cover_method: cover.method,
            cover_optimal: cover.optimal,
            best: Vec::new(),
            trace: Vec::new(),
            placements_evaluated: 0,
            placements: Vec::new(),
            exhausted: false,
            elapsed_ms: 0.0,
        };
        Ok(Self {
            setting,
            alarm,
            supports: signal_supports(alarm)?,
            cache: RouteCache::new(),
            config,
            enumerator,
            pool,
            start,
            deadline,
            report,
        })
    }

    pub fn report(&self) -> &ResolutionReport {
        &self.report
    }

    pub fn into_report(self) -> ResolutionReport {
        self.report
    }

    fn out_of_budget(&self) -> bool {
        // the first placement is always evaluated
        self.report.placements_evaluated > 0 && Instant::now() >= self.deadline
    }

    fn placement_cap_reached(&self) -> bool {
        self.config
            .max_placements
            .is_some_and(|cap| self.report.placements_evaluated >= cap)
    }

    /// Evaluates the next batch. Returns the number of placements evaluated,
    /// 0 once the budget, the placement cap or the enumeration is exhausted.
    pub fn step(&mut self) -> Result<usize, PipelineError> {
        if self.out_of_budget() || self.placement_cap_reached() {
            return Ok(0);
        }
        let mut batch_size = self.config.workers;
        if let Some(cap) = self.config.max_placements {
            batch_size = batch_size.min(cap - self.report.placements_evaluated);
        }
        let batch: Vec<CoveringPlacement> = self.enumerator.by_ref().take(batch_size).collect();
        if batch.len() < batch_size {
            self.report.exhausted = true;
        }
        if batch.is_empty() {
            return Ok(0);
        }
        for p in &batch {
            for &v in p.positions() {
                for s in 0..self.supports.len() {
                    self.cache.entry((v, s)).or_insert_with(|| {
                        Arc::new(covering_routes_with(
                            self.setting,
                            self.setting.distances(),
                            v,
                            &self.supports[s],
                            self.config.route_limits,
                        ))
                    });
                }
            }
        }
        let (setting, alarm, supports, cache, config, deadline) =
            (self.setting, self.alarm, &self.supports, &self.cache, &self.config, self.deadline);
        let evaluate = |p: &CoveringPlacement| evaluate_with_cache(setting, alarm, supports, cache, p, config, deadline);
        let results: Vec<Result<PlacementEvaluation, PipelineError>> = match &self.pool {
            Some(pool) => pool.install(|| batch.par_iter().map(evaluate).collect()),
            None => batch.iter().map(evaluate).collect(),
        };
        let count = results.len();
        for result in results {
            self.record(result?);
        }
        Ok(count)
    }

    fn record(&mut self, eval: PlacementEvaluation) {
        let id = self.report.placements_evaluated;
        self.report.placements_evaluated += 1;
        let elapsed_ms = self.start.elapsed().as_secs_f64() * 1e3;
        let mut improved_primary = false;
        for (i, (&oracle, &value)) in eval.values.iter().enumerate() {
            let entry = self.report.best.iter_mut().find(|b| b.oracle == oracle);
            let incumbent = match entry {
                Some(b) if value > b.value => {
                    *b = Incumbent {
                        oracle,
                        value,
                        placement_id: id,
                        placement: eval.placement.clone(),
                    };
                    improved_primary |= i == 0;
                    value
                }
                Some(b) => b.value,
                None => {
                    self.report.best.push(Incumbent {
                        oracle,
                        value,
                        placement_id: id,
                        placement: eval.placement.clone(),
                    });
                    improved_primary |= i == 0;
                    value
                }
            };
            self.report.trace.push(TraceEntry {
                step: self.report.trace.len(),
                elapsed_ms,
                placement_id: id,
                oracle,
                value,
                incumbent,
            });
        }
        self.report.best.sort_by_key(|b| b.oracle);
        if improved_primary {
            self.enumerator.set_incumbent(&eval.placement);
        }
        self.report.placements.push(PlacementSummary {
            id,
            placement: eval.placement,
            metrics: eval.metrics,
            values: eval.values,
            routes_complete: eval.routes_complete,
            certified: eval.certified,
        });
        self.report.elapsed_ms = elapsed_ms;
    }

    /// Steps until the budget, the cap or the enumeration runs out.
    pub fn run(mut self) -> Result<ResolutionReport, PipelineError> {
        while self.step()? > 0 {}
        self.report.elapsed_ms = self.start.elapsed().as_secs_f64() * 1e3;
        Ok(self.report)
    }
}

/// Full anytime resolution within `config.budget`.
pub fn resolve(setting: &PatrollingSetting, alarm: &AlarmSystem, config: &ResolutionConfig) -> Result<ResolutionReport, PipelineError> {
    Resolver::new(setting, alarm, config.clone())?.run()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n_targets: usize,
    pub mean_degree: f64,
    /// overrides the size-based schedule
    pub deadline: Option<u32>,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(n_targets: usize, seed: u64) -> Self {
        Self {
            n_targets,
            mean_degree: 3.0,
            deadline: None,
            seed,
        }
    }
}

/// Deadline schedule by instance size: 3 up to 40 targets, 4 up to 80, 5
/// beyond.
pub fn deadline_for(n_targets: usize) -> u32 {
    match n_targets {
        0..=40 => 3,
        41..=80 => 4,
        _ => 5,
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub setting: PatrollingSetting,
    pub alarm: AlarmSystem,
}

/// Number of nearest neighbours an extra edge may connect to.
const LOCAL_NEIGHBOURS: usize = 4;

/// Random connected instance with a street-like layout: vertices are random
/// points of the unit square joined by their Euclidean minimum spanning
/// tree, then extra edges between a random vertex and one of its nearest
/// neighbours until the mean degree is reached. Every vertex is a target with
/// value in `(0, 1]`; one signal covers all targets.
pub fn generate_instance(params: &GeneratorParams) -> Result<GeneratedInstance, PipelineError> {
    let n = params.n_targets;
    if n == 0 {
        return Err(PipelineError::Config("at least one target is required".into()));
    }
    if !(params.mean_degree.is_finite() && params.mean_degree >= 0.0) {
        return Err(PipelineError::Config("mean degree must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, "generate"));
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let d2 = |a: usize, b: usize| {
        let (dx, dy) = (points[a].0 - points[b].0, points[a].1 - points[b].1);
        dx * dx + dy * dy
    };

    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut present = HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Prim's algorithm on the complete Euclidean graph
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    in_tree[0] = true;
    for v in 1..n {
        best[v] = (d2(0, v), 0);
    }
    for _ in 1..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0))
            .expect("a vertex is outside the tree");
        in_tree[v] = true;
        present.insert(key(v, best[v].1));
        edges.push((best[v].1, v));
        for w in 0..n {
            if !in_tree[w] && d2(v, w) < best[w].0 {
                best[w] = (d2(v, w), v);
            }
        }
    }

    let nearest: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut others: Vec<usize> = (0..n).filter(|&w| w != v).collect();
            others.sort_by(|&a, &b| d2(v, a).total_cmp(&d2(v, b)).then(a.cmp(&b)));
            others
        })
        .collect();
    let max_edges = n * (n - 1) / 2;
    let wanted = ((params.mean_degree * n as f64 / 2.0).round() as usize).clamp(n - 1, max_edges);
    let mut stalled = 0;
    while edges.len() < wanted {
        let a = rng.gen_range(0..n);
        let local: Vec<usize> = nearest[a]
            .iter()
            .copied()
            .filter(|&b| !present.contains(&key(a, b)))
            .take(LOCAL_NEIGHBOURS)
            .collect();
        match local.choose(&mut rng) {
            Some(&b) => {
                present.insert(key(a, b));
                edges.push((a, b));
                stalled = 0;
            }
            None => {
                stalled += 1;
                if stalled > 64 * n {
                    break;
                }
            }
        }
    }

    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let deadline = params.deadline.unwrap_or_else(|| deadline_for(n));
    let targets = names
        .iter()
        .map(|id| RawTarget {
            id: id.clone(),
            value: 1.0 - rng.gen::<f64>(),
            deadline: i64::from(deadline),
        })
        .collect();
    let raw = RawSetting {
        vertices: names.clone(),
        edges: edges
            .into_iter()
            .map(|(a, b)| (names[a].clone(), names[b].clone()))
            .collect(),
        targets,
    };
    let setting = build_setting(&raw)?;
    let alarm = AlarmSystem::single_signal(setting.num_targets());
    Ok(GeneratedInstance { setting, alarm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::raw;

    fn path5() -> PatrollingSetting {
        let v = ["a", "b", "c", "d", "e"];
        let edges: Vec<_> = v.windows(2).map(|w| (w[0], w[1])).collect();
        let targets: Vec<_> = v.iter().map(|&x| (x, 1.0, 1)).collect();
        build_setting(&raw(&v, &edges, &targets)).unwrap()
    }

    #[test]
    fn generator_schedule_and_determinism() {
        let a = generate_instance(&GeneratorParams::new(20, 1)).unwrap();
        assert_eq!(a.setting.num_targets(), 20);
        assert!(a.setting.targets().iter().all(|t| t.deadline == 3));
        let b = generate_instance(&GeneratorParams::new(20, 1)).unwrap();
        assert_eq!(a.setting.to_raw(), b.setting.to_raw());
        let c = generate_instance(&GeneratorParams::new(100, 3)).unwrap();
        assert!(c.setting.targets().iter().all(|t| t.deadline == 5));
        let degree = 2.0 * c.setting.edges().len() as f64 / 100.0;
        assert!((degree - 3.0).abs() <= 0.5);
    }

    #[test]
    fn enumerates_all_cycle_placements() {
        let v = ["x", "y", "z"];
        let setting = build_setting(&raw(&v, &[("x", "y"), ("y", "z"), ("z", "x")], &[("x", 1.0, 1), ("y", 1.0, 1), ("z", 1.0, 1)])).unwrap();
        let all: Vec<_> = enumerate_placements(&setting, 1, 0).unwrap().collect();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn single_vertex_resolution() {
        let setting = build_setting(&raw(&["only"], &[], &[("only", 1.0, 1)])).unwrap();
        let alarm = AlarmSystem::single_signal(1);
        let report = resolve(&setting, &alarm, &ResolutionConfig::default()).unwrap();
        assert_eq!(report.m, 1);
        assert_eq!(report.placements_evaluated, 1);
        assert!(report.exhausted);
        for b in &report.best {
            assert!((b.value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn path_resolution_trace_is_monotone() {
        let setting = path5();
        let alarm = AlarmSystem::single_signal(5);
        let config = ResolutionConfig {
            budget: Duration::from_secs(30),
            ..ResolutionConfig::default()
        };
        let report = resolve(&setting, &alarm, &config).unwrap();
        assert_eq!(report.m, 2);
        assert!(report.exhausted);
        for oracle in [Scheme::Fc, Scheme::Pc, Scheme::Nc] {
            let incumbents: Vec<f64> = report.trace.iter().filter(|e| e.oracle == oracle).map(|e| e.incumbent).collect();
            assert!(incumbents.windows(2).all(|w| w[1] >= w[0]));
        }
        for p in &report.placements {
            assert!(p.values[&Scheme::Fc] >= p.values[&Scheme::Pc] - 1e-6);
            assert!(p.values[&Scheme::Pc] >= p.values[&Scheme::Nc] - 1e-6);
        }
    }
}
