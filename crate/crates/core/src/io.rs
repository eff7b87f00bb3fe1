//! Instance and result files. Everything written here uses original vertex,
//! target and signal ids; wall-clock fields are zeroed unless timings are
//! requested, so repeated runs produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mincover::{CoverMethod, CoveringPlacement, MinCoverOutcome, OverlapMetrics};
use crate::model::{build_setting, AlarmSystem, ModelError, PatrollingSetting, RawSetting, RawSignal, RawTarget};
use crate::oracles::{Diagnostics, OracleResult, ResponseStrategy, Scheme};
use crate::pipeline::{PlacementEvaluation, ResolutionReport, SignalSolution, TraceEntry};
use crate::routes::{CoveringRoute, RouteSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Instance file: graph, targets and alarm system. `signals` may be omitted,
/// meaning one signal raised by every target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub targets: Vec<RawTarget>,
    #[serde(default)]
    pub signals: Vec<RawSignal>,
    /// present on generated instances
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl InstanceFile {
    pub fn from_parts(setting: &PatrollingSetting, alarm: &AlarmSystem) -> Self {
        let raw = setting.to_raw();
        Self {
            vertices: raw.vertices,
            edges: raw.edges,
            targets: raw.targets,
            signals: alarm.to_raw(setting),
            manifest: None,
        }
    }

    /// Validated setting and alarm system.
    pub fn build(&self) -> Result<(PatrollingSetting, AlarmSystem), ModelError> {
        let setting = build_setting(&RawSetting {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            targets: self.targets.clone(),
        })?;
        let alarm = if self.signals.is_empty() {
            AlarmSystem::single_signal(setting.num_targets())
        } else {
            AlarmSystem::from_raw(&self.signals, &setting)?
        };
        Ok((setting, alarm))
    }
}

/// Parses JSON text; errors name the offending key and position.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, IoError> {
    let fail = |message: String| IoError::Parse {
        path: origin.to_string(),
        message,
    };
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut *de).map_err(|e| {
        let at = e.path().to_string();
        let inner = e.into_inner();
        fail(if at == "." { inner.to_string() } else { format!("{at}: {inner}") })
    })?;
    de.end().map_err(|e| fail(e.to_string()))?;
    Ok(value)
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, IoError> {
    parse_json(text, "instance")
}

pub fn serialize_instance(instance: &InstanceFile) -> String {
    to_json(instance)
}

/// Reads, parses and validates an instance file. Returns the SHA-256 of the
/// raw bytes as well.
pub fn load_instance(path: &Path) -> Result<(InstanceFile, PatrollingSetting, AlarmSystem, String), IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8_lossy(&bytes);
    let file: InstanceFile = parse_json(&text, &path.display().to_string())?;
    let (setting, alarm) = file.build()?;
    Ok((file, setting, alarm, sha256_hex(&bytes)))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &to_json(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_json(&text, &path.display().to_string())
}

/// Provenance block carried by every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    /// SHA-256 of the input instance, when there is one
    pub input_hash: Option<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64, input_hash: Option<String>) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_hash,
            outputs: Vec::new(),
        }
    }
}

fn vertex_names(setting: &PatrollingSetting, placement: &CoveringPlacement) -> Vec<String> {
    placement
        .positions()
        .iter()
        .map(|&v| setting.vertex_name(v).to_string())
        .collect()
}

fn keep_time(ms: f64, timings: bool) -> f64 {
    if timings {
        ms
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCoverFile {
    pub manifest: RunManifest,
    pub method: CoverMethod,
    pub optimal: bool,
    pub m: usize,
    pub positions: Vec<String>,
    pub metrics: OverlapMetrics,
    pub elapsed_ms: f64,
}

impl MinCoverFile {
    pub fn new(manifest: RunManifest, setting: &PatrollingSetting, outcome: &MinCoverOutcome, metrics: OverlapMetrics, elapsed_ms: f64, timings: bool) -> Self {
        Self {
            manifest,
            method: outcome.method,
            optimal: outcome.optimal,
            m: outcome.placement.len(),
            positions: vertex_names(setting, &outcome.placement),
            metrics,
            elapsed_ms: keep_time(elapsed_ms, timings),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteView {
    pub id: String,
    pub visits: Vec<String>,
    pub arrivals: Vec<u32>,
}

fn route_view(setting: &PatrollingSetting, id: usize, route: &CoveringRoute) -> RouteView {
    RouteView {
        id: format!("r{id}"),
        visits: route.visits.iter().map(|&t| setting.target_name(t).to_string()).collect(),
        arrivals: route.arrivals.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutesFile {
    pub manifest: RunManifest,
    pub start: String,
    pub signal: String,
    pub support: Vec<String>,
    pub complete: bool,
    pub routes: Vec<RouteView>,
}

impl RoutesFile {
    pub fn new(manifest: RunManifest, setting: &PatrollingSetting, signal: &str, support: &[usize], set: &RouteSet) -> Self {
        Self {
            manifest,
            start: setting.vertex_name(set.start).to_string(),
            signal: signal.to_string(),
            support: support.iter().map(|&t| setting.target_name(t).to_string()).collect(),
            complete: set.complete,
            routes: set.routes.iter().enumerate().map(|(i, r)| route_view(setting, i, r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyView {
    /// per resource: route id to probability
    Independent(Vec<BTreeMap<String, f64>>),
    /// joint routes (one route id per resource) with probabilities
    Joint(Vec<JointEntry>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEntry {
    pub routes: Vec<String>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleView {
    pub scheme: Scheme,
    pub value: f64,
    pub strategies: StrategyView,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRoutes {
    pub position: String,
    /// routes referenced by some strategy
    pub routes: Vec<RouteView>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalView {
    pub signal: String,
    pub support: Vec<String>,
    pub resources: Vec<ResourceRoutes>,
    pub results: Vec<OracleView>,
}

fn oracle_view(result: &OracleResult, timings: bool) -> OracleView {
    let rid = |r: usize| format!("r{r}");
    let strategies = match &result.strategy {
        ResponseStrategy::Independent(s) => StrategyView::Independent(
            s.iter()
                .map(|m| {
                    m.probs
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(r, &p)| (rid(r), p))
                        .collect()
                })
                .collect(),
        ),
        ResponseStrategy::Joint(j) => StrategyView::Joint(
            j.iter()
                .map(|(choice, p)| JointEntry {
                    routes: choice.iter().map(|&r| rid(r)).collect(),
                    probability: *p,
                })
                .collect(),
        ),
    };
    let mut diagnostics = result.diagnostics.clone();
    diagnostics.wall_time_ms = keep_time(diagnostics.wall_time_ms, timings);
    OracleView {
        scheme: result.scheme,
        value: result.value,
        strategies,
        diagnostics,
    }
}

fn used_routes(solution: &SignalSolution, resource: usize) -> Vec<usize> {
    let mut used: Vec<usize> = solution
        .results
        .values()
        .flat_map(|r| match &r.strategy {
            ResponseStrategy::Independent(s) => s[resource].support(),
            ResponseStrategy::Joint(j) => j.iter().map(|(c, _)| c[resource]).collect(),
        })
        .collect();
    used.sort_unstable();
    used.dedup();
    used
}

pub fn signal_view(setting: &PatrollingSetting, alarm: &AlarmSystem, solution: &SignalSolution, timings: bool) -> SignalView {
    let resources = solution
        .route_sets
        .iter()
        .enumerate()
        .map(|(i, set)| ResourceRoutes {
            position: setting.vertex_name(set.start).to_string(),
            routes: used_routes(solution, i)
                .into_iter()
                .map(|r| route_view(setting, r, &set.routes[r]))
                .collect(),
            complete: set.complete,
        })
        .collect();
    SignalView {
        signal: alarm.signal_name(solution.signal).to_string(),
        support: solution
            .game
            .targets()
            .iter()
            .map(|&t| setting.target_name(t).to_string())
            .collect(),
        resources,
        results: solution.results.values().map(|r| oracle_view(r, timings)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SroFile {
    pub manifest: RunManifest,
    pub placement: Vec<String>,
    pub metrics: OverlapMetrics,
    /// value per oracle, aggregated over signals
    pub values: BTreeMap<Scheme, f64>,
    pub certified: bool,
    pub signals: Vec<SignalView>,
}

impl SroFile {
    pub fn new(manifest: RunManifest, setting: &PatrollingSetting, alarm: &AlarmSystem, eval: &PlacementEvaluation, timings: bool) -> Self {
        Self {
            manifest,
            placement: vertex_names(setting, &eval.placement),
            metrics: eval.metrics,
            values: eval.values.clone(),
            certified: eval.certified,
            signals: eval.signals.iter().map(|s| signal_view(setting, alarm, s, timings)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncumbentView {
    pub oracle: Scheme,
    pub value: f64,
    pub placement_id: usize,
    pub placement: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementView {
    pub id: usize,
    pub positions: Vec<String>,
    pub metrics: OverlapMetrics,
    pub values: BTreeMap<Scheme, f64>,
    pub routes_complete: bool,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub manifest: RunManifest,
    pub m: usize,
    pub resources: usize,
    pub cover_method: CoverMethod,
    pub cover_optimal: bool,
    pub certified: bool,
    pub exhausted: bool,
    pub placements_evaluated: usize,
    pub elapsed_ms: f64,
    pub best: Vec<IncumbentView>,
    pub placements: Vec<PlacementView>,
    pub trace: Vec<TraceEntry>,
}

impl ReportFile {
    pub fn new(manifest: RunManifest, setting: &PatrollingSetting, report: &ResolutionReport, timings: bool) -> Self {
        Self {
            manifest,
            m: report.m,
            resources: report.resources,
            cover_method: report.cover_method,
            cover_optimal: report.cover_optimal,
            certified: report.certified(),
            exhausted: report.exhausted,
            placements_evaluated: report.placements_evaluated,
            elapsed_ms: keep_time(report.elapsed_ms, timings),
            best: report
                .best
                .iter()
                .map(|b| IncumbentView {
                    oracle: b.oracle,
                    value: b.value,
                    placement_id: b.placement_id,
                    placement: vertex_names(setting, &b.placement),
                })
                .collect(),
            placements: report
                .placements
                .iter()
                .map(|p| PlacementView {
                    id: p.id,
                    positions: vertex_names(setting, &p.placement),
                    metrics: p.metrics,
                    values: p.values.clone(),
                    routes_complete: p.routes_complete,
                    certified: p.certified,
                })
                .collect(),
            trace: report
                .trace
                .iter()
                .map(|e| TraceEntry {
                    elapsed_ms: keep_time(e.elapsed_ms, timings),
                    ..e.clone()
                })
                .collect(),
        }
    }
}

/// Trace as CSV: step, elapsed_ms, placement_id, oracle, value, incumbent.
pub fn trace_csv(trace: &[TraceEntry]) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "elapsed_ms", "placement_id", "oracle", "value", "incumbent"])?;
    for e in trace {
        w.write_record([
            e.step.to_string(),
            e.elapsed_ms.to_string(),
            e.placement_id.to_string(),
            e.oracle.to_string(),
            e.value.to_string(),
            e.incumbent.to_string(),
        ])?;
    }
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, IoError> {
    let bytes = w.into_inner().map_err(|e| IoError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One benchmark run: a generated instance resolved once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub manifest: RunManifest,
    pub n_targets: usize,
    pub seed: u64,
    pub m: usize,
    /// overlap of the minimum cover (the first evaluated placement)
    pub metrics: OverlapMetrics,
    pub placements_evaluated: usize,
    /// best value per oracle
    pub values: BTreeMap<Scheme, f64>,
    /// time at which each oracle's incumbent was found
    pub time_ms: BTreeMap<Scheme, f64>,
}

impl BenchRun {
    pub fn new(manifest: RunManifest, n_targets: usize, seed: u64, report: &ResolutionReport, timings: bool) -> Self {
        let metrics = report.placements.first().map(|p| p.metrics).unwrap_or(OverlapMetrics {
            eta: 0,
            tau: 0.0,
            tau_hat: 0.0,
        });
        let values = report.best.iter().map(|b| (b.oracle, b.value)).collect();
        let time_ms = report
            .best
            .iter()
            .map(|b| {
                let found = report
                    .trace
                    .iter()
                    .find(|e| e.oracle == b.oracle && e.placement_id == b.placement_id)
                    .map_or(0.0, |e| e.elapsed_ms);
                (b.oracle, keep_time(found, timings))
            })
            .collect();
        Self {
            manifest,
            n_targets,
            seed,
            m: report.m,
            metrics,
            placements_evaluated: report.placements_evaluated,
            values,
            time_ms,
        }
    }
}

pub const BENCH_COLUMNS: [&str; 10] = [
    "n_targets",
    "seed",
    "m",
    "eta",
    "tau",
    "tau_hat",
    "oracle",
    "value",
    "time_ms",
    "placements_evaluated",
];

/// Bench CSV, one row per run and oracle, runs ordered by size then seed.
pub fn bench_csv(runs: &[BenchRun]) -> Result<String, IoError> {
    let mut sorted: Vec<&BenchRun> = runs.iter().collect();
    sorted.sort_by_key(|r| (r.n_targets, r.seed));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BENCH_COLUMNS)?;
    for r in sorted {
        for (oracle, value) in &r.values {
            w.write_record([
                r.n_targets.to_string(),
                r.seed.to_string(),
                r.m.to_string(),
                r.metrics.eta.to_string(),
                r.metrics.tau.to_string(),
                r.metrics.tau_hat.to_string(),
                oracle.to_string(),
                value.to_string(),
                r.time_ms.get(oracle).copied().unwrap_or(0.0).to_string(),
                r.placements_evaluated.to_string(),
            ])?;
        }
    }
    csv_string(w)
}

/// Reads every `*.json` run file in `dir` and rebuilds the bench CSV.
pub fn aggregate_runs(dir: &Path) -> Result<String, IoError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let runs = paths
        .iter()
        .map(|p| read_json::<BenchRun>(p))
        .collect::<Result<Vec<_>, _>>()?;
    bench_csv(&runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "vertices": ["a", "b", "c"],
        "edges": [["a", "b"], ["b", "c"]],
        "targets": [
            {"id": "a", "value": 0.3, "deadline": 1},
            {"id": "c", "value": 0.9, "deadline": 2}
        ],
        "signals": [
            {"id": "s1", "probs": {"a": 1.0, "c": 0.25}},
            {"id": "s2", "probs": {"c": 0.75}}
        ]
    }"#;

    #[test]
    fn round_trip() {
        let file = parse_instance(SAMPLE).unwrap();
        let again = parse_instance(&serialize_instance(&file)).unwrap();
        assert_eq!(file, again);
        let (setting, alarm) = file.build().unwrap();
        assert_eq!(InstanceFile::from_parts(&setting, &alarm), file);
    }

    #[test]
    fn errors_name_the_key() {
        let bad = SAMPLE.replace("\"deadline\": 1", "\"deadlin\": 1");
        let err = parse_instance(&bad).unwrap_err().to_string();
        assert!(err.contains("deadlin"), "{err}");
        let missing = SAMPLE.replace(", \"deadline\": 2", "");
        let err = parse_instance(&missing).unwrap_err().to_string();
        assert!(err.contains("deadline"), "{err}");
    }

    #[test]
    fn missing_signals_default_to_one() {
        let text = r#"{"vertices": ["x"], "edges": [], "targets": [{"id": "x", "value": 1.0, "deadline": 1}]}"#;
        let (_, alarm) = parse_instance(text).unwrap().build().unwrap();
        assert_eq!(alarm.num_signals(), 1);
    }
}
