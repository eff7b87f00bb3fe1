use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sigpatrol::io::{
    aggregate_runs, bench_csv, load_instance, trace_csv, write_json, write_text, BenchRun, InstanceFile,
    IoError, MinCoverFile, ReportFile, RoutesFile, RunManifest, SroFile,
};
use sigpatrol::mincover::{min_cover, overlap_metrics, CoverMethod, CoveringPlacement};
use sigpatrol::oracles::{ResponseMode, Scheme};
use sigpatrol::pipeline::{evaluate_placement, generate_instance, resolve, GeneratorParams, PipelineError, ResolutionConfig};
use sigpatrol::routes::{covering_routes_with, RouteLimits, DEFAULT_BEAM_WIDTH};

#[derive(Parser)]
#[command(name = "sigpatrol", version, about = "Covering placements, covering routes and signal response games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep wall-clock measurements in output files
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone)]
struct Solve {
    /// Time budget, e.g. `60s` or `5min`
    #[arg(long, default_value = "60min", value_parser = humantime::parse_duration)]
    budget: Duration,
    /// Comma-separated subset of fc, pc, nc
    #[arg(long, default_value = "fc,pc,nc", value_delimiter = ',')]
    oracles: Vec<Scheme>,
    #[arg(long, default_value = "auto")]
    method: CoverMethod,
    #[arg(long, default_value = "exact")]
    fc_mode: ResponseMode,
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    /// Resources sharing each guard post
    #[arg(long, default_value_t = 1)]
    per_post: usize,
    #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
    beam_width: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    max_placements: Option<usize>,
}

impl Solve {
    fn config(&self, seed: u64) -> ResolutionConfig {
        ResolutionConfig {
            budget: self.budget,
            oracles: self.oracles.clone(),
            method: self.method,
            route_limits: RouteLimits {
                beam_width: self.beam_width,
                ..RouteLimits::default()
            },
            seed,
            workers: self.workers,
            max_placements: self.max_placements,
            resources_per_post: self.per_post,
            fc_mode: self.fc_mode,
            pc_restarts: self.restarts,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance
    Gen {
        #[arg(long)]
        targets: usize,
        #[arg(long, default_value_t = 3.0)]
        degree: f64,
        /// Override the size-based deadline
        #[arg(long)]
        deadline: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum covering placement
    Mincover {
        instance: PathBuf,
        #[arg(long, default_value = "auto")]
        method: CoverMethod,
        #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
        budget: Duration,
        #[command(flatten)]
        common: Common,
    },
    /// Covering routes from one vertex
    Routes {
        instance: PathBuf,
        #[arg(long)]
        start: String,
        /// Signal whose support is used (default: first)
        #[arg(long)]
        signal: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
        beam_width: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Signal response oracles on one placement
    Sro {
        instance: PathBuf,
        /// Comma-separated vertex ids (default: minimum cover)
        #[arg(long, value_delimiter = ',')]
        placement: Option<Vec<String>>,
        #[command(flatten)]
        solve: Solve,
        #[command(flatten)]
        common: Common,
    },
    /// Anytime resolution over covering placements
    Resolve {
        instance: PathBuf,
        #[command(flatten)]
        solve: Solve,
        #[command(flatten)]
        common: Common,
    },
    /// Generated instances over sizes and seeds, one run file each plus a CSV
    Bench {
        #[arg(long, default_value = "20,40,60", value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Runs per size; run j uses seed `--seed + j`
        #[arg(long, default_value_t = 5)]
        runs: u64,
        /// Only rebuild bench.csv from the run files in this directory
        #[arg(long)]
        aggregate: Option<PathBuf>,
        #[command(flatten)]
        solve: Solve,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Other(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } | IoError::Csv(_) => Failure::Other(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Game(_) => Failure::Other(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Whether every solver result was certified.
type Certified = bool;

fn emit<T: serde::Serialize>(out: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let path = out.join(name);
    write_json(&path, value)?;
    println!("{}", path.display());
    Ok(())
}

fn emit_text(out: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = out.join(name);
    write_text(&path, text)?;
    println!("{}", path.display());
    Ok(())
}

fn parse_placement(setting: &sigpatrol::model::PatrollingSetting, ids: &[String]) -> Result<CoveringPlacement, Failure> {
    let positions = ids
        .iter()
        .map(|id| setting.vertex_index(id).map_err(|e| Failure::Input(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let placement = CoveringPlacement::new(positions);
    if placement.len() != ids.len() {
        return Err(Failure::Input("placement repeats a vertex".into()));
    }
    if !placement.is_covering(setting) {
        return Err(Failure::Input("placement does not cover every target".into()));
    }
    Ok(placement)
}

fn run(cli: Cli) -> Result<Certified, Failure> {
    match cli.command {
        Command::Gen {
            targets,
            degree,
            deadline,
            common,
        } => {
            let params = GeneratorParams {
                n_targets: targets,
                mean_degree: degree,
                deadline,
                seed: common.seed,
            };
            let generated = generate_instance(&params)?;
            let name = format!("instance_n{targets}_s{}.json", common.seed);
            let mut manifest = RunManifest::new("gen", json!(params), common.seed, None);
            manifest.outputs.push(name.clone());
            let mut file = InstanceFile::from_parts(&generated.setting, &generated.alarm);
            file.manifest = Some(manifest);
            emit(&common.out, &name, &file)?;
            Ok(true)
        }
        Command::Mincover {
            instance,
            method,
            budget,
            common,
        } => {
            let (_, setting, _, hash) = load_instance(&instance)?;
            let start = Instant::now();
            let outcome = min_cover(&setting, method, budget).map_err(|e| Failure::Input(e.to_string()))?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let config = json!({"method": method, "budget": humantime::format_duration(budget).to_string()});
            let mut manifest = RunManifest::new("mincover", config, common.seed, Some(hash));
            manifest.outputs.push("mincover.json".into());
            let metrics = overlap_metrics(&outcome.placement, &setting);
            let file = MinCoverFile::new(manifest, &setting, &outcome, metrics, elapsed, common.timings);
            emit(&common.out, "mincover.json", &file)?;
            Ok(outcome.optimal || !matches!(method, CoverMethod::Exact | CoverMethod::Auto))
        }
        Command::Routes {
            instance,
            start,
            signal,
            beam_width,
            common,
        } => {
            let (_, setting, alarm, hash) = load_instance(&instance)?;
            let v = setting.vertex_index(&start).map_err(|e| Failure::Input(e.to_string()))?;
            let s = match &signal {
                Some(id) => alarm.signal_index(id).map_err(|e| Failure::Input(e.to_string()))?,
                None => 0,
            };
            let support = alarm.signal_support(s).map_err(|e| Failure::Input(e.to_string()))?;
            let limits = RouteLimits {
                beam_width,
                ..RouteLimits::default()
            };
            let set = covering_routes_with(&setting, setting.distances(), v, &support, limits);
            let config = json!({"start": start, "signal": alarm.signal_name(s), "beam_width": beam_width});
            let mut manifest = RunManifest::new("routes", config, common.seed, Some(hash));
            manifest.outputs.push("routes.json".into());
            let file = RoutesFile::new(manifest, &setting, alarm.signal_name(s), &support, &set);
            emit(&common.out, "routes.json", &file)?;
            Ok(true)
        }
        Command::Sro {
            instance,
            placement,
            solve,
            common,
        } => {
            let (_, setting, alarm, hash) = load_instance(&instance)?;
            let config = solve.config(common.seed);
            config.validate()?;
            let deadline = Instant::now() + config.budget;
            let (placement, cover_ok) = match placement {
                Some(ids) => (parse_placement(&setting, &ids)?, true),
                None => {
                    let outcome = min_cover(&setting, config.method, config.budget / 4).map_err(|e| Failure::Input(e.to_string()))?;
                    (outcome.placement, outcome.optimal || config.method != CoverMethod::Exact)
                }
            };
            let eval = evaluate_placement(&setting, &alarm, &placement, &config, deadline)?;
            let mut manifest = RunManifest::new("sro", json!(config), common.seed, Some(hash));
            manifest.outputs.push("sro.json".into());
            emit(&common.out, "sro.json", &SroFile::new(manifest, &setting, &alarm, &eval, common.timings))?;
            Ok(cover_ok && eval.certified)
        }
        Command::Resolve { instance, solve, common } => {
            let (_, setting, alarm, hash) = load_instance(&instance)?;
            let config = solve.config(common.seed);
            let report = resolve(&setting, &alarm, &config)?;
            let mut manifest = RunManifest::new("resolve", json!(config), common.seed, Some(hash));
            manifest.outputs = vec!["report.json".into(), "trace.csv".into()];
            let file = ReportFile::new(manifest, &setting, &report, common.timings);
            emit(&common.out, "report.json", &file)?;
            emit_text(&common.out, "trace.csv", &trace_csv(&file.trace)?)?;
            Ok(report.certified())
        }
        Command::Bench {
            sizes,
            runs,
            aggregate,
            solve,
            common,
        } => {
            if let Some(dir) = aggregate {
                emit_text(&common.out, "bench.csv", &aggregate_runs(&dir)?)?;
                return Ok(true);
            }
            let config = solve.config(common.seed);
            config.validate()?;
            let mut records = Vec::new();
            let mut certified = true;
            for &n in &sizes {
                for j in 0..runs {
                    let seed = common.seed + j;
                    let generated = generate_instance(&GeneratorParams::new(n, seed))?;
                    let run_config = ResolutionConfig {
                        seed,
                        ..config.clone()
                    };
                    let report = resolve(&generated.setting, &generated.alarm, &run_config)?;
                    certified &= report.certified();
                    let name = format!("runs/n{n:03}_s{seed}.json");
                    let mut manifest = RunManifest::new("bench", json!(run_config), seed, None);
                    manifest.outputs.push(name.clone());
                    let record = BenchRun::new(manifest, n, seed, &report, common.timings);
                    emit(&common.out, &name, &record)?;
                    records.push(record);
                }
            }
            emit_text(&common.out, "bench.csv", &bench_csv(&records)?)?;
            Ok(certified)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: a solver stopped at its time budget; results hold the best incumbent");
            ExitCode::from(3)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
