//! The `wbe` command-line tool.
//!
//! Every failure is reported as one JSON object on stderr, e.g.
//! `{"error":"parse","file":"s.json","message":"...","offset":17}`, and a
//! nonzero exit status.

#![allow(clippy::result_large_err)]

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_json, ParseError, ScenarioConfig};
use crate::coverage::track_spacing;
use crate::domain::{Heading, SensorFootprint, WorldPoint};
use crate::error::Error;
use crate::export;
use crate::harness::{self, BatchConfig, BatchFile, BatchStats};
use crate::partition::voronoi_partition;
use crate::planner::{build_weight_map, horizon, SectorWeights, SurvivorReport};
use crate::plot::{self, PlotError, PlotKind, PlotStyle};
use crate::sim::{run_scenario_with, SimOptions, Strategy};

#[derive(Debug, Parser)]
#[command(
    name = "wbe",
    version,
    about = "Multi-UAV weight-based exploration simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario; writes trajectories.csv, events.jsonl, result.json.
    Run(RunArgs),
    /// Run a seeded Monte-Carlo batch; writes runs.csv and summary.json.
    Batch(BatchArgs),
    /// Render an SVG figure from exported data.
    Plot(PlotArgs),
    /// Print derived quantities of a scenario without simulating it.
    Inspect(ScenarioArg),
    /// Write the cell owner grid as CSV.
    PartitionDump(DumpArgs),
    /// Write the weight grid for one survivor report as CSV.
    WeightsDump(WeightsArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    pub scenario: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Overrides `sim.rng_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "wbe")]
    pub strategy: Strategy,
    /// Include wall-clock planning times (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    pub batch: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Overrides the batch's `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the batch's `strategy`.
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Run both strategies on the same seeds and write comparison.json.
    #[arg(long)]
    pub paired: bool,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// trajectory3d, trajectory_xy, position_vs_time, weight_heatmap or partition_map
    pub kind: PlotKind,
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Scenario supplying seed markers and cell size for partition maps.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 600)]
    pub height: u32,
    /// Comma-separated colour cycle.
    #[arg(long, value_delimiter = ',')]
    pub colors: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    pub scenario: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    pub scenario: PathBuf,
    /// Report at this survivor's configured position and heading.
    #[arg(long, default_value_t = 0, conflicts_with = "at")]
    pub survivor: usize,
    /// Report position as `x,y` in meters.
    #[arg(long, requires = "heading", value_parser = parse_point)]
    pub at: Option<WorldPoint>,
    #[arg(long)]
    pub heading: Option<Heading>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<WorldPoint, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(WorldPoint::new(num(x)?, num(y)?))
}

/// Machine-readable failure, printed as a single JSON object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<usize>,
}

impl CliError {
    fn new(error: &'static str, message: impl Into<String>) -> Self {
        CliError {
            error,
            message: message.into(),
            file: None,
            key: None,
            line: None,
            column: None,
            offset: None,
            run: None,
        }
    }

    fn in_file(mut self, path: &Path) -> Self {
        self.file = Some(path.display().to_string());
        self
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::new("io", e.to_string()).in_file(path)
    }

    fn parse(path: &Path, e: ParseError) -> Self {
        CliError {
            key: e.key,
            line: Some(e.line),
            column: Some(e.column),
            offset: Some(e.offset),
            ..CliError::new("parse", e.message).in_file(path)
        }
    }

    fn domain(path: Option<&Path>, e: Error) -> Self {
        let mut out = match &e {
            Error::Run { run, source } => {
                let mut inner = CliError::domain(None, (**source).clone());
                inner.run = Some(*run);
                inner.message = e.to_string();
                inner
            }
            Error::InvalidConfig { key, message } => CliError {
                key: Some(key.clone()),
                ..CliError::new("validation", message.clone())
            },
            Error::Pairing(_) => CliError::new("pairing", e.to_string()),
            _ => CliError::new("validation", e.to_string()),
        };
        if let Some(p) = path {
            out.file = Some(p.display().to_string());
        }
        out
    }

    fn plot(path: &Path, e: PlotError) -> Self {
        let key = match &e {
            PlotError::MissingColumn(c) => Some(c.clone()),
            _ => None,
        };
        CliError {
            key,
            ..CliError::new("input", e.to_string()).in_file(path)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Reads, decodes and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = read(path)?;
    let cfg: ScenarioConfig = parse_json(&text).map_err(|e| CliError::parse(path, e))?;
    cfg.validate()
        .map_err(|e| CliError::domain(Some(path), e))?;
    Ok(cfg)
}

/// Reads a batch file, resolving `base_scenario_path` against its directory.
pub fn load_batch(path: &Path) -> Result<BatchConfig, CliError> {
    let text = read(path)?;
    let file: BatchFile = parse_json(&text).map_err(|e| CliError::parse(path, e))?;
    let base = match (file.base_scenario, file.base_scenario_path) {
        (Some(cfg), None) => {
            cfg.validate()
                .map_err(|e| CliError::domain(Some(path), e))?;
            cfg
        }
        (None, Some(rel)) => {
            let dir = path.parent().unwrap_or(Path::new("."));
            load_scenario(&dir.join(rel))?
        }
        _ => {
            return Err(CliError {
                key: Some("base_scenario".into()),
                ..CliError::new(
                    "validation",
                    "exactly one of base_scenario and base_scenario_path is required",
                )
                .in_file(path)
            })
        }
    };
    if file.n_runs == 0 {
        return Err(CliError {
            key: Some("n_runs".into()),
            ..CliError::new("validation", "must be at least 1").in_file(path)
        });
    }
    Ok(BatchConfig {
        base_scenario: base,
        n_runs: file.n_runs,
        master_seed: file.master_seed,
        randomize: file.randomize,
        strategy: file.strategy,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let mut cfg = load_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        cfg.sim.rng_seed = seed;
    }
    let result = run_scenario_with(
        &cfg,
        SimOptions {
            strategy: args.strategy,
            record_trajectories: true,
        },
    )
    .map_err(|e| CliError::domain(Some(&args.scenario), e))?;
    ensure_dir(&args.out_dir)?;
    write(
        &args.out_dir.join("trajectories.csv"),
        &export::trajectories_csv(&result.trajectories),
    )?;
    write(
        &args.out_dir.join("events.jsonl"),
        &export::events_jsonl(&result.events),
    )?;
    write(
        &args.out_dir.join("result.json"),
        &export::to_pretty_json(&export::result_json(&result, args.timing)),
    )
}

fn summary_json(stats: &BatchStats, timing: bool) -> serde_json::Value {
    let mut v = json!({
        "strategy": stats.strategy,
        "n_runs": stats.n_runs,
        "master_seed": stats.master_seed,
        "aggregates": stats.aggregates,
    });
    if timing {
        v["planning_time_s"] = json!(stats.total_planning_time_s());
    }
    v
}

fn cmd_batch(args: &BatchArgs) -> Result<(), CliError> {
    let mut config = load_batch(&args.batch)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(strategy) = args.strategy {
        config.strategy = strategy;
    }
    let fail = |e| CliError::domain(Some(&args.batch), e);
    ensure_dir(&args.out_dir)?;
    if args.paired {
        let (wbe, mower, report) = harness::run_paired(&config).map_err(fail)?;
        write(
            &args.out_dir.join("runs.csv"),
            &harness::runs_csv(&[&wbe, &mower], args.timing),
        )?;
        write(
            &args.out_dir.join("summary.json"),
            &export::to_pretty_json(&json!({
                "wbe": summary_json(&wbe, args.timing),
                "lawnmower": summary_json(&mower, args.timing),
            })),
        )?;
        let mut comparison = serde_json::to_value(&report).expect("report serializes");
        comparison["ratio_of_medians"] = json!(report.ratio_of_medians());
        comparison["ratio_of_medians_triggered_first"] =
            json!(report.triggered_first.ratio_of_medians);
        write(
            &args.out_dir.join("comparison.json"),
            &export::to_pretty_json(&comparison),
        )?;
        write(&args.out_dir.join("comparison.txt"), &report.to_text())
    } else {
        let stats = harness::run_batch(&config).map_err(fail)?;
        write(
            &args.out_dir.join("runs.csv"),
            &harness::runs_csv(&[&stats], args.timing),
        )?;
        write(
            &args.out_dir.join("summary.json"),
            &export::to_pretty_json(&summary_json(&stats, args.timing)),
        )
    }
}

fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let mut style = PlotStyle {
        width_px: args.width,
        height_px: args.height,
        ..PlotStyle::default()
    };
    if !args.colors.is_empty() {
        style.colors = args.colors.clone();
    }
    let input = &args.inputs[0];
    let text = read(input)?;
    let svg = match args.kind {
        PlotKind::Trajectory3d | PlotKind::TrajectoryXy | PlotKind::PositionVsTime => {
            let mut tracks = Vec::new();
            for path in &args.inputs {
                let body = if path == input {
                    text.clone()
                } else {
                    read(path)?
                };
                tracks
                    .extend(plot::parse_trajectories(&body).map_err(|e| CliError::plot(path, e))?);
            }
            match args.kind {
                PlotKind::Trajectory3d => plot::trajectory3d(&tracks, &style),
                PlotKind::TrajectoryXy => plot::trajectory_xy(&tracks, &style),
                _ => plot::position_vs_time(&tracks, &style),
            }
        }
        PlotKind::WeightHeatmap => {
            let grid = plot::parse_grid::<u64>(&text).map_err(|e| CliError::plot(input, e))?;
            plot::weight_heatmap(&grid, &style)
        }
        PlotKind::PartitionMap => {
            let grid = plot::parse_grid::<usize>(&text).map_err(|e| CliError::plot(input, e))?;
            let (seeds, cell) = match &args.scenario {
                Some(p) => {
                    let cfg = load_scenario(p)?;
                    (
                        cfg.uavs.iter().map(|u| u.start).collect(),
                        cfg.environment.cell_size_m,
                    )
                }
                None => (Vec::new(), 1.0),
            };
            plot::partition_map(&grid, &seeds, cell, &style)
        }
    };
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write(&args.output, &svg)
}

fn cmd_inspect(path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_scenario(path)?;
    let fail = |e| CliError::domain(Some(path), e);
    let env = cfg.environment;
    let seeds: Vec<WorldPoint> = cfg.uavs.iter().map(|u| u.start).collect();
    let partition = voronoi_partition(&env, &seeds).map_err(fail)?;
    let sizes = partition.sizes();

    let mut text = String::new();
    text.push_str(&format!(
        "grid: {} x {} cells of {} m ({} cells)\n",
        env.cols(),
        env.rows(),
        env.cell_size_m,
        env.cell_count()
    ));
    let listed: Vec<String> = sizes.iter().map(ToString::to_string).collect();
    text.push_str(&format!(
        "partition sizes: {} (total {})\n",
        listed.join(" "),
        sizes.iter().sum::<usize>()
    ));
    for (k, u) in cfg.uavs.iter().enumerate() {
        let fp = SensorFootprint::new(u.altitude_m, u.fov_half_angle_deg).map_err(fail)?;
        text.push_str(&format!(
            "uav {k}: start ({}, {}), footprint side {:.1} m, track spacing {} cells, partition {} cells\n",
            u.start.x,
            u.start.y,
            fp.side_m(),
            track_spacing(&fp, &env),
            sizes[k]
        ));
    }
    for (k, s) in cfg.survivors.iter().enumerate() {
        let cell = env.world_to_cell(s.position).map_err(fail)?;
        let n = horizon(&env, cell).map_err(fail)?;
        let w = SectorWeights::new(n as i64).map_err(fail)?;
        text.push_str(&format!(
            "survivor {k}: at ({}, {}) heading {}, cell ({}, {}), owner uav {}, horizon n={}, weights w1={} w2={} w3={} w4={} w5={}\n",
            s.position.x,
            s.position.y,
            s.heading.as_str(),
            cell.i,
            cell.j,
            partition.owner(cell).map_err(fail)?,
            n,
            w.w1,
            w.w2,
            w.w3,
            w.w4,
            w.w5
        ));
    }
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new("io", e.to_string()))
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(p) => write(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new("io", e.to_string())),
    }
}

fn cmd_partition_dump(args: &DumpArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_scenario(&args.scenario)?;
    let seeds: Vec<WorldPoint> = cfg.uavs.iter().map(|u| u.start).collect();
    let map = voronoi_partition(&cfg.environment, &seeds)
        .map_err(|e| CliError::domain(Some(&args.scenario), e))?;
    emit(args.output.as_deref(), &export::partition_csv(&map), out)
}

fn cmd_weights_dump(args: &WeightsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_scenario(&args.scenario)?;
    let report = match (args.at, args.heading) {
        (Some(at), Some(heading)) => SurvivorReport {
            last_known: at,
            heading,
            report_time: 0.0,
        },
        _ => {
            let s = cfg.survivors.get(args.survivor).ok_or_else(|| CliError {
                key: Some("survivor".into()),
                ..CliError::new(
                    "validation",
                    format!(
                        "survivor {} not in scenario ({} survivors)",
                        args.survivor,
                        cfg.survivors.len()
                    ),
                )
                .in_file(&args.scenario)
            })?;
            SurvivorReport {
                last_known: s.position,
                heading: s.heading,
                report_time: 0.0,
            }
        }
    };
    let map = build_weight_map(&cfg.environment, &report, cfg.planner.options())
        .map_err(|e| CliError::domain(Some(&args.scenario), e))?;
    emit(args.output.as_deref(), &export::weight_map_csv(&map), out)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Inspect(a) => cmd_inspect(&a.scenario, out),
        Command::PartitionDump(a) => cmd_partition_dump(a, out),
        Command::WeightsDump(a) => cmd_weights_dump(a, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout(), "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let message = rendered
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("{}", CliError::new("usage", message).to_json());
            return 2;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            1
        }
    }
}
