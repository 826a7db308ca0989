//! Seeded Monte-Carlo batches and paired strategy comparison.
//!
//! Run `i` of a batch draws its randomization from a seed derived from
//! `(master_seed, i)`, so two batches with the same master seed but
//! different strategies see identical worlds run for run. Runs execute in
//! parallel and are collected in index order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::domain::{Heading, SensorFootprint, WorldPoint};
use crate::error::{Error, Result};
use crate::sim::{run_scenario_with, RunResult, SimOptions, Strategy};

/// Attempts at drawing a survivor position outside every UAV's footprint.
const MAX_PLACEMENT_TRIES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomizeFlags {
    pub survivor_position: bool,
    pub survivor_heading: bool,
    pub observer_positions: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub base_scenario: ScenarioConfig,
    pub n_runs: usize,
    pub master_seed: u64,
    pub randomize: RandomizeFlags,
    pub strategy: Strategy,
}

/// On-disk form of a batch. The base scenario is given inline or as a path
/// relative to the batch file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchFile {
    #[serde(default)]
    pub base_scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub base_scenario_path: Option<String>,
    pub n_runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub randomize: RandomizeFlags,
    #[serde(default)]
    pub strategy: Strategy,
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run` within a batch.
pub fn derive_seed(master_seed: u64, run: usize) -> u64 {
    mix64(master_seed ^ mix64((run as u64).wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Applies the batch's randomization to a copy of the base scenario.
pub fn randomize_scenario(
    base: &ScenarioConfig,
    flags: RandomizeFlags,
    seed: u64,
) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    cfg.sim.rng_seed = seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = cfg.environment;
    let footprints = cfg
        .uavs
        .iter()
        .map(|u| {
            Ok((
                u.start,
                SensorFootprint::new(u.altitude_m, u.fov_half_angle_deg)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    for (k, s) in cfg.survivors.iter_mut().enumerate() {
        if flags.survivor_position {
            let mut placed = None;
            for _ in 0..MAX_PLACEMENT_TRIES {
                let cell = env.cell_at(rng.gen_range(0..env.cell_count()));
                let p = env.cell_center(cell)?;
                if footprints.iter().all(|(start, fp)| !fp.covers(*start, p)) {
                    placed = Some(p);
                    break;
                }
            }
            s.position = placed.ok_or_else(|| {
                Error::config(
                    format!("survivors[{k}].position"),
                    "no cell lies outside the UAVs' initial footprints",
                )
            })?;
        }
        if flags.survivor_heading {
            s.heading = *Heading::ALL.choose(&mut rng).expect("eight headings");
        }
    }
    if flags.observer_positions {
        for o in cfg.observers.iter_mut() {
            o.position = WorldPoint::new(
                rng.gen_range(0.0..=env.width_m),
                rng.gen_range(0.0..=env.height_m),
            );
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Ticks until each survivor was located; `None` if never.
    pub steps_to_locate: Vec<Option<u64>>,
    pub located: Vec<bool>,
    pub first_trigger_step: Option<u64>,
    pub completed: bool,
    pub steps: u64,
    pub distance_m: f64,
    pub planning_cells: u64,
    /// Wall-clock, excluded from serialized output.
    #[serde(skip)]
    pub planning_time_s: f64,
}

impl RunRecord {
    pub fn from_result(run: usize, seed: u64, result: &RunResult) -> Self {
        RunRecord {
            run,
            seed,
            steps_to_locate: result
                .survivor_metrics
                .iter()
                .map(|s| s.located_step)
                .collect(),
            located: result.survivor_metrics.iter().map(|s| s.located).collect(),
            first_trigger_step: result.first_trigger_step(),
            completed: result.completed,
            steps: result.steps,
            distance_m: result
                .uav_metrics
                .iter()
                .map(|m| m.distance_traveled_m)
                .sum(),
            planning_cells: result.uav_metrics.iter().map(|m| m.planning_cells).sum(),
            planning_time_s: result.total_planning_time_s(),
        }
    }
}

/// Summary of ticks-to-locate over every located survivor in a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub count_located: usize,
    pub count_total: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub mean_distance_m: f64,
}

pub fn median(values: &[u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] as f64 + v[mid] as f64) / 2.0
    })
}

pub fn compute_aggregates(records: &[RunRecord]) -> Aggregates {
    let steps: Vec<u64> = records
        .iter()
        .flat_map(|r| r.steps_to_locate.iter().flatten().copied())
        .collect();
    let count_total = records.iter().map(|r| r.steps_to_locate.len()).sum();
    let mean = (!steps.is_empty())
        .then(|| steps.iter().map(|&s| s as u128).sum::<u128>() as f64 / steps.len() as f64);
    let mean_distance_m = if records.is_empty() {
        0.0
    } else {
        records.iter().map(|r| r.distance_m).sum::<f64>() / records.len() as f64
    };
    Aggregates {
        count_located: steps.len(),
        count_total,
        mean,
        median: median(&steps),
        min: steps.iter().copied().min(),
        max: steps.iter().copied().max(),
        mean_distance_m,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStats {
    pub strategy: Strategy,
    pub n_runs: usize,
    pub master_seed: u64,
    pub records: Vec<RunRecord>,
    pub aggregates: Aggregates,
}

impl BatchStats {
    pub fn aggregates_consistent(&self) -> bool {
        compute_aggregates(&self.records) == self.aggregates
    }

    pub fn total_planning_time_s(&self) -> f64 {
        self.records.iter().map(|r| r.planning_time_s).sum()
    }

    pub fn without_timing(mut self) -> Self {
        for r in &mut self.records {
            r.planning_time_s = 0.0;
        }
        self
    }
}

/// Runs one member of a batch.
pub fn run_single(config: &BatchConfig, run: usize) -> Result<RunRecord> {
    let annotate = |e: Error| Error::Run {
        run,
        source: Box::new(e),
    };
    let seed = derive_seed(config.master_seed, run);
    let scenario =
        randomize_scenario(&config.base_scenario, config.randomize, seed).map_err(annotate)?;
    let result = run_scenario_with(
        &scenario,
        SimOptions {
            strategy: config.strategy,
            record_trajectories: false,
        },
    )
    .map_err(annotate)?;
    Ok(RunRecord::from_result(run, seed, &result))
}

pub fn run_batch(config: &BatchConfig) -> Result<BatchStats> {
    if config.n_runs == 0 {
        return Err(Error::config("n_runs", "must be at least 1"));
    }
    config.base_scenario.validate().map_err(|e| Error::Run {
        run: 0,
        source: Box::new(e),
    })?;
    let records = (0..config.n_runs)
        .into_par_iter()
        .map(|run| run_single(config, run))
        .collect::<Result<Vec<_>>>()?;
    let aggregates = compute_aggregates(&records);
    Ok(BatchStats {
        strategy: config.strategy,
        n_runs: config.n_runs,
        master_seed: config.master_seed,
        records,
        aggregates,
    })
}

/// One survivor in one run, seen by both strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedRecord {
    pub run: usize,
    pub survivor: usize,
    pub a_steps: Option<u64>,
    pub b_steps: Option<u64>,
    /// `a_steps - b_steps` when both located.
    pub delta: Option<i64>,
    /// A's first accepted trigger came before B located this survivor.
    pub a_triggered_first: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedianComparison {
    /// Pairs where both strategies located the survivor.
    pub pairs: usize,
    pub median_a: Option<f64>,
    pub median_b: Option<f64>,
    /// `median_b / median_a`; above 1 means A locates faster.
    pub ratio_of_medians: Option<f64>,
}

impl MedianComparison {
    fn from_pairs<'a>(pairs: impl Iterator<Item = &'a PairedRecord>) -> Self {
        let (a, b): (Vec<u64>, Vec<u64>) =
            pairs.filter_map(|p| Some((p.a_steps?, p.b_steps?))).unzip();
        let median_a = median(&a);
        let median_b = median(&b);
        let ratio_of_medians = match (median_a, median_b) {
            (Some(ma), Some(mb)) if ma > 0.0 => Some(mb / ma),
            _ => None,
        };
        MedianComparison {
            pairs: a.len(),
            median_a,
            median_b,
            ratio_of_medians,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
    pub n_runs: usize,
    pub master_seed: u64,
    pub pairs: Vec<PairedRecord>,
    pub mean_delta: Option<f64>,
    pub all: MedianComparison,
    /// Restricted to pairs where A was triggered before B's detection.
    pub triggered_first: MedianComparison,
}

impl ComparisonReport {
    pub fn ratio_of_medians(&self) -> Option<f64> {
        self.all.ratio_of_medians
    }

    pub fn to_text(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
        let mut out = String::new();
        out.push_str(&format!(
            "paired comparison: A = {:?}, B = {:?}, {} runs, master seed {}\n",
            self.strategy_a, self.strategy_b, self.n_runs, self.master_seed
        ));
        for (label, m) in [
            ("all pairs", &self.all),
            ("A triggered first", &self.triggered_first),
        ] {
            out.push_str(&format!(
                "{label}: {} pairs, median A {}, median B {}, ratio B/A {}\n",
                m.pairs,
                fmt(m.median_a),
                fmt(m.median_b),
                fmt(m.ratio_of_medians)
            ));
        }
        out.push_str(&format!("mean delta (A - B): {}\n", fmt(self.mean_delta)));
        out
    }
}

pub fn compare_strategies(
    a: &BatchStats,
    b: &BatchStats,
    a_triggers: &[Option<u64>],
) -> Result<ComparisonReport> {
    if a.n_runs != b.n_runs || a.records.len() != b.records.len() {
        return Err(Error::Pairing(format!(
            "run counts differ: {} vs {}",
            a.n_runs, b.n_runs
        )));
    }
    let mut pairs = Vec::new();
    for (ra, rb) in a.records.iter().zip(&b.records) {
        if ra.run != rb.run || ra.seed != rb.seed {
            return Err(Error::Pairing(format!(
                "run {} has seed {} in A but run {} has seed {} in B",
                ra.run, ra.seed, rb.run, rb.seed
            )));
        }
        if ra.steps_to_locate.len() != rb.steps_to_locate.len() {
            return Err(Error::Pairing(format!(
                "run {} has {} survivors in A and {} in B",
                ra.run,
                ra.steps_to_locate.len(),
                rb.steps_to_locate.len()
            )));
        }
        let trigger = a_triggers
            .get(ra.run)
            .copied()
            .flatten()
            .or(ra.first_trigger_step);
        for (k, (&sa, &sb)) in ra
            .steps_to_locate
            .iter()
            .zip(&rb.steps_to_locate)
            .enumerate()
        {
            let a_triggered_first = match (trigger, sb) {
                (Some(t), Some(b_steps)) => t < b_steps,
                (Some(_), None) => true,
                (None, _) => false,
            };
            pairs.push(PairedRecord {
                run: ra.run,
                survivor: k,
                a_steps: sa,
                b_steps: sb,
                delta: sa.zip(sb).map(|(x, y)| x as i64 - y as i64),
                a_triggered_first,
            });
        }
    }
    let deltas: Vec<i64> = pairs.iter().filter_map(|p| p.delta).collect();
    let mean_delta =
        (!deltas.is_empty()).then(|| deltas.iter().sum::<i64>() as f64 / deltas.len() as f64);
    Ok(ComparisonReport {
        strategy_a: a.strategy,
        strategy_b: b.strategy,
        n_runs: a.n_runs,
        master_seed: a.master_seed,
        all: MedianComparison::from_pairs(pairs.iter()),
        triggered_first: MedianComparison::from_pairs(pairs.iter().filter(|p| p.a_triggered_first)),
        mean_delta,
        pairs,
    })
}

/// Runs the same batch under both strategies and pairs them.
pub fn run_paired(config: &BatchConfig) -> Result<(BatchStats, BatchStats, ComparisonReport)> {
    let wbe = run_batch(&BatchConfig {
        strategy: Strategy::Wbe,
        ..config.clone()
    })?;
    let mower = run_batch(&BatchConfig {
        strategy: Strategy::LawnmowerOnly,
        ..config.clone()
    })?;
    let report = compare_strategies(&wbe, &mower, &[])?;
    Ok((wbe, mower, report))
}

/// One row per run; several batches (e.g. both sides of a pairing) stack.
pub fn runs_csv(batches: &[&BatchStats], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "run",
        "seed",
        "strategy",
        "survivor",
        "located",
        "steps_to_locate",
        "first_trigger_step",
        "completed",
        "steps",
        "distance_m",
        "planning_cells",
    ];
    if timing {
        header.push("planning_time_s");
    }
    w.write_record(&header).expect("in-memory write");
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (stats, r) in batches
        .iter()
        .flat_map(|b| b.records.iter().map(move |r| (b, r)))
    {
        let strategy = match stats.strategy {
            Strategy::Wbe => "wbe",
            Strategy::LawnmowerOnly => "lawnmower",
        };
        // one row per run, survivors joined with ';'
        let join = |f: &dyn Fn(usize) -> String| {
            (0..r.steps_to_locate.len())
                .map(f)
                .collect::<Vec<_>>()
                .join(";")
        };
        let mut row = vec![
            r.run.to_string(),
            r.seed.to_string(),
            strategy.to_string(),
            join(&|k| k.to_string()),
            join(&|k| r.located[k].to_string()),
            join(&|k| opt(r.steps_to_locate[k])),
            opt(r.first_trigger_step),
            r.completed.to_string(),
            r.steps.to_string(),
            r.distance_m.to_string(),
            r.planning_cells.to_string(),
        ];
        if timing {
            row.push(r.planning_time_s.to_string());
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ObserverConfig, SimConfig, SurvivorConfig, UavConfig};
    use crate::domain::GridEnvironment;

    fn small_base() -> ScenarioConfig {
        ScenarioConfig {
            environment: GridEnvironment::new(20.0, 20.0, 1.0).unwrap(),
            uavs: vec![UavConfig {
                start: WorldPoint::new(0.0, 0.0),
                speed_mps: 2.0,
                altitude_m: 2.0,
                fov_half_angle_deg: 45.0,
            }],
            survivors: vec![SurvivorConfig {
                position: WorldPoint::new(10.0, 10.0),
                heading: Heading::N,
                speed_mps: 0.5,
            }],
            observers: (0..4)
                .map(|k| ObserverConfig {
                    position: WorldPoint::new(5.0 * k as f64, 10.0),
                    radius_m: 4.0,
                })
                .collect(),
            scripted_triggers: vec![],
            sim: SimConfig {
                dt_s: 0.1,
                max_steps: 20_000,
                rng_seed: 0,
            },
            planner: Default::default(),
        }
    }

    fn batch(n_runs: usize, strategy: Strategy) -> BatchConfig {
        BatchConfig {
            base_scenario: small_base(),
            n_runs,
            master_seed: 42,
            randomize: RandomizeFlags {
                survivor_position: true,
                survivor_heading: true,
                observer_positions: true,
            },
            strategy,
        }
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
        assert_eq!(derive_seed(7, 3), seeds[3]);
        assert_ne!(derive_seed(8, 3), seeds[3]);
    }

    #[test]
    fn randomized_survivors_avoid_initial_footprints() {
        let base = small_base();
        for seed in 0..200 {
            let cfg = randomize_scenario(&base, batch(1, Strategy::Wbe).randomize, seed).unwrap();
            let p = cfg.survivors[0].position;
            // footprint of the UAV at (0, 0) reaches 2 m
            assert!(p.x > 2.0 || p.y > 2.0);
            assert!(cfg.environment.contains_point(p));
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn single_unrandomized_run_matches_run_scenario() {
        let config = BatchConfig {
            randomize: RandomizeFlags::default(),
            ..batch(1, Strategy::Wbe)
        };
        let stats = run_batch(&config).unwrap();
        let mut scenario = small_base();
        scenario.sim.rng_seed = derive_seed(42, 0);
        let direct = run_scenario_with(
            &scenario,
            SimOptions {
                strategy: Strategy::Wbe,
                record_trajectories: false,
            },
        )
        .unwrap();
        let expected = RunRecord::from_result(0, derive_seed(42, 0), &direct);
        assert_eq!(
            stats.records[0].clone().steps_to_locate,
            expected.steps_to_locate
        );
        assert_eq!(stats.records[0].distance_m, expected.distance_m);
        assert_eq!(
            stats.records[0].first_trigger_step,
            expected.first_trigger_step
        );
    }

    #[test]
    fn batches_are_deterministic_and_consistent() {
        let a = run_batch(&batch(6, Strategy::Wbe))
            .unwrap()
            .without_timing();
        let b = run_batch(&batch(6, Strategy::Wbe))
            .unwrap()
            .without_timing();
        assert_eq!(a, b);
        assert!(a.aggregates_consistent());
        assert_eq!(runs_csv(&[&a], false), runs_csv(&[&b], false));
        assert_eq!(runs_csv(&[&a], false).lines().count(), 7);
        assert_eq!(runs_csv(&[&a, &b], true).lines().count(), 13);
    }

    #[test]
    fn compare_identical_batches() {
        let a = run_batch(&batch(4, Strategy::Wbe)).unwrap();
        let report = compare_strategies(&a, &a, &[]).unwrap();
        assert!(report.pairs.iter().all(|p| p.delta.is_none_or(|d| d == 0)));
        if report.all.pairs > 0 {
            assert_eq!(report.ratio_of_medians(), Some(1.0));
        }
    }

    #[test]
    fn compare_rejects_mismatched_batches() {
        let a = run_batch(&batch(3, Strategy::Wbe)).unwrap();
        let b = run_batch(&batch(2, Strategy::Wbe)).unwrap();
        assert!(matches!(
            compare_strategies(&a, &b, &[]),
            Err(Error::Pairing(_))
        ));
        let mut c = a.clone();
        c.records[1].seed ^= 1;
        assert!(matches!(
            compare_strategies(&a, &c, &[]),
            Err(Error::Pairing(_))
        ));
    }

    #[test]
    fn errors_carry_run_index() {
        let mut config = batch(3, Strategy::Wbe);
        config.base_scenario.environment = GridEnvironment {
            width_m: 4.0,
            height_m: 4.0,
            cell_size_m: 1.0,
        };
        // a 16 m footprint at (0, 0) leaves nowhere to place the survivor
        config.base_scenario.uavs[0].altitude_m = 8.0;
        config.base_scenario.survivors[0].position = WorldPoint::new(3.0, 3.0);
        config.base_scenario.observers.clear();
        let err = run_batch(&config).unwrap_err();
        assert!(matches!(err, Error::Run { run, .. } if run < 3), "{err}");
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[5]), Some(5.0));
        assert_eq!(median(&[4, 1, 3]), Some(3.0));
        assert_eq!(median(&[4, 1, 3, 10]), Some(3.5));
    }
}
