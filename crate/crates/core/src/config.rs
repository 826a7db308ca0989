//! Scenario documents.
//!
//! ```json
//! {
//!   "environment": {"width_m": 20, "height_m": 20, "cell_size_m": 1},
//!   "uavs": [{"start": [0, 0], "speed_mps": 2, "altitude_m": 2, "fov_half_angle_deg": 45}],
//!   "survivors": [{"position": [5, 5], "heading": "SE", "speed_mps": 0.5}],
//!   "observers": [{"position": [5, 6], "radius_m": 3}],
//!   "scripted_triggers": [{"time_s": 1, "survivor": 0, "reported_position": [5, 5], "reported_heading": "SE"}],
//!   "sim": {"dt_s": 0.1, "max_steps": 20000, "rng_seed": 7},
//!   "planner": {"left_before_right": true, "sweep_axis": "rows"}
//! }
//! ```
//!
//! Survivor and UAV references are 0-based list indices. Unknown keys are
//! rejected.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coverage::SweepAxis;
use crate::domain::{GridEnvironment, Heading, SensorFootprint, WorldPoint};
use crate::error::{Error, Result};
use crate::planner::PlannerOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub environment: GridEnvironment,
    pub uavs: Vec<UavConfig>,
    #[serde(default)]
    pub survivors: Vec<SurvivorConfig>,
    #[serde(default)]
    pub observers: Vec<ObserverConfig>,
    #[serde(default)]
    pub scripted_triggers: Vec<TriggerConfig>,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavConfig {
    pub start: WorldPoint,
    #[serde(default = "default_uav_speed")]
    pub speed_mps: f64,
    #[serde(default = "default_altitude")]
    pub altitude_m: f64,
    #[serde(default = "default_half_angle")]
    pub fov_half_angle_deg: f64,
}

fn default_uav_speed() -> f64 {
    2.0
}

fn default_altitude() -> f64 {
    2.0
}

fn default_half_angle() -> f64 {
    45.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivorConfig {
    pub position: WorldPoint,
    pub heading: Heading,
    #[serde(default = "default_survivor_speed")]
    pub speed_mps: f64,
}

fn default_survivor_speed() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    pub position: WorldPoint,
    pub radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerConfig {
    pub time_s: f64,
    pub survivor: usize,
    pub reported_position: WorldPoint,
    pub reported_heading: Heading,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt_s: f64,
    pub max_steps: u64,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt_s: 0.1,
            max_steps: 100_000,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub left_before_right: bool,
    pub sweep_axis: SweepAxis,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            left_before_right: true,
            sweep_axis: SweepAxis::Rows,
        }
    }
}

impl PlannerConfig {
    pub fn options(&self) -> PlannerOptions {
        PlannerOptions {
            left_before_right: self.left_before_right,
        }
    }
}

fn positive(key: String, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn in_bounds(env: &GridEnvironment, key: String, p: WorldPoint) -> Result<()> {
    if env.contains_point(p) {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!(
                "point ({}, {}) outside the {} m x {} m environment",
                p.x, p.y, env.width_m, env.height_m
            ),
        ))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let env = &self.environment;
        env.validate()
            .map_err(|e| Error::config("environment", e.to_string()))?;
        if self.uavs.is_empty() {
            return Err(Error::config("uavs", "at least one UAV is required"));
        }
        let mut start_cells = Vec::new();
        for (k, u) in self.uavs.iter().enumerate() {
            in_bounds(env, format!("uavs[{k}].start"), u.start)?;
            positive(format!("uavs[{k}].speed_mps"), u.speed_mps)?;
            SensorFootprint::new(u.altitude_m, u.fov_half_angle_deg)
                .map_err(|e| Error::config(format!("uavs[{k}]"), e.to_string()))?;
            let cell = env.world_to_cell(u.start)?;
            if let Some(other) = start_cells.iter().position(|&c| c == cell) {
                return Err(Error::config(
                    format!("uavs[{k}].start"),
                    format!("shares cell {cell} with uavs[{other}]"),
                ));
            }
            start_cells.push(cell);
        }
        for (k, s) in self.survivors.iter().enumerate() {
            in_bounds(env, format!("survivors[{k}].position"), s.position)?;
            if !(s.speed_mps.is_finite() && s.speed_mps >= 0.0) {
                return Err(Error::config(
                    format!("survivors[{k}].speed_mps"),
                    format!("must be non-negative, got {}", s.speed_mps),
                ));
            }
        }
        for (k, o) in self.observers.iter().enumerate() {
            if !(o.position.x.is_finite() && o.position.y.is_finite()) {
                return Err(Error::config(
                    format!("observers[{k}].position"),
                    "must be finite",
                ));
            }
            positive(format!("observers[{k}].radius_m"), o.radius_m)?;
        }
        for (k, t) in self.scripted_triggers.iter().enumerate() {
            if !(t.time_s.is_finite() && t.time_s >= 0.0) {
                return Err(Error::config(
                    format!("scripted_triggers[{k}].time_s"),
                    format!("must be non-negative, got {}", t.time_s),
                ));
            }
            if t.survivor >= self.survivors.len() {
                return Err(Error::config(
                    format!("scripted_triggers[{k}].survivor"),
                    format!(
                        "index {} out of range for {} survivors",
                        t.survivor,
                        self.survivors.len()
                    ),
                ));
            }
            in_bounds(
                env,
                format!("scripted_triggers[{k}].reported_position"),
                t.reported_position,
            )?;
        }
        positive("sim.dt_s".into(), self.sim.dt_s)?;
        if self.sim.max_steps == 0 {
            return Err(Error::config("sim.max_steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, ParseError> {
        parse_json(text)
    }
}

/// JSON decoding failure with enough context to point at the problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseError {
    pub message: String,
    /// Dotted path to the offending value, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub line: usize,
    pub column: usize,
    /// Byte offset into the document.
    pub offset: usize,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)?;
        if let Some(key) = &self.key {
            write!(f, " (key {key})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

/// Strict JSON decode that reports the byte offset and the key path of the
/// first error; unknown-field errors name the unknown key.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> std::result::Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let result: std::result::Result<T, _> = serde_path_to_error::deserialize(&mut de);
    let err = match result {
        Ok(v) => match de.end() {
            Ok(()) => return Ok(v),
            Err(e) => {
                return Err(ParseError {
                    message: e.to_string(),
                    key: None,
                    line: e.line(),
                    column: e.column(),
                    offset: byte_offset(text, e.line(), e.column()),
                })
            }
        },
        Err(e) => e,
    };
    let path = err.path().to_string();
    let inner = err.into_inner();
    let message = inner.to_string();
    let unknown = message
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
        .map(str::to_owned);
    let syntax = matches!(
        inner.classify(),
        serde_json::error::Category::Syntax | serde_json::error::Category::Eof
    );
    let key = match unknown {
        _ if syntax => None,
        Some(name) if path == "." || path.is_empty() => Some(name),
        Some(name) if path.ends_with(&name) => Some(path),
        Some(name) => Some(format!("{path}.{name}")),
        None if path == "." || path.is_empty() => None,
        None => Some(path),
    };
    Err(ParseError {
        message,
        key,
        line: inner.line(),
        column: inner.column(),
        offset: byte_offset(text, inner.line(), inner.column()),
    })
}
