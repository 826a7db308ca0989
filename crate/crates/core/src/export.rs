//! File formats written by the command-line tool.
//!
//! - trajectories: CSV with header `t,agent_kind,agent_id,x,y,z,mode`, one
//!   row per agent per tick (UAVs first, then survivors);
//! - events: JSON lines, one object per event with a `type` and `t` field;
//! - grids (weights, partition owners): CSV with one line per grid row,
//!   row 0 (southmost) first, one value per cell.
//!
//! Floats are written in shortest round-trip form so output is
//! byte-for-byte reproducible.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::partition::PartitionMap;
use crate::planner::WeightMap;
use crate::sim::{AgentKind, Event, RunResult, TrajectoryRow};

pub const TRAJECTORY_HEADER: [&str; 7] = ["t", "agent_kind", "agent_id", "x", "y", "z", "mode"];

fn kind_str(kind: AgentKind) -> &'static str {
    match kind {
        AgentKind::Uav => "uav",
        AgentKind::Survivor => "survivor",
    }
}

pub fn write_trajectories_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            kind_str(r.agent_kind).to_string(),
            r.agent_id.to_string(),
            r.x.to_string(),
            r.y.to_string(),
            r.z.to_string(),
            r.mode.to_string(),
        ])?;
    }
    w.flush()
}

pub fn trajectories_csv(rows: &[TrajectoryRow]) -> String {
    let mut buf = Vec::new();
    write_trajectories_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn events_jsonl(events: &[Event]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

/// Run summary. Wall-clock planning times appear only when `timing` is set.
pub fn result_json(result: &RunResult, timing: bool) -> Value {
    let mut v = serde_json::to_value(result).expect("result serializes");
    v["events"] = json!(result.events.len());
    v["first_trigger_step"] = json!(result.first_trigger_step());
    if timing {
        v["planning_time_s"] = json!(result
            .uav_metrics
            .iter()
            .map(|m| m.planning_time_s)
            .collect::<Vec<_>>());
    }
    v
}

pub fn to_pretty_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn grid_csv<T: ToString>(cols: usize, values: &[T]) -> String {
    let mut out = String::new();
    for row in values.chunks(cols) {
        let line: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn weight_map_csv(map: &WeightMap) -> String {
    grid_csv(map.env.cols(), map.weights())
}

pub fn partition_csv(map: &PartitionMap) -> String {
    grid_csv(map.env.cols(), map.owners())
}
