//! Weight-based exploration planner.
//!
//! Given a survivor's last known position and heading, every cell of the
//! environment receives an integer weight: the reported cell gets the
//! largest weight, then the cone ahead of the survivor, the lateral cones,
//! and finally the cone behind. Within the forward and lateral cones the
//! weight falls off by one step per Chebyshev ring, with step sizes chosen
//! so that no ring of a lower-priority cone ever outranks a higher one.
//! Sorting cells by weight yields the visit order handed to a UAV.

use std::cmp::Ordering;

use serde::Serialize;

use crate::domain::{CellIndex, GridEnvironment, Heading, WorldPoint};
use crate::error::{Error, Result};

/// The five base weights for a horizon of `n` rings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SectorWeights {
    pub n: u64,
    /// Along the heading.
    pub w1: u64,
    /// Left of the heading.
    pub w2: u64,
    /// Right of the heading.
    pub w3: u64,
    /// Behind.
    pub w4: u64,
    /// Last known position.
    pub w5: u64,
}

impl SectorWeights {
    pub fn new(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidHorizon(n));
        }
        let n = n as u64;
        let overflow = || Error::WeightOverflow(n);
        let w4: u64 = 1;
        let n2 = n.checked_mul(n).ok_or_else(overflow)?;
        let n3 = n2.checked_mul(n).ok_or_else(overflow)?;
        let w1 = w4
            .checked_mul(n3)
            .and_then(|v| v.checked_add(n2))
            .and_then(|v| v.checked_add(n + 1))
            .ok_or_else(overflow)?;
        let w5 = w1
            .checked_mul(n)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(overflow)?;
        // w1 - 1 = n(n^2 + n + 1) and w1 - n - 1 = n^2(n + 1), so both divide exactly.
        let w2 = (w1 - 1) / n;
        let w3 = (w1 - n - 1) / n2;
        Ok(SectorWeights {
            n,
            w1,
            w2,
            w3,
            w4,
            w5,
        })
    }
}

pub fn compute_sector_weights(n: i64) -> Result<SectorWeights> {
    SectorWeights::new(n)
}

/// Region of the grid relative to a survivor report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Origin,
    Forward,
    Left,
    Right,
    Rear,
}

impl Sector {
    /// 0 is the highest priority.
    pub fn rank(self) -> u8 {
        match self {
            Sector::Origin => 0,
            Sector::Forward => 1,
            Sector::Left => 2,
            Sector::Right => 3,
            Sector::Rear => 4,
        }
    }
}

impl PartialOrd for Sector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greater means higher priority.
impl Ord for Sector {
    fn cmp(&self, other: &Self) -> Ordering {
        other.rank().cmp(&self.rank())
    }
}

/// An observer's sighting handed to a UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivorReport {
    pub last_known: WorldPoint,
    pub heading: Heading,
    pub report_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannerOptions {
    /// Rank the left cone above the right cone (otherwise the reverse).
    pub left_before_right: bool,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            left_before_right: true,
        }
    }
}

/// Largest Chebyshev distance from `origin` to the grid boundary, at least 1.
pub fn horizon(env: &GridEnvironment, origin: CellIndex) -> Result<u64> {
    env.check_cell(origin)?;
    let (cols, rows) = (env.cols(), env.rows());
    let n = origin
        .i
        .max(cols - 1 - origin.i)
        .max(origin.j)
        .max(rows - 1 - origin.j);
    Ok(n.max(1) as u64)
}

/// Places `cell` into one of the 90 degree cones around `heading` centered
/// at `origin`. Cone boundaries belong to the higher-priority neighbor.
///
/// Angles are compared with exact integer arithmetic: for displacement `v`
/// and heading step `h`, `|angle| <= 45` iff `h.v > 0` and
/// `2 (h.v)^2 >= |h|^2 |v|^2`.
pub fn classify_sector(cell: CellIndex, origin: CellIndex, heading: Heading) -> Sector {
    if cell == origin {
        return Sector::Origin;
    }
    let (vx, vy) = origin.offset_to(cell);
    let (hx, hy) = heading.grid_step();
    let dot = hx * vx + hy * vy;
    let cross = hx * vy - hy * vx;
    let hh = hx * hx + hy * hy;
    let vv = vx * vx + vy * vy;
    let lhs = 2 * dot * dot;
    let rhs = hh * vv;
    if dot > 0 && lhs >= rhs {
        Sector::Forward
    } else if dot < 0 && lhs > rhs {
        Sector::Rear
    } else if cross > 0 {
        Sector::Left
    } else {
        Sector::Right
    }
}

/// Per-cell weights for one survivor report.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    pub env: GridEnvironment,
    pub origin_cell: CellIndex,
    pub heading: Heading,
    pub sector_weights: SectorWeights,
    /// Row-major, one entry per cell.
    weights: Vec<u64>,
}

impl WeightMap {
    pub fn weight(&self, cell: CellIndex) -> Result<u64> {
        self.env.check_cell(cell)?;
        Ok(self.weights[self.env.flat_index(cell)])
    }

    pub fn sector(&self, cell: CellIndex) -> Sector {
        classify_sector(cell, self.origin_cell, self.heading)
    }

    /// Row-major weights.
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    pub fn min_weight(&self) -> u64 {
        self.weights.iter().copied().min().unwrap_or(0)
    }
}

pub fn build_weight_map(
    env: &GridEnvironment,
    report: &SurvivorReport,
    options: PlannerOptions,
) -> Result<WeightMap> {
    let origin = env.world_to_cell(report.last_known)?;
    let n = horizon(env, origin)?;
    let sw = SectorWeights::new(n as i64)?;
    let weights = env
        .cells()
        .map(|cell| {
            let d = (cell.chebyshev(origin) as u64).clamp(1, n);
            let ring = d - 1;
            let forward = || sw.w1 - ring * n * n;
            let upper_lateral = || sw.w2 - ring * n;
            let lower_lateral = || sw.w3 - ring;
            match classify_sector(cell, origin, report.heading) {
                Sector::Origin => sw.w5,
                Sector::Forward => forward(),
                Sector::Left if options.left_before_right => upper_lateral(),
                Sector::Left => lower_lateral(),
                Sector::Right if options.left_before_right => lower_lateral(),
                Sector::Right => upper_lateral(),
                Sector::Rear => sw.w4,
            }
        })
        .collect();
    Ok(WeightMap {
        env: *env,
        origin_cell: origin,
        heading: report.heading,
        sector_weights: sw,
        weights,
    })
}

/// Ordered visit list produced from a weight map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PriorityList {
    pub waypoints: Vec<CellIndex>,
}

impl PriorityList {
    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }
}

/// Orders displacements by clockwise angle from the heading, the heading
/// axis itself (and the zero vector) first.
fn clockwise_from_heading(heading: Heading, a: (i64, i64), b: (i64, i64)) -> Ordering {
    let (hx, hy) = heading.grid_step();
    // heading frame: x along the heading, y pointing clockwise of it
    let frame = |(vx, vy): (i64, i64)| (hx * vx + hy * vy, -(hx * vy - hy * vx));
    let half = |(x, y): (i64, i64)| if y > 0 || (y == 0 && x >= 0) { 0 } else { 1 };
    let (pa, pb) = (frame(a), frame(b));
    half(pa).cmp(&half(pb)).then_with(|| {
        let cross = pa.0 * pb.1 - pa.1 * pb.0;
        0.cmp(&cross)
    })
}

/// Sorts `cells` by descending weight, then Chebyshev distance from the
/// origin, then clockwise angle from the heading, then row-major index.
/// Duplicate cells are dropped.
pub fn prioritize_waypoints(map: &WeightMap, cells: &[CellIndex]) -> Result<PriorityList> {
    if cells.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    let mut keyed = cells
        .iter()
        .map(|&c| Ok((map.weight(c)?, c)))
        .collect::<Result<Vec<_>>>()?;
    let origin = map.origin_cell;
    keyed.sort_by(|&(wa, a), &(wb, b)| {
        wb.cmp(&wa)
            .then_with(|| a.chebyshev(origin).cmp(&b.chebyshev(origin)))
            .then_with(|| {
                clockwise_from_heading(map.heading, origin.offset_to(a), origin.offset_to(b))
            })
            .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)))
    });
    let mut waypoints: Vec<CellIndex> = keyed.into_iter().map(|(_, c)| c).collect();
    waypoints.dedup();
    Ok(PriorityList { waypoints })
}
