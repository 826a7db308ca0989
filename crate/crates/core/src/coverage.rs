//! Boustrophedon (lawnmower) coverage over an arbitrary cell set.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::domain::{CellIndex, GridEnvironment, SensorFootprint};
use crate::error::{Error, Result};

/// Direction of the sweep tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Tracks run east-west, stepping between rows.
    #[default]
    Rows,
    /// Tracks run north-south, stepping between columns.
    Cols,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveragePlan {
    pub waypoints: Vec<CellIndex>,
    pub track_spacing_cells: usize,
}

/// Rows between adjacent tracks: the number of whole cells the footprint spans.
pub fn track_spacing(footprint: &SensorFootprint, env: &GridEnvironment) -> usize {
    let cells = footprint.side_m() / env.cell_size_m;
    ((cells + 1e-9).floor() as usize).max(1)
}

/// Serpentine plan over `cells`, tracks spaced by the footprint.
pub fn lawnmower_path(
    cells: &[CellIndex],
    start: CellIndex,
    footprint: &SensorFootprint,
    env: &GridEnvironment,
    axis: SweepAxis,
) -> Result<CoveragePlan> {
    let spacing = track_spacing(footprint, env);
    let reach = footprint.half_side_m() / env.cell_size_m;
    lawnmower_with_spacing(cells, start, spacing, reach, env, axis)
}

/// Serpentine plan with an explicit track spacing. `reach_cells` is how far
/// (in cells) a track sees to either side; a set edge row beyond reach of
/// the last lattice track gets a track of its own.
pub fn lawnmower_with_spacing(
    cells: &[CellIndex],
    start: CellIndex,
    spacing: usize,
    reach_cells: f64,
    env: &GridEnvironment,
    axis: SweepAxis,
) -> Result<CoveragePlan> {
    if cells.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    for &c in cells {
        env.check_cell(c)?;
    }
    if !cells.contains(&start) {
        return Err(Error::StartNotInSet {
            i: start.i,
            j: start.j,
        });
    }
    let spacing = spacing.max(1);

    // (track, position along track) in the chosen axis
    let split = |c: CellIndex| match axis {
        SweepAxis::Rows => (c.j, c.i),
        SweepAxis::Cols => (c.i, c.j),
    };
    let join = |track: usize, pos: usize| match axis {
        SweepAxis::Rows => CellIndex::new(pos, track),
        SweepAxis::Cols => CellIndex::new(track, pos),
    };
    let track_count = match axis {
        SweepAxis::Rows => env.rows(),
        SweepAxis::Cols => env.cols(),
    };

    let mut tracks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &c in cells {
        let (t, p) = split(c);
        tracks.entry(t).or_default().push(p);
    }
    for positions in tracks.values_mut() {
        positions.sort_unstable();
        positions.dedup();
    }

    let (start_track, start_pos) = split(start);
    let lo = *tracks.keys().next().expect("non-empty");
    let hi = *tracks.keys().next_back().expect("non-empty");
    let toward_high = start_track <= track_count - 1 - start_track;

    let lattice = |dir_up: bool| -> Vec<usize> {
        let mut out = Vec::new();
        let mut t = start_track as i64;
        let step = if dir_up {
            spacing as i64
        } else {
            -(spacing as i64)
        };
        let (lo, hi) = (lo as i64, hi as i64);
        loop {
            t += step;
            if t < lo || t > hi {
                break;
            }
            out.push(t as usize);
        }
        let last = out.last().copied().unwrap_or(start_track);
        let edge = if dir_up { hi } else { lo } as usize;
        if last != edge && (edge.abs_diff(last) as f64) > reach_cells + 1e-9 {
            out.push(edge);
        }
        out
    };

    let mut order = vec![start_track];
    order.extend(lattice(toward_high));
    order.extend(lattice(!toward_high));

    // first track: sweep from the nearer end of the run holding the start
    let first = &tracks[&start_track];
    let k = first
        .binary_search(&start_pos)
        .expect("start is in the set");
    let mut a = k;
    while a > 0 && first[a - 1] + 1 == first[a] {
        a -= 1;
    }
    let mut b = k;
    while b + 1 < first.len() && first[b] + 1 == first[b + 1] {
        b += 1;
    }
    let mut ascending = start_pos - first[a] <= first[b] - start_pos;

    let mut waypoints = Vec::new();
    for t in order {
        let Some(positions) = tracks.get(&t) else {
            continue;
        };
        if ascending {
            waypoints.extend(positions.iter().map(|&p| join(t, p)));
        } else {
            waypoints.extend(positions.iter().rev().map(|&p| join(t, p)));
        }
        ascending = !ascending;
    }

    Ok(CoveragePlan {
        waypoints,
        track_spacing_cells: spacing,
    })
}

/// The plan's order restricted to cells not yet visited.
pub fn remaining_coverage(plan: &CoveragePlan, visited: &HashSet<CellIndex>) -> CoveragePlan {
    CoveragePlan {
        waypoints: plan
            .waypoints
            .iter()
            .copied()
            .filter(|c| !visited.contains(c))
            .collect(),
        track_spacing_cells: plan.track_spacing_cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(cols: usize, rows: usize) -> GridEnvironment {
        GridEnvironment::new(cols as f64, rows as f64, 1.0).unwrap()
    }

    fn unit_plan(
        cells: &[CellIndex],
        start: CellIndex,
        e: &GridEnvironment,
    ) -> Vec<(usize, usize)> {
        lawnmower_with_spacing(cells, start, 1, 0.5, e, SweepAxis::Rows)
            .unwrap()
            .waypoints
            .iter()
            .map(|c| (c.i, c.j))
            .collect()
    }

    fn cells(v: &[(usize, usize)]) -> Vec<CellIndex> {
        v.iter().map(|&(i, j)| CellIndex::new(i, j)).collect()
    }

    #[test]
    fn canonical_serpentine() {
        let e = env(3, 3);
        let all: Vec<_> = e.cells().collect();
        assert_eq!(
            unit_plan(&all, CellIndex::new(0, 0), &e),
            vec![
                (0, 0),
                (1, 0),
                (2, 0),
                (2, 1),
                (1, 1),
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 2)
            ]
        );
    }

    #[test]
    fn single_cell() {
        let e = env(3, 3);
        let c = cells(&[(1, 2)]);
        assert_eq!(unit_plan(&c, CellIndex::new(1, 2), &e), vec![(1, 2)]);
    }

    #[test]
    fn l_shape() {
        let e = env(3, 3);
        let c = cells(&[(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)]);
        assert_eq!(
            unit_plan(&c, CellIndex::new(0, 0), &e),
            vec![(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)]
        );
    }

    #[test]
    fn starts_toward_nearer_run_end_and_far_boundary() {
        let e = env(5, 5);
        let all: Vec<_> = e.cells().collect();
        // start near the east end of the top row: sweep westward, then step south
        let plan = unit_plan(&all, CellIndex::new(3, 4), &e);
        assert_eq!(&plan[..5], &[(4, 4), (3, 4), (2, 4), (1, 4), (0, 4)]);
        assert_eq!(plan[5], (0, 3));
        assert_eq!(plan.len(), 25);
    }

    #[test]
    fn interior_start_covers_both_sides() {
        let e = env(4, 6);
        let all: Vec<_> = e.cells().collect();
        let plan = unit_plan(&all, CellIndex::new(0, 2), &e);
        let rows: Vec<usize> = plan.iter().map(|&(_, j)| j).step_by(4).collect();
        // row 2 is nearer the south edge, so head north first, then the rest
        assert_eq!(rows, vec![2, 3, 4, 5, 1, 0]);
        let unique: HashSet<_> = plan.iter().collect();
        assert_eq!(unique.len(), 24);
    }

    #[test]
    fn gapped_rows_visit_runs_in_sweep_order() {
        let e = env(6, 2);
        let c = cells(&[(0, 0), (1, 0), (4, 0), (5, 0), (0, 1), (5, 1)]);
        assert_eq!(
            unit_plan(&c, CellIndex::new(0, 0), &e),
            vec![(0, 0), (1, 0), (4, 0), (5, 0), (5, 1), (0, 1)]
        );
    }

    #[test]
    fn footprint_spacing_samples_rows() {
        let e = env(20, 20);
        let fp = SensorFootprint::new(2.0, 45.0).unwrap();
        assert_eq!(track_spacing(&fp, &e), 4);
        let all: Vec<_> = e.cells().collect();
        let plan = lawnmower_path(&all, CellIndex::new(0, 0), &fp, &e, SweepAxis::Rows).unwrap();
        assert_eq!(plan.track_spacing_cells, 4);
        let mut rows: Vec<usize> = plan.waypoints.iter().map(|c| c.j).collect();
        rows.dedup();
        // row 19 sits 3 cells past row 16, beyond the 2-cell reach
        assert_eq!(rows, vec![0, 4, 8, 12, 16, 19]);
        assert_eq!(plan.waypoints.len(), 6 * 20);
    }

    #[test]
    fn column_sweep_is_transposed_row_sweep() {
        let e = env(3, 3);
        let all: Vec<_> = e.cells().collect();
        let plan = lawnmower_with_spacing(&all, CellIndex::new(0, 0), 1, 0.5, &e, SweepAxis::Cols)
            .unwrap();
        let got: Vec<_> = plan.waypoints.iter().map(|c| (c.i, c.j)).collect();
        assert_eq!(
            got,
            vec![
                (0, 0),
                (0, 1),
                (0, 2),
                (1, 2),
                (1, 1),
                (1, 0),
                (2, 0),
                (2, 1),
                (2, 2)
            ]
        );
    }

    #[test]
    fn errors() {
        let e = env(3, 3);
        assert_eq!(
            lawnmower_with_spacing(&[], CellIndex::new(0, 0), 1, 0.5, &e, SweepAxis::Rows),
            Err(Error::EmptyCellSet)
        );
        assert_eq!(
            lawnmower_with_spacing(
                &cells(&[(1, 1)]),
                CellIndex::new(0, 0),
                1,
                0.5,
                &e,
                SweepAxis::Rows
            ),
            Err(Error::StartNotInSet { i: 0, j: 0 })
        );
    }

    #[test]
    fn remaining_coverage_filters_in_order() {
        let e = env(3, 3);
        let all: Vec<_> = e.cells().collect();
        let plan = lawnmower_with_spacing(&all, CellIndex::new(0, 0), 1, 0.5, &e, SweepAxis::Rows)
            .unwrap();
        assert_eq!(remaining_coverage(&plan, &HashSet::new()), plan);
        let everything: HashSet<_> = all.iter().copied().collect();
        assert!(remaining_coverage(&plan, &everything).waypoints.is_empty());
        let prefix: HashSet<_> = plan.waypoints[..4].iter().copied().collect();
        assert_eq!(
            remaining_coverage(&plan, &prefix).waypoints,
            plan.waypoints[4..].to_vec()
        );
    }
}
