//! Discrete Voronoi partition of the grid among UAVs.
//!
//! Each cell goes to the seed (UAV start position) nearest its center in
//! Euclidean distance; exact ties go to the lowest seed index.

use crate::domain::{CellIndex, GridEnvironment, WorldPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionMap {
    pub env: GridEnvironment,
    pub seeds: Vec<WorldPoint>,
    /// Row-major owner index per cell.
    owner: Vec<usize>,
}

impl PartitionMap {
    pub fn owner(&self, cell: CellIndex) -> Result<usize> {
        self.env.check_cell(cell)?;
        Ok(self.owner[self.env.flat_index(cell)])
    }

    /// Owner of the cell containing `p`.
    pub fn owner_of_point(&self, p: WorldPoint) -> Result<usize> {
        let cell = self.env.world_to_cell(p)?;
        Ok(self.owner[self.env.flat_index(cell)])
    }

    /// Row-major owners.
    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn region_count(&self) -> usize {
        self.seeds.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.seeds.len()];
        for &k in &self.owner {
            sizes[k] += 1;
        }
        sizes
    }

    /// Cells owned by `uav`, in row-major order.
    pub fn partition_cells(&self, uav: usize) -> Result<Vec<CellIndex>> {
        if uav >= self.seeds.len() {
            return Err(Error::BadUavIndex {
                index: uav,
                count: self.seeds.len(),
            });
        }
        Ok(self
            .owner
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k == uav)
            .map(|(flat, _)| self.env.cell_at(flat))
            .collect())
    }

    pub fn contains(&self, uav: usize, cell: CellIndex) -> bool {
        self.env.contains_cell(cell) && self.owner[self.env.flat_index(cell)] == uav
    }
}

pub fn voronoi_partition(env: &GridEnvironment, seeds: &[WorldPoint]) -> Result<PartitionMap> {
    if seeds.is_empty() {
        return Err(Error::NoSeeds);
    }
    let mut seed_cells = Vec::with_capacity(seeds.len());
    for (index, &s) in seeds.iter().enumerate() {
        let cell = env.world_to_cell(s).map_err(|_| Error::SeedOutOfBounds {
            index,
            x: s.x,
            y: s.y,
        })?;
        if let Some(other) = seed_cells.iter().position(|&c| c == cell) {
            return Err(Error::CollidingSeeds { index, other });
        }
        seed_cells.push(cell);
    }

    let owner = env
        .cells()
        .map(|cell| {
            let center = env
                .cell_center(cell)
                .expect("cells() yields in-bounds cells");
            let mut best = 0;
            let mut best_d = center.distance_sq(seeds[0]);
            for (k, &s) in seeds.iter().enumerate().skip(1) {
                let d = center.distance_sq(s);
                if d < best_d {
                    best = k;
                    best_d = d;
                }
            }
            best
        })
        .collect();

    Ok(PartitionMap {
        env: *env,
        seeds: seeds.to_vec(),
        owner,
    })
}

pub fn partition_cells(map: &PartitionMap, uav: usize) -> Result<Vec<CellIndex>> {
    map.partition_cells(uav)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env20() -> GridEnvironment {
        GridEnvironment::new(20.0, 20.0, 1.0).unwrap()
    }

    fn pts(v: &[(f64, f64)]) -> Vec<WorldPoint> {
        v.iter().map(|&(x, y)| WorldPoint::new(x, y)).collect()
    }

    #[test]
    fn single_seed_owns_everything() {
        let env = env20();
        let map = voronoi_partition(&env, &pts(&[(13.2, 4.0)])).unwrap();
        assert!(map.owners().iter().all(|&k| k == 0));
        assert_eq!(map.partition_cells(0).unwrap().len(), 400);
    }

    #[test]
    fn diagonal_pair_ties_to_lowest_index() {
        let env = env20();
        let map = voronoi_partition(&env, &pts(&[(0.0, 0.0), (19.0, 19.0)])).unwrap();
        assert_eq!(map.owner(CellIndex::new(0, 0)).unwrap(), 0);
        assert_eq!(map.owner(CellIndex::new(19, 19)).unwrap(), 1);
        for i in 0..=18 {
            // i + j = 18 is exactly equidistant from both seeds
            assert_eq!(map.owner(CellIndex::new(i, 18 - i)).unwrap(), 0);
        }
        // brute-force count of cells strictly closer to seed 0, and ties
        let (mut closer, mut ties) = (0, 0);
        for c in env.cells() {
            let p = env.cell_center(c).unwrap();
            let (d0, d1) = (p.distance_sq(map.seeds[0]), p.distance_sq(map.seeds[1]));
            if d0 < d1 {
                closer += 1;
            } else if d0 == d1 {
                ties += 1;
            }
        }
        assert_eq!((closer, ties), (171, 19));
        assert_eq!(map.sizes(), vec![closer + ties, 400 - closer - ties]);
    }

    #[test]
    fn symmetric_pair_splits_evenly_apart_from_tie_line() {
        let env = env20();
        let map = voronoi_partition(&env, &pts(&[(0.5, 0.5), (19.5, 19.5)])).unwrap();
        // 20 cells on i + j = 19 tie; 190 on each side
        assert_eq!(map.sizes(), vec![190 + 20, 190]);
    }

    #[test]
    fn five_seed_layout() {
        let env = env20();
        let seeds = pts(&[
            (0.0, 0.0),
            (0.0, 19.0),
            (19.0, 0.0),
            (19.0, 19.0),
            (9.0, 9.0),
        ]);
        let map = voronoi_partition(&env, &seeds).unwrap();
        assert_eq!(map.owner(CellIndex::new(0, 0)).unwrap(), 0);
        assert_eq!(map.owner(CellIndex::new(0, 19)).unwrap(), 1);
        assert_eq!(map.owner(CellIndex::new(19, 0)).unwrap(), 2);
        assert_eq!(map.owner(CellIndex::new(19, 19)).unwrap(), 3);
        assert_eq!(map.owner(CellIndex::new(9, 9)).unwrap(), 4);
        // the central region reaches the middle of each edge
        assert_eq!(map.owner(CellIndex::new(9, 0)).unwrap(), 4);
        assert_eq!(map.owner(CellIndex::new(0, 9)).unwrap(), 4);
        let sizes = map.sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 400);
        assert!(sizes.iter().all(|&s| s > 0));
    }

    #[test]
    fn rejects_bad_seeds() {
        let env = env20();
        assert_eq!(voronoi_partition(&env, &[]), Err(Error::NoSeeds));
        assert!(matches!(
            voronoi_partition(&env, &pts(&[(1.0, 1.0), (25.0, 1.0)])),
            Err(Error::SeedOutOfBounds { index: 1, .. })
        ));
        assert_eq!(
            voronoi_partition(&env, &pts(&[(1.0, 1.0), (5.0, 5.0), (1.2, 1.7)])),
            Err(Error::CollidingSeeds { index: 2, other: 0 })
        );
    }

    #[test]
    fn partition_cells_bad_index() {
        let env = env20();
        let map = voronoi_partition(&env, &pts(&[(1.0, 1.0)])).unwrap();
        assert_eq!(
            partition_cells(&map, 1),
            Err(Error::BadUavIndex { index: 1, count: 1 })
        );
    }
}
