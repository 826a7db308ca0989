//! Geometric and world-model types shared by the planner, partitioner and
//! simulator.
//!
//! World coordinates are meters with the origin at the south-west corner,
//! x growing east and y growing north. Cells are indexed `(i, j)` with `i`
//! the column (east-positive) and `j` the row (north-positive).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance used when checking that the world size is a whole
/// number of cells.
const MULTIPLE_TOLERANCE: f64 = 1e-9;

/// Rectangular search area discretized into square cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEnvironment {
    pub width_m: f64,
    pub height_m: f64,
    pub cell_size_m: f64,
}

impl GridEnvironment {
    pub fn new(width_m: f64, height_m: f64, cell_size_m: f64) -> Result<Self> {
        let env = GridEnvironment {
            width_m,
            height_m,
            cell_size_m,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("width_m", self.width_m),
            ("height_m", self.height_m),
            ("cell_size_m", self.cell_size_m),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidEnvironment(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("width_m", self.width_m), ("height_m", self.height_m)] {
            let cells = v / self.cell_size_m;
            if (cells - cells.round()).abs() > MULTIPLE_TOLERANCE * cells.max(1.0)
                || cells.round() < 1.0
            {
                return Err(Error::InvalidEnvironment(format!(
                    "{name} = {v} is not a positive integer multiple of cell_size_m = {}",
                    self.cell_size_m
                )));
            }
        }
        Ok(())
    }

    pub fn cols(&self) -> usize {
        (self.width_m / self.cell_size_m).round() as usize
    }

    pub fn rows(&self) -> usize {
        (self.height_m / self.cell_size_m).round() as usize
    }

    pub fn cell_count(&self) -> usize {
        self.cols() * self.rows()
    }

    pub fn contains_point(&self, p: WorldPoint) -> bool {
        p.x.is_finite()
            && p.y.is_finite()
            && (0.0..=self.width_m).contains(&p.x)
            && (0.0..=self.height_m).contains(&p.y)
    }

    pub fn contains_cell(&self, c: CellIndex) -> bool {
        c.i < self.cols() && c.j < self.rows()
    }

    pub fn check_cell(&self, c: CellIndex) -> Result<()> {
        if self.contains_cell(c) {
            Ok(())
        } else {
            Err(Error::CellOutOfBounds {
                i: c.i,
                j: c.j,
                cols: self.cols(),
                rows: self.rows(),
            })
        }
    }

    /// Cell containing `p`. Points on the east or north edge belong to the
    /// last column or row.
    pub fn world_to_cell(&self, p: WorldPoint) -> Result<CellIndex> {
        if !self.contains_point(p) {
            return Err(Error::PointOutOfBounds {
                x: p.x,
                y: p.y,
                width_m: self.width_m,
                height_m: self.height_m,
            });
        }
        let i = ((p.x / self.cell_size_m).floor() as usize).min(self.cols() - 1);
        let j = ((p.y / self.cell_size_m).floor() as usize).min(self.rows() - 1);
        Ok(CellIndex { i, j })
    }

    pub fn cell_center(&self, c: CellIndex) -> Result<WorldPoint> {
        self.check_cell(c)?;
        Ok(WorldPoint {
            x: (c.i as f64 + 0.5) * self.cell_size_m,
            y: (c.j as f64 + 0.5) * self.cell_size_m,
        })
    }

    /// Clamps a point onto the closed environment rectangle.
    pub fn clamp(&self, p: WorldPoint) -> WorldPoint {
        WorldPoint {
            x: p.x.clamp(0.0, self.width_m),
            y: p.y.clamp(0.0, self.height_m),
        }
    }

    /// Row-major flat index, `j * cols + i`.
    pub fn flat_index(&self, c: CellIndex) -> usize {
        c.j * self.cols() + c.i
    }

    pub fn cell_at(&self, flat: usize) -> CellIndex {
        CellIndex {
            i: flat % self.cols(),
            j: flat / self.cols(),
        }
    }

    /// All cells in row-major order (row 0 first, west to east).
    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        let cols = self.cols();
        (0..self.cell_count()).map(move |k| CellIndex {
            i: k % cols,
            j: k / cols,
        })
    }
}

/// One of the eight compass directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Heading {
    E,
    NE,
    N,
    NW,
    W,
    SW,
    S,
    SE,
}

impl Heading {
    /// Counter-clockwise order starting at east.
    pub const ALL: [Heading; 8] = [
        Heading::E,
        Heading::NE,
        Heading::N,
        Heading::NW,
        Heading::W,
        Heading::SW,
        Heading::S,
        Heading::SE,
    ];

    pub fn octant(self) -> usize {
        self as usize
    }

    pub fn from_octant(k: usize) -> Heading {
        Self::ALL[k % 8]
    }

    pub fn angle_deg(self) -> f64 {
        45.0 * self.octant() as f64
    }

    /// Integer direction `(dx, dy)` with components in {-1, 0, 1}.
    pub fn grid_step(self) -> (i64, i64) {
        match self {
            Heading::E => (1, 0),
            Heading::NE => (1, 1),
            Heading::N => (0, 1),
            Heading::NW => (-1, 1),
            Heading::W => (-1, 0),
            Heading::SW => (-1, -1),
            Heading::S => (0, -1),
            Heading::SE => (1, -1),
        }
    }

    pub fn unit_vector(self) -> (f64, f64) {
        let (dx, dy) = self.grid_step();
        if dx != 0 && dy != 0 {
            (
                dx as f64 * std::f64::consts::FRAC_1_SQRT_2,
                dy as f64 * std::f64::consts::FRAC_1_SQRT_2,
            )
        } else {
            (dx as f64, dy as f64)
        }
    }

    /// Snaps a continuous heading (degrees, counter-clockwise from east) to
    /// the nearest compass direction; exact midpoints go counter-clockwise.
    pub fn from_degrees(deg: f64) -> Result<Heading> {
        if !deg.is_finite() {
            return Err(Error::InvalidHeading(format!("{deg} is not finite")));
        }
        let k = ((deg.rem_euclid(360.0) + 22.5) / 45.0).floor() as usize;
        Ok(Self::from_octant(k))
    }

    pub fn rotate_ccw_90(self) -> Heading {
        Self::from_octant(self.octant() + 2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Heading::E => "E",
            Heading::NE => "NE",
            Heading::N => "N",
            Heading::NW => "NW",
            Heading::W => "W",
            Heading::SW => "SW",
            Heading::S => "S",
            Heading::SE => "SE",
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Heading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|h| h.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidHeading(format!("unknown compass direction {s:?}")))
    }
}

impl Serialize for Heading {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Heading {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Degrees(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Degrees(d) => Heading::from_degrees(d).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        WorldPoint { x, y }
    }

    pub fn distance(self, other: WorldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: WorldPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl Serialize for WorldPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WorldPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(deserializer)?;
        Ok(WorldPoint { x, y })
    }
}

/// Grid cell `(column, row)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub i: usize,
    pub j: usize,
}

impl CellIndex {
    pub const fn new(i: usize, j: usize) -> Self {
        CellIndex { i, j }
    }

    /// Integer displacement from `self` to `other`.
    pub fn offset_to(self, other: CellIndex) -> (i64, i64) {
        (
            other.i as i64 - self.i as i64,
            other.j as i64 - self.j as i64,
        )
    }

    pub fn chebyshev(self, other: CellIndex) -> usize {
        self.i.abs_diff(other.i).max(self.j.abs_diff(other.j))
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Downward camera footprint of a UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorFootprint {
    pub altitude_m: f64,
    pub fov_half_angle_deg: f64,
}

impl SensorFootprint {
    pub fn new(altitude_m: f64, fov_half_angle_deg: f64) -> Result<Self> {
        if !altitude_m.is_finite() || altitude_m <= 0.0 {
            return Err(Error::InvalidFootprint(format!(
                "altitude must be positive, got {altitude_m}"
            )));
        }
        if !(fov_half_angle_deg > 0.0 && fov_half_angle_deg < 90.0) {
            return Err(Error::InvalidFootprint(format!(
                "half-angle must lie in (0, 90) degrees, got {fov_half_angle_deg}"
            )));
        }
        Ok(SensorFootprint {
            altitude_m,
            fov_half_angle_deg,
        })
    }

    /// Side of the square ground footprint, `2 * altitude * tan(half_angle)`.
    pub fn side_m(&self) -> f64 {
        let t = self.fov_half_angle_deg.to_radians().tan();
        // tan(45 deg) evaluates to 0.9999999999999999
        let t = if (t - t.round()).abs() < 1e-12 {
            t.round()
        } else {
            t
        };
        2.0 * self.altitude_m * t
    }

    pub fn half_side_m(&self) -> f64 {
        self.side_m() / 2.0
    }

    /// Closed-square containment test around a ground position.
    pub fn covers(&self, center: WorldPoint, p: WorldPoint) -> bool {
        let h = self.half_side_m();
        (p.x - center.x).abs() <= h && (p.y - center.y).abs() <= h
    }
}
