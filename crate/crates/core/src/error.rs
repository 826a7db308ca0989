use thiserror::Error;

/// Errors raised by planning, partitioning and simulation operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("point ({x}, {y}) lies outside the {width_m} m x {height_m} m environment")]
    PointOutOfBounds {
        x: f64,
        y: f64,
        width_m: f64,
        height_m: f64,
    },

    #[error("cell ({i}, {j}) lies outside the {cols} x {rows} grid")]
    CellOutOfBounds {
        i: usize,
        j: usize,
        cols: usize,
        rows: usize,
    },

    #[error("horizon must be a positive integer, got {0}")]
    InvalidHorizon(i64),

    #[error("sector weights overflow for horizon {0}")]
    WeightOverflow(u64),

    #[error("cell set is empty")]
    EmptyCellSet,

    #[error("no seeds given for partitioning")]
    NoSeeds,

    #[error("seed {index} at ({x}, {y}) is outside the environment")]
    SeedOutOfBounds { index: usize, x: f64, y: f64 },

    #[error("seed {index} occupies the same cell as seed {other}")]
    CollidingSeeds { index: usize, other: usize },

    #[error("uav index {index} out of range for {count} partitions")]
    BadUavIndex { index: usize, count: usize },

    #[error("start cell ({i}, {j}) is not in the cell set")]
    StartNotInSet { i: usize, j: usize },

    #[error("invalid sensor footprint: {0}")]
    InvalidFootprint(String),

    #[error("invalid heading: {0}")]
    InvalidHeading(String),

    #[error("invalid scenario: {key}: {message}")]
    InvalidConfig { key: String, message: String },

    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot pair batches: {0}")]
    Pairing(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
