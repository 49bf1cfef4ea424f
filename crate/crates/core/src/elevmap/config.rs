use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Geometry of a pyramid map. Layer 1 is the coarsest, layer `depth` the finest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    pub depth: usize,
    /// Cell edge of the finest layer, meters.
    pub finest_resolution: f64,
    /// Cells per side on the finest layer; must be divisible by `2^(depth-1)`.
    pub extent_cells: usize,
    /// Three-sigma disparity error used to weight measurements, pixels.
    pub disparity_error_px: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            depth: 3,
            finest_resolution: 0.08,
            extent_cells: 200,
            disparity_error_px: 0.25,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.depth) {
            return Err(Error::config("depth must lie in 1..=16"));
        }
        if !(self.finest_resolution > 0.0 && self.finest_resolution.is_finite()) {
            return Err(Error::config("finest_resolution must be positive"));
        }
        let s = self.coarse_factor();
        if self.extent_cells == 0 || self.extent_cells % s != 0 {
            return Err(Error::config(format!(
                "extent_cells {} must be a positive multiple of {s}",
                self.extent_cells
            )));
        }
        if !(self.disparity_error_px > 0.0 && self.disparity_error_px.is_finite()) {
            return Err(Error::config("disparity_error_px must be positive"));
        }
        Ok(())
    }

    /// Finest cells per coarsest cell along one axis, `2^(depth-1)`.
    pub fn coarse_factor(&self) -> usize {
        1 << (self.depth - 1)
    }

    /// Cell edge at `level` (1-based), meters.
    pub fn resolution(&self, level: usize) -> f64 {
        self.finest_resolution * (1u64 << (self.depth - level)) as f64
    }

    /// Cells per side at `level`.
    pub fn cells(&self, level: usize) -> usize {
        self.extent_cells >> (self.depth - level)
    }

    pub fn extent_m(&self) -> f64 {
        self.extent_cells as f64 * self.finest_resolution
    }

    /// Cells over all layers.
    pub fn total_cells(&self) -> usize {
        (1..=self.depth).map(|l| self.cells(l).pow(2)).sum()
    }
}

/// Snapshot of one cell. Unobserved cells are never returned as a `CellState`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    /// Absolute height on layer 1, residual on deeper layers.
    pub value: f64,
    pub variance: f64,
    pub observation_count: u32,
    pub last_update: f64,
}
