//! Terrain and flight layouts shared by the experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::simworld::{CameraModel, FlightPlan, Rock, TerrainModel, TerrainSpec};
use crate::Result;

/// Half-open diameter range with the number of rocks drawn from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiameterBin {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl DiameterBin {
    pub fn contains(&self, diameter: f64) -> bool {
        diameter >= self.min && diameter < self.max
    }

    pub fn label(&self) -> String {
        format!("{:.2}-{:.2}", self.min, self.max)
    }
}

/// A square grid of rock slots, filled from diameter bins in shuffled order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RockGridLayout {
    pub bins: Vec<DiameterBin>,
    /// Slots per side.
    pub grid: usize,
    /// Distance between slot centres, meters.
    pub spacing: f64,
    /// Maximum random offset of a rock from its slot centre along each axis.
    pub jitter: f64,
}

impl Default for RockGridLayout {
    fn default() -> Self {
        let bin = |min, max, count| DiameterBin { min, max, count };
        RockGridLayout {
            bins: vec![
                bin(0.28, 0.44, 25),
                bin(0.44, 0.60, 14),
                bin(0.60, 0.76, 4),
                bin(0.76, 0.92, 2),
            ],
            grid: 7,
            spacing: 1.3,
            jitter: 0.15,
        }
    }
}

impl RockGridLayout {
    pub fn rock_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        use crate::Error;
        if self.rock_count() > self.grid * self.grid {
            return Err(Error::config(format!(
                "{} rocks do not fit a {}x{} grid",
                self.rock_count(),
                self.grid,
                self.grid
            )));
        }
        if self.bins.iter().any(|b| !(b.min > 0.0 && b.max > b.min)) {
            return Err(Error::config("diameter bins need 0 < min < max"));
        }
        let widest = self.bins.iter().map(|b| b.max).fold(0.0, f64::max);
        if self.spacing - 2.0 * self.jitter <= widest {
            return Err(Error::config("grid spacing too tight for the largest rocks"));
        }
        Ok(())
    }

    /// Side length of the occupied area, meters.
    pub fn span(&self) -> f64 {
        (self.grid.max(1) - 1) as f64 * self.spacing
    }

    /// Rocks centred on `center`, reproducible from `seed`.
    pub fn place(&self, center: [f64; 2], seed: u64) -> Vec<Rock> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut diameters = Vec::with_capacity(self.rock_count());
        for b in &self.bins {
            for _ in 0..b.count {
                diameters.push(rng.random_range(b.min..b.max));
            }
        }
        let mut slots: Vec<usize> = (0..self.grid * self.grid).collect();
        slots.shuffle(&mut rng);
        let half = self.span() / 2.0;
        diameters
            .into_iter()
            .zip(slots)
            .map(|(d, s)| {
                let (i, j) = (s % self.grid, s / self.grid);
                let jx = rng.random_range(-self.jitter..=self.jitter);
                let jy = rng.random_range(-self.jitter..=self.jitter);
                Rock {
                    x: center[0] - half + i as f64 * self.spacing + jx,
                    y: center[1] - half + j as f64 * self.spacing + jy,
                    radius: d / 2.0,
                }
            })
            .collect()
    }
}

/// Straight flight along +x at `y`, keeping `altitude` above the mean ground
/// plane. Returns the plan and the x range it covers.
pub fn plane_following_pass(
    terrain: &TerrainModel,
    y: f64,
    x_start: f64,
    frames: usize,
    altitude: f64,
    speed: f64,
    frame_rate: f64,
) -> FlightPlan {
    let length = frames.saturating_sub(1) as f64 * speed / frame_rate;
    let x_end = x_start + length;
    let z0 = terrain.plane_height(x_start, y) + altitude;
    let z1 = terrain.plane_height(x_end, y) + altitude;
    FlightPlan::straight([x_start, y, z0], [x_end, y, z1], speed, frame_rate)
}

/// Terrain extent that keeps the whole nadir footprint of a pass on the
/// ground, plus `pad` meters.
pub fn extent_for_pass(camera: &CameraModel, altitude: f64, length: f64, width: f64, pad: f64) -> [f64; 2] {
    let [hx, hy] = camera.footprint_half_extent(altitude);
    [length + 2.0 * (hx + pad), width.max(2.0 * (hy + pad))]
}

/// Grid rock field of `layout` centred in a square terrain of side `side`.
pub fn rock_grid_terrain(
    layout: &RockGridLayout,
    side: f64,
    slope_deg: f64,
    fractal_amplitude: f64,
    seed: u64,
) -> Result<TerrainModel> {
    layout.validate()?;
    let spec = TerrainSpec {
        seed,
        extent: [side, side],
        slope_deg,
        fractal_amplitude,
        rock_coverage: 0.0,
        ..TerrainSpec::default()
    };
    let rocks = layout.place([side / 2.0, side / 2.0], seed ^ 0x9e37_79b9_7f4a_7c15);
    TerrainModel::with_rocks(&spec, rocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout_respects_bins_and_spacing() {
        let layout = RockGridLayout::default();
        layout.validate().unwrap();
        let rocks = layout.place([10.0, 10.0], 3);
        assert_eq!(rocks.len(), 45);
        for b in &layout.bins {
            let n = rocks.iter().filter(|r| b.contains(2.0 * r.radius)).count();
            assert_eq!(n, b.count, "bin {}", b.label());
        }
        for (i, a) in rocks.iter().enumerate() {
            for b in &rocks[i + 1..] {
                let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                assert!(d > a.radius + b.radius);
            }
        }
        assert_eq!(rocks, layout.place([10.0, 10.0], 3));
    }
}
