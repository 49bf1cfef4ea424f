//! Landing-site detection over a map snapshot.
//!
//! Detection runs coarse to fine. Cells near unmapped space or with too
//! little evidence are excluded first. A plane fitted on layer 1 rejects steep
//! coarse cells. Finer layers then reject cells whose neighbourhood deviates
//! from that plane by more than the roughness threshold, and the survivors
//! feed a distance transform from which landing candidates are ranked.

mod candidates;
mod detect;
mod edt;
mod plane;
mod snapshot;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use candidates::{rank_candidates, Candidate};
pub use detect::{confidence, detect, detect_exhaustive, distance_transform, Confidence};
pub use edt::squared_edt;
pub use plane::{fit_plane, roughness, PlaneFit, Roughness};
pub use snapshot::{LevelGrid, MapSnapshot};

/// Per-cell landing verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LandingClass {
    Safe,
    Hazard,
    /// Observed, but without enough evidence to decide.
    Unknown,
    /// Too close to unmapped space or the map edge.
    Border,
    NoData,
}

impl LandingClass {
    /// Grey level used in landing-map images.
    pub fn code(self) -> u8 {
        match self {
            LandingClass::Safe => 255,
            LandingClass::Hazard => 64,
            LandingClass::Unknown => 128,
            LandingClass::Border => 192,
            LandingClass::NoData => 0,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            255 => LandingClass::Safe,
            64 => LandingClass::Hazard,
            128 => LandingClass::Unknown,
            192 => LandingClass::Border,
            0 => LandingClass::NoData,
            _ => return None,
        })
    }
}

/// Landing requirements of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LandingConfig {
    /// Radius of the vehicle footprint that must be hazard free.
    pub keepout_radius: f64,
    pub safety_margin: f64,
    /// Radius of the inner roughness check.
    pub rock_area_radius: f64,
    pub max_slope_deg: f64,
    pub max_roughness_m: f64,
    pub min_observations: u32,
    /// Largest acceptable height variance; defaults to `(2 * finest cell)^2`.
    pub max_variance: Option<f64>,
    pub max_candidates: usize,
}

impl Default for LandingConfig {
    fn default() -> Self {
        LandingConfig {
            keepout_radius: 0.5,
            safety_margin: 0.1,
            rock_area_radius: 0.5,
            max_slope_deg: 10.0,
            max_roughness_m: 0.1,
            min_observations: 3,
            max_variance: None,
            max_candidates: 32,
        }
    }
}

impl LandingConfig {
    pub fn safe_area_radius(&self) -> f64 {
        self.keepout_radius + self.safety_margin
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.keepout_radius > 0.0 && self.keepout_radius.is_finite()) {
            return Err(Error::config("keepout_radius must be positive"));
        }
        if !(self.safety_margin >= 0.0 && self.safety_margin.is_finite()) {
            return Err(Error::config("safety_margin must be non-negative"));
        }
        if !(self.rock_area_radius > 0.0 && self.rock_area_radius <= self.safe_area_radius()) {
            return Err(Error::config("rock_area_radius must lie in (0, keepout_radius + safety_margin]"));
        }
        if !(self.max_slope_deg > 0.0 && self.max_slope_deg < 90.0) {
            return Err(Error::config("max_slope_deg must lie in (0, 90)"));
        }
        if !(self.max_roughness_m > 0.0 && self.max_roughness_m.is_finite()) {
            return Err(Error::config("max_roughness_m must be positive"));
        }
        if let Some(v) = self.max_variance {
            if !(v > 0.0) {
                return Err(Error::config("max_variance must be positive"));
            }
        }
        Ok(())
    }
}

/// Result of [`detect`] at the finest map resolution (row 0 at minimum y).
#[derive(Debug, Clone, PartialEq)]
pub struct LandingMap {
    pub cells: usize,
    pub resolution: f64,
    pub origin: [f64; 2],
    pub classes: Vec<LandingClass>,
    /// Meters from each cell centre to the nearest non-safe cell centre.
    pub distance: Vec<f64>,
    pub candidates: Vec<Candidate>,
    pub safe_area_radius: f64,
}

impl LandingMap {
    pub fn class(&self, col: usize, row: usize) -> LandingClass {
        self.classes[row * self.cells + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> [f64; 2] {
        [
            self.origin[0] + (col as f64 + 0.5) * self.resolution,
            self.origin[1] + (row as f64 + 0.5) * self.resolution,
        ]
    }

    /// Number of cells per class in the order Safe, Hazard, Unknown, Border, NoData.
    pub fn class_counts(&self) -> [usize; 5] {
        let mut c = [0; 5];
        for k in &self.classes {
            c[*k as usize] += 1;
        }
        c
    }
}
