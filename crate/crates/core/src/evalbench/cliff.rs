//! Flight over a cliff: per-class map error while the level of detail drops.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::gates::Gate;
use super::metrics::ClassRmse;
use super::report::{frames_csv, FrameRecord, Summary};
use super::runner::Flight;
use super::scenes::plane_following_pass;
use crate::elevmap::{MapConfig, PyramidMap};
use crate::simworld::{derive_seed, generate_terrain, CameraModel, Cliff, RenderOptions, TerrainSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliffExperiment {
    pub seed: u64,
    pub frames: usize,
    pub speed: f64,
    pub frame_rate: f64,
    /// Height above the upper terrain level.
    pub altitude: f64,
    pub drop: f64,
    pub slope_deg: f64,
    pub fractal_amplitude: f64,
    pub rock_diameter: f64,
    pub rock_coverage: f64,
    /// Time at which the cliff edge enters the leading edge of the footprint.
    pub cliff_appears_at: f64,
    /// Frames before this time are excluded from the steady-state averages.
    pub settle_time: f64,
    pub camera: CameraModel,
    pub map: MapConfig,
}

impl Default for CliffExperiment {
    fn default() -> Self {
        CliffExperiment {
            seed: 5,
            frames: 81,
            speed: 1.0,
            frame_rate: 2.0,
            altitude: 5.0,
            drop: 5.0,
            slope_deg: 5.0,
            fractal_amplitude: 0.05,
            rock_diameter: 0.3,
            rock_coverage: 0.1,
            cliff_appears_at: 12.0,
            settle_time: 3.0,
            camera: CameraModel {
                image_width: 320,
                image_height: 240,
                ..CameraModel::default()
            },
            map: MapConfig::default(),
        }
    }
}

/// Frame log of the cliff flight with the times that split it into phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliffReport {
    pub frames: Vec<FrameRecord>,
    pub edge_x: f64,
    pub cliff_appears_at: f64,
    /// Time at which the camera passes over the edge.
    pub crossing_at: f64,
    /// Time after which the camera footprint no longer covers upper ground.
    pub upper_ground_gone_at: f64,
    pub settle_time: f64,
}

impl CliffExperiment {
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.map.validate()?;
        if self.frames < 2 || !(self.speed > 0.0 && self.frame_rate > 0.0 && self.altitude > 0.0) {
            return Err(Error::config("cliff flight needs frames >= 2 and positive speed, rate and altitude"));
        }
        if !(self.drop > 0.0) {
            return Err(Error::config("cliff drop must be positive"));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<CliffReport> {
        self.validate()?;
        let length = (self.frames - 1) as f64 * self.speed / self.frame_rate;
        let [hx_top, hy_top] = self.camera.footprint_half_extent(self.altitude);
        let [hx_low, hy_low] = self.camera.footprint_half_extent(self.altitude + self.drop);
        let x0 = hx_top + 2.0;
        let edge_x = x0 + self.cliff_appears_at * self.speed + hx_top;
        let extent = [x0 + length + hx_low + 2.0, 2.0 * (hy_low.max(hy_top) + 2.0)];
        let spec = TerrainSpec {
            seed: self.seed,
            extent,
            slope_deg: self.slope_deg,
            slope_azimuth_deg: 90.0,
            fractal_amplitude: self.fractal_amplitude,
            rock_diameter: self.rock_diameter,
            rock_coverage: self.rock_coverage,
            cliff: Some(Cliff {
                edge_x,
                drop: self.drop,
            }),
            ..TerrainSpec::default()
        };
        let terrain = generate_terrain(&spec)?;
        let plan = plane_following_pass(&terrain, extent[1] / 2.0, x0, self.frames, self.altitude, self.speed, self.frame_rate);
        let mut maps = [PyramidMap::centered_at(self.map, [x0, extent[1] / 2.0])?];
        let flight = Flight {
            terrain: &terrain,
            plan: &plan,
            camera: &self.camera,
            render: RenderOptions::for_resolution(self.map.finest_resolution, self.map.disparity_error_px),
            seed: derive_seed(self.seed, 1),
            recenter: true,
            track_rmse: true,
        };
        let frames = flight.run(&mut maps, |_, _, _| Ok(()))?;
        let crossing_at = (edge_x - x0) / self.speed;
        Ok(CliffReport {
            frames,
            edge_x,
            cliff_appears_at: self.cliff_appears_at,
            crossing_at,
            upper_ground_gone_at: crossing_at + hx_low / self.speed,
            settle_time: self.settle_time,
        })
    }
}

impl CliffReport {
    /// Mean per-class RMSE over settled frames in which all three classes
    /// are mapped.
    pub fn steady_state(&self) -> ClassRmse {
        let rows: Vec<&FrameRecord> = self
            .frames
            .iter()
            .filter(|f| f.timestamp >= self.settle_time && f.rmse.flat.is_some() && f.rmse.rock.is_some() && f.rmse.cliff.is_some())
            .collect();
        let mean = |pick: fn(&ClassRmse) -> Option<f64>| {
            let s = Summary::of(rows.iter().filter_map(|f| pick(&f.rmse)));
            (s.n > 0).then_some(s.mean)
        };
        ClassRmse {
            flat: mean(|r| r.flat),
            rock: mean(|r| r.rock),
            cliff: mean(|r| r.cliff),
            total: mean(|r| r.total),
        }
    }

    /// Mean total RMSE before the cliff shows up and once only lower ground
    /// is in view.
    pub fn total_before_after(&self) -> (Summary, Summary) {
        let total = |lo: f64, hi: f64| {
            Summary::of(
                self.frames
                    .iter()
                    .filter(|f| f.timestamp >= lo && f.timestamp < hi)
                    .filter_map(|f| f.rmse.total),
            )
        };
        (
            total(self.settle_time, self.cliff_appears_at),
            total(self.upper_ground_gone_at, f64::INFINITY),
        )
    }

    pub fn csv(&self) -> String {
        frames_csv(&self.frames)
    }

    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        let s = self.steady_state();
        for (k, v) in [("flat", s.flat), ("rock", s.rock), ("cliff", s.cliff), ("total", s.total)] {
            if let Some(v) = v {
                out.insert(format!("cliff.rmse.{k}"), v);
            }
        }
        let (before, after) = self.total_before_after();
        if before.n > 0 {
            out.insert("cliff.rmse.total_before".into(), before.mean);
        }
        if after.n > 0 {
            out.insert("cliff.rmse.total_after".into(), after.mean);
        }
        if let (Some(f), Some(r), Some(c)) = (s.flat, s.rock, s.cliff) {
            out.insert("cliff.order.rock_over_flat".into(), r - f);
            out.insert("cliff.order.cliff_over_rock".into(), c - r);
        }
        if before.n > 0 && after.n > 0 {
            out.insert("cliff.lod.total_increase".into(), after.mean - before.mean);
        }
        out
    }

    pub fn default_gates(&self) -> Vec<Gate> {
        vec![
            Gate::above("rock error above flat", "cliff.order.rock_over_flat", 0.0),
            Gate::above("cliff error above rock", "cliff.order.cliff_over_rock", 0.0),
            Gate::above("coarser detail raises error", "cliff.lod.total_increase", 0.0),
        ]
    }
}

impl fmt::Display for CliffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cm = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{:.2}", x * 100.0));
        let s = self.steady_state();
        writeln!(
            f,
            "steady-state RMSE (cm): flat {}  rock {}  cliff {}  total {}",
            cm(s.flat),
            cm(s.rock),
            cm(s.cliff),
            cm(s.total)
        )?;
        let (before, after) = self.total_before_after();
        writeln!(
            f,
            "total RMSE (cm): before cliff {}  lower ground only {}",
            cm((before.n > 0).then_some(before.mean)),
            cm((after.n > 0).then_some(after.mean))
        )?;
        write!(
            f,
            "cliff enters view at {:.1} s, crossed at {:.1} s, upper ground gone at {:.1} s",
            self.cliff_appears_at, self.crossing_at, self.upper_ground_gone_at
        )
    }
}
