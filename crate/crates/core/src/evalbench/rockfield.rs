//! Rock-field detection experiment: uniform rock sizes on a sloped rough
//! plane, scored with and without the safety margin.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::gates::Gate;
use super::metrics::{landing_metrics, EvalCriteria};
use super::report::{pct, EvalReport, RunRecord};
use super::runner::Flight;
use super::scenes::{extent_for_pass, plane_following_pass};
use crate::detector::{detect, LandingConfig, MapSnapshot};
use crate::elevmap::{MapConfig, PyramidMap};
use crate::simworld::{derive_seed, generate_terrain, CameraModel, FlightPlan, RenderOptions, TerrainModel, TerrainSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RockfieldExperiment {
    pub rock_diameters: Vec<f64>,
    pub rock_coverage: f64,
    /// Independent terrains and flights per diameter.
    pub seeds: usize,
    pub base_seed: u64,
    pub slope_deg: f64,
    pub fractal_amplitude: f64,
    /// Terrain size across the flight direction, meters.
    pub terrain_width: f64,
    pub altitude: f64,
    pub speed: f64,
    pub frame_rate: f64,
    pub frames: usize,
    pub camera: CameraModel,
    pub map: MapConfig,
    /// Detector settings for the margin variant; the other variant uses the
    /// same settings with a zero margin.
    pub landing: LandingConfig,
    pub criteria: EvalCriteria,
}

impl Default for RockfieldExperiment {
    fn default() -> Self {
        RockfieldExperiment {
            rock_diameters: vec![0.1, 0.2, 0.3, 0.4, 0.5, 1.0],
            rock_coverage: 0.2,
            seeds: 16,
            base_seed: 1,
            slope_deg: 5.0,
            fractal_amplitude: 0.05,
            terrain_width: 16.0,
            altitude: 5.0,
            speed: 1.0,
            frame_rate: 2.0,
            frames: 50,
            camera: CameraModel {
                image_width: 320,
                image_height: 240,
                ..CameraModel::default()
            },
            map: MapConfig {
                depth: 3,
                finest_resolution: 0.06,
                extent_cells: 256,
                disparity_error_px: 0.25,
            },
            landing: LandingConfig {
                keepout_radius: 0.5,
                safety_margin: 0.1,
                rock_area_radius: 0.3,
                max_slope_deg: 10.0,
                max_roughness_m: 0.05,
                ..LandingConfig::default()
            },
            criteria: EvalCriteria::default(),
        }
    }
}

/// Results for one rock diameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RockfieldRow {
    pub diameter: f64,
    /// The detector exactly as configured.
    pub with_margin: EvalReport,
    pub without_margin: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RockfieldReport {
    pub rows: Vec<RockfieldRow>,
}

impl RockfieldExperiment {
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.map.validate()?;
        self.landing.validate()?;
        if self.rock_diameters.is_empty() || self.rock_diameters.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::config("rock_diameters must be positive and non-empty"));
        }
        if self.seeds == 0 || self.frames == 0 {
            return Err(Error::config("seeds and frames must be positive"));
        }
        if !(self.altitude > 0.0 && self.speed > 0.0 && self.frame_rate > 0.0) {
            return Err(Error::config("altitude, speed and frame_rate must be positive"));
        }
        Ok(())
    }

    fn no_margin(&self) -> LandingConfig {
        LandingConfig {
            safety_margin: 0.0,
            rock_area_radius: self.landing.rock_area_radius.min(self.landing.keepout_radius),
            ..self.landing
        }
    }

    /// Terrain and flight of run `run` at `diameter`.
    pub fn scene(&self, diameter: f64, run: usize) -> Result<(TerrainModel, FlightPlan, u64)> {
        let seed = derive_seed(derive_seed(self.base_seed, run as u64), (diameter * 1e4).round() as u64);
        let length = self.frames.saturating_sub(1) as f64 * self.speed / self.frame_rate;
        let pad = 2.0;
        let extent = extent_for_pass(&self.camera, self.altitude, length, self.terrain_width, pad);
        let spec = TerrainSpec {
            seed,
            extent,
            slope_deg: self.slope_deg,
            fractal_amplitude: self.fractal_amplitude,
            rock_diameter: diameter,
            rock_coverage: self.rock_coverage,
            ..TerrainSpec::default()
        };
        let terrain = generate_terrain(&spec)?;
        let x0 = (extent[0] - length) / 2.0;
        let plan = plane_following_pass(&terrain, extent[1] / 2.0, x0, self.frames, self.altitude, self.speed, self.frame_rate);
        Ok((terrain, plan, seed))
    }

    /// All seeds at one diameter. Both detector variants read the same maps.
    pub fn run_diameter(&self, diameter: f64) -> Result<RockfieldRow> {
        self.validate()?;
        let label = |v: &str| format!("d{diameter:.2}/{v}");
        let mut with_margin = EvalReport::new(label("margin"));
        let mut without_margin = EvalReport::new(label("no-margin"));
        let no_margin = self.no_margin();
        for run in 0..self.seeds {
            let (terrain, plan, seed) = self.scene(diameter, run)?;
            let start = plan.waypoints[0];
            let mut maps = [PyramidMap::centered_at(self.map, [start[0], start[1]])?];
            let flight = Flight {
                terrain: &terrain,
                plan: &plan,
                camera: &self.camera,
                render: RenderOptions::for_resolution(self.map.finest_resolution, self.map.disparity_error_px),
                seed: derive_seed(seed, 1),
                recenter: true,
                track_rmse: false,
            };
            let frames = flight.run(&mut maps, |_, _, _| Ok(()))?;
            let snap = MapSnapshot::new(&maps[0]);
            for (cfg, rep) in [(&self.landing, &mut with_margin), (&no_margin, &mut without_margin)] {
                let landing = detect(&snap, cfg)?;
                rep.runs.push(RunRecord {
                    seed,
                    metrics: landing_metrics(&landing, &terrain, &self.criteria),
                });
                rep.memory_bytes = maps[0].payload_bytes();
            }
            with_margin.frames.extend(frames);
        }
        Ok(RockfieldRow {
            diameter,
            with_margin,
            without_margin,
        })
    }

    pub fn run(&self) -> Result<RockfieldReport> {
        let rows = self
            .rock_diameters
            .iter()
            .map(|&d| self.run_diameter(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(RockfieldReport { rows })
    }
}

/// Flies `seeds` terrains covered with rocks of one diameter and scores the
/// configured detector on each final map.
pub fn run_rockfield_experiment(diameter: f64, seeds: usize, config: &RockfieldExperiment) -> Result<EvalReport> {
    let exp = RockfieldExperiment {
        seeds,
        rock_diameters: vec![diameter],
        ..config.clone()
    };
    Ok(exp.run_diameter(diameter)?.with_margin)
}

impl RockfieldReport {
    /// Pooled rates keyed `rockfield.<variant>.<rate>.d<diameter>`.
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for row in &self.rows {
            for (variant, rep) in [("margin", &row.with_margin), ("no_margin", &row.without_margin)] {
                let m = rep.pooled();
                let rates = [
                    ("recall", m.recall()),
                    ("detection", m.detection_rate()),
                    ("false_positive", m.false_positive_rate()),
                ];
                for (name, v) in rates {
                    if let Some(v) = v {
                        out.insert(format!("rockfield.{variant}.{name}.d{:.2}", row.diameter), v);
                    }
                }
            }
            let (m, n) = (row.with_margin.pooled(), row.without_margin.pooled());
            let d = row.diameter;
            if let (Some(a), Some(b)) = (m.false_positive_rate(), n.false_positive_rate()) {
                out.insert(format!("rockfield.margin_fp_excess.d{d:.2}"), a - b);
            }
            if let (Some(a), Some(b)) = (m.recall(), n.recall()) {
                out.insert(format!("rockfield.margin_recall_excess.d{d:.2}"), a - b);
            }
        }
        out
    }

    /// Detection and false-positive bounds for the configured detector.
    pub fn detection_gates(&self) -> Vec<Gate> {
        let mut gates = Vec::new();
        for row in &self.rows {
            let d = row.diameter;
            let metric = |name: &str| format!("rockfield.margin.{name}.d{d:.2}");
            if d >= 0.3 - 1e-9 {
                gates.push(Gate::at_least(format!("detection d={d:.2}"), metric("detection"), 1.0));
            } else if d >= 0.2 - 1e-9 {
                gates.push(Gate::at_least(format!("detection d={d:.2}"), metric("detection"), 0.9));
            } else {
                gates.push(Gate::at_most(format!("detection d={d:.2}"), metric("detection"), 0.6));
            }
            if d >= 0.2 - 1e-9 {
                gates.push(Gate::at_most(format!("false positive d={d:.2}"), metric("false_positive"), 0.001));
            }
        }
        gates
    }

    /// The margin may only remove safe cells: for rocks of 0.2 m and up,
    /// both the false-positive rate and the recall must not exceed their
    /// no-margin values.
    pub fn margin_gates(&self) -> Vec<Gate> {
        let mut gates = Vec::new();
        for row in self.rows.iter().filter(|r| r.diameter >= 0.2 - 1e-9) {
            let d = row.diameter;
            gates.push(Gate::at_most(
                format!("margin fp d={d:.2}"),
                format!("rockfield.margin_fp_excess.d{d:.2}"),
                0.0,
            ));
            gates.push(Gate::at_most(
                format!("margin recall d={d:.2}"),
                format!("rockfield.margin_recall_excess.d{d:.2}"),
                0.0,
            ));
        }
        gates
    }

    pub fn default_gates(&self) -> Vec<Gate> {
        let mut g = self.detection_gates();
        g.extend(self.margin_gates());
        g
    }
}

impl fmt::Display for RockfieldReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<28}", "Rock diameter (m)")?;
        for r in &self.rows {
            write!(f, "{:>9.2}", r.diameter)?;
        }
        writeln!(f)?;
        type Rate = fn(&crate::evalbench::LandingMetrics) -> Option<f64>;
        let lines: [(&str, bool, Rate); 6] = [
            ("Detection, margin (%)", true, |m| m.detection_rate()),
            ("False positive, margin (%)", true, |m| m.false_positive_rate()),
            ("Recall, margin (%)", true, |m| m.recall()),
            ("Detection (%)", false, |m| m.detection_rate()),
            ("False positive (%)", false, |m| m.false_positive_rate()),
            ("Recall (%)", false, |m| m.recall()),
        ];
        for (name, margin, rate) in lines {
            write!(f, "{name:<28}")?;
            for r in &self.rows {
                let rep = if margin { &r.with_margin } else { &r.without_margin };
                write!(f, "{:>9}", pct(rate(&rep.pooled())))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
