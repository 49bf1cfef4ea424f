//! Experiments on a grid of rocks with graded sizes: detection against map
//! cell size, and segmentation quality against flight altitude.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::gates::Gate;
use super::metrics::{landing_metrics, rock_outcomes, EvalCriteria, LandingMetrics};
use super::report::{pct, EvalReport, RunRecord};
use super::runner::Flight;
use super::scenes::{plane_following_pass, rock_grid_terrain, DiameterBin, RockGridLayout};
use crate::detector::{detect, LandingConfig, MapSnapshot};
use crate::elevmap::{MapConfig, PyramidMap};
use crate::simworld::{derive_seed, CameraModel, FlightPlan, RenderOptions, TerrainModel};
use crate::{Error, Result};

/// Scene and flight settings common to the grid experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RockGridScene {
    pub layout: RockGridLayout,
    /// Side of the square terrain, meters; the grid sits in its centre.
    pub terrain_side: f64,
    pub slope_deg: f64,
    pub fractal_amplitude: f64,
    pub seeds: usize,
    pub base_seed: u64,
    pub speed: f64,
    pub frame_rate: f64,
    pub frames: usize,
    pub camera: CameraModel,
    pub depth: usize,
    /// Side of the map window, meters, rounded up to whole coarse cells.
    pub map_extent: f64,
    pub landing: LandingConfig,
    pub criteria: EvalCriteria,
    /// Score only cells within half a slot of the outermost rock slots, so
    /// that flights with different footprints are compared on the same area.
    pub score_grid_only: bool,
}

impl Default for RockGridScene {
    fn default() -> Self {
        RockGridScene {
            layout: RockGridLayout::default(),
            terrain_side: 32.0,
            slope_deg: 0.0,
            fractal_amplitude: 0.02,
            seeds: 4,
            base_seed: 11,
            speed: 1.0,
            frame_rate: 2.0,
            frames: 30,
            camera: CameraModel::default(),
            depth: 3,
            map_extent: 16.0,
            landing: LandingConfig {
                keepout_radius: 0.3,
                safety_margin: 0.2,
                rock_area_radius: 0.5,
                max_slope_deg: 10.0,
                max_roughness_m: 0.1,
                ..LandingConfig::default()
            },
            criteria: EvalCriteria::default(),
            score_grid_only: true,
        }
    }
}

impl RockGridScene {
    /// Scoring rules, restricted to the grid area when requested.
    pub fn scoring(&self) -> EvalCriteria {
        if !self.score_grid_only {
            return self.criteria;
        }
        let c = self.center();
        let h = (self.layout.span() + self.layout.spacing) / 2.0;
        EvalCriteria {
            region: Some([c[0] - h, c[1] - h, c[0] + h, c[1] + h]),
            ..self.criteria
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.camera.validate()?;
        self.landing.validate()?;
        if self.seeds == 0 || self.frames == 0 {
            return Err(Error::config("seeds and frames must be positive"));
        }
        if !(self.speed > 0.0 && self.frame_rate > 0.0 && self.map_extent > 0.0) {
            return Err(Error::config("speed, frame_rate and map_extent must be positive"));
        }
        if self.layout.span() + 2.0 > self.terrain_side {
            return Err(Error::config("terrain_side too small for the rock grid"));
        }
        Ok(())
    }

    /// Map centred on the rock grid with cells of `cell_size`.
    pub fn map_config(&self, cell_size: f64) -> MapConfig {
        let s = 1usize << (self.depth - 1);
        let cells = ((self.map_extent / cell_size / s as f64).ceil() as usize).max(1) * s;
        MapConfig {
            depth: self.depth,
            finest_resolution: cell_size,
            extent_cells: cells,
            ..MapConfig::default()
        }
    }

    pub fn center(&self) -> [f64; 2] {
        [self.terrain_side / 2.0; 2]
    }

    /// Terrain and a pass over the grid centre at `altitude` for run `run`.
    pub fn scene(&self, run: usize, altitude: f64) -> Result<(TerrainModel, FlightPlan, u64)> {
        let seed = derive_seed(self.base_seed, run as u64);
        let terrain = rock_grid_terrain(&self.layout, self.terrain_side, self.slope_deg, self.fractal_amplitude, seed)?;
        let length = self.frames.saturating_sub(1) as f64 * self.speed / self.frame_rate;
        let c = self.center();
        let plan = plane_following_pass(&terrain, c[1], c[0] - length / 2.0, self.frames, altitude, self.speed, self.frame_rate);
        Ok((terrain, plan, seed))
    }

    /// Flies run `run` and returns one map per entry of `cell_sizes`.
    fn fly(&self, run: usize, altitude: f64, cell_sizes: &[f64], camera: &CameraModel) -> Result<(TerrainModel, u64, Vec<PyramidMap>, EvalReport)> {
        let (terrain, plan, seed) = self.scene(run, altitude)?;
        let mut maps = cell_sizes
            .iter()
            .map(|&c| PyramidMap::centered_at(self.map_config(c), self.center()))
            .collect::<Result<Vec<_>>>()?;
        let flight = Flight {
            terrain: &terrain,
            plan: &plan,
            camera,
            render: RenderOptions::default(),
            seed: derive_seed(seed, 1),
            recenter: false,
            track_rmse: false,
        };
        let mut rep = EvalReport::new("");
        rep.frames = flight.run(&mut maps, |_, _, _| Ok(()))?;
        Ok((terrain, seed, maps, rep))
    }
}

/// Detection counts of one diameter bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinOutcome {
    pub bin: DiameterBin,
    pub visible: usize,
    pub detected: usize,
}

impl BinOutcome {
    pub fn detection_rate(&self) -> Option<f64> {
        (self.visible > 0).then(|| self.detected as f64 / self.visible as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellSizeSweep {
    pub cell_sizes: Vec<f64>,
    pub altitude: f64,
    pub scene: RockGridScene,
}

impl Default for CellSizeSweep {
    fn default() -> Self {
        CellSizeSweep {
            cell_sizes: vec![0.03, 0.06, 0.12, 0.20],
            altitude: 5.0,
            scene: RockGridScene::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSizeRow {
    pub cell_size: f64,
    pub bins: Vec<BinOutcome>,
    pub metrics: LandingMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSizeReport {
    pub rows: Vec<CellSizeRow>,
}

impl CellSizeSweep {
    pub fn run(&self) -> Result<CellSizeReport> {
        let sc = &self.scene;
        sc.validate()?;
        if self.cell_sizes.is_empty() || self.cell_sizes.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::config("cell_sizes must be positive and non-empty"));
        }
        let scoring = sc.scoring();
        let mut rows: Vec<CellSizeRow> = self
            .cell_sizes
            .iter()
            .map(|&cell_size| CellSizeRow {
                cell_size,
                bins: sc
                    .layout
                    .bins
                    .iter()
                    .map(|&bin| BinOutcome { bin, visible: 0, detected: 0 })
                    .collect(),
                metrics: LandingMetrics::default(),
            })
            .collect();
        for run in 0..sc.seeds {
            let (terrain, _, maps, _) = sc.fly(run, self.altitude, &self.cell_sizes, &sc.camera)?;
            for (row, map) in rows.iter_mut().zip(&maps) {
                let landing = detect(&MapSnapshot::new(map), &sc.landing)?;
                row.metrics.merge(&landing_metrics(&landing, &terrain, &scoring));
                for o in rock_outcomes(&landing, &terrain) {
                    if !o.visible {
                        continue;
                    }
                    if let Some(b) = row.bins.iter_mut().find(|b| b.bin.contains(2.0 * o.rock.radius)) {
                        b.visible += 1;
                        b.detected += usize::from(o.detected);
                    }
                }
            }
        }
        Ok(CellSizeReport { rows })
    }
}

impl CellSizeReport {
    /// Keyed `cellsize.detection.c<cell>.b<min>-<max>`.
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for row in &self.rows {
            for b in &row.bins {
                if let Some(v) = b.detection_rate() {
                    out.insert(format!("cellsize.detection.c{:.2}.b{}", row.cell_size, b.bin.label()), v);
                }
            }
            if let Some(v) = row.detection_below_rule() {
                out.insert(format!("cellsize.detection_below_3x.c{:.2}", row.cell_size), v);
            }
        }
        out
    }

    /// Rocks at least three cells wide are always found; at cell sizes where
    /// whole bins fall below that size, detection of those bins drops.
    pub fn default_gates(&self) -> Vec<Gate> {
        let mut gates = Vec::new();
        for row in &self.rows {
            let c = row.cell_size;
            for b in row.bins.iter().filter(|b| b.bin.min >= 3.0 * c - 1e-9) {
                gates.push(Gate::at_least(
                    format!("3x rule {:.0} cm, {} m", c * 100.0, b.bin.label()),
                    format!("cellsize.detection.c{c:.2}.b{}", b.bin.label()),
                    1.0,
                ));
            }
            if row.detection_below_rule().is_some() {
                gates.push(Gate::below(
                    format!("degradation {:.0} cm", c * 100.0),
                    format!("cellsize.detection_below_3x.c{c:.2}"),
                    1.0,
                ));
            }
        }
        gates
    }
}

impl CellSizeRow {
    /// Pooled detection over bins whose largest rock is under three cells wide.
    pub fn detection_below_rule(&self) -> Option<f64> {
        let (mut vis, mut det) = (0, 0);
        for b in self.bins.iter().filter(|b| b.bin.max <= 3.0 * self.cell_size + 1e-9) {
            vis += b.visible;
            det += b.detected;
        }
        (vis > 0).then(|| det as f64 / vis as f64)
    }
}

impl fmt::Display for CellSizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<22}", "Rock diameter (m)")?;
        if let Some(first) = self.rows.first() {
            for b in &first.bins {
                write!(f, "{:>12}", b.bin.label())?;
            }
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:<22}", format!("{:.0} cm cells (%)", row.cell_size * 100.0))?;
            for b in &row.bins {
                write!(f, "{:>12}", pct(b.detection_rate()))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AltitudeSweep {
    pub altitudes: Vec<f64>,
    pub cell_size: f64,
    pub scene: RockGridScene,
}

impl Default for AltitudeSweep {
    fn default() -> Self {
        AltitudeSweep {
            altitudes: vec![5.0, 15.0],
            cell_size: 0.12,
            scene: RockGridScene::default(),
        }
    }
}

/// Landing metrics at one altitude with the configured disparity noise and
/// with none.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AltitudeRow {
    pub altitude: f64,
    pub noisy: EvalReport,
    pub noiseless: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AltitudeReport {
    pub rows: Vec<AltitudeRow>,
}

impl AltitudeSweep {
    pub fn run(&self) -> Result<AltitudeReport> {
        let sc = &self.scene;
        sc.validate()?;
        if self.altitudes.is_empty() || self.altitudes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::config("altitudes must be positive and non-empty"));
        }
        let scoring = sc.scoring();
        let quiet = CameraModel {
            disparity_noise_3sigma: 0.0,
            ..sc.camera
        };
        let mut rows = Vec::new();
        for &altitude in &self.altitudes {
            let mut noisy = EvalReport::new(format!("h{altitude:.1}/noisy"));
            let mut noiseless = EvalReport::new(format!("h{altitude:.1}/noiseless"));
            for run in 0..sc.seeds {
                for (camera, rep) in [(&sc.camera, &mut noisy), (&quiet, &mut noiseless)] {
                    let (terrain, seed, maps, flown) = sc.fly(run, altitude, &[self.cell_size], camera)?;
                    let landing = detect(&MapSnapshot::new(&maps[0]), &sc.landing)?;
                    rep.runs.push(RunRecord {
                        seed,
                        metrics: landing_metrics(&landing, &terrain, &scoring),
                    });
                    rep.frames.extend(flown.frames);
                    rep.memory_bytes = maps[0].payload_bytes();
                }
            }
            rows.push(AltitudeRow {
                altitude,
                noisy,
                noiseless,
            });
        }
        Ok(AltitudeReport { rows })
    }
}

/// Repeats the grid experiment at each altitude of `altitudes`.
pub fn run_altitude_sweep(altitudes: &[f64], config: &AltitudeSweep) -> Result<AltitudeReport> {
    AltitudeSweep {
        altitudes: altitudes.to_vec(),
        ..config.clone()
    }
    .run()
}

impl AltitudeReport {
    /// Keyed `altitude.<noisy|noiseless>.recall.h<altitude>`.
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for row in &self.rows {
            for (name, rep) in [("noisy", &row.noisy), ("noiseless", &row.noiseless)] {
                if let Some(v) = rep.pooled().recall() {
                    out.insert(format!("altitude.{name}.recall.h{:.1}", row.altitude), v);
                }
            }
        }
        let mut rows: Vec<&AltitudeRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.altitude.total_cmp(&b.altitude));
        if let (Some(lo), Some(hi)) = (rows.first(), rows.last()) {
            if let (Some(a), Some(b)) = (lo.noisy.pooled().recall(), hi.noisy.pooled().recall()) {
                out.insert("altitude.noisy.recall_drop".into(), a - b);
            }
            if let (Some(a), Some(b)) = (lo.noiseless.pooled().recall(), hi.noiseless.pooled().recall()) {
                out.insert("altitude.noiseless.recall_gap".into(), (a - b).abs());
            }
        }
        out
    }

    /// Recall must not rise with altitude, and without sensor noise the
    /// lowest and highest flights agree within two points.
    pub fn default_gates(&self) -> Vec<Gate> {
        vec![
            Gate::at_least("recall drops with altitude", "altitude.noisy.recall_drop", 0.0),
            Gate::at_most("noiseless recall gap", "altitude.noiseless.recall_gap", 0.02),
        ]
    }
}

impl fmt::Display for AltitudeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14}{:>14}{:>18}{:>14}", "Altitude (m)", "Recall (%)", "Recall, no noise", "FP (%)")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<14.1}{:>14}{:>18}{:>14}",
                r.altitude,
                pct(r.noisy.pooled().recall()),
                pct(r.noiseless.pooled().recall()),
                pct(r.noisy.pooled().false_positive_rate())
            )?;
        }
        Ok(())
    }
}
