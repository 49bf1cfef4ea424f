//! Runtime and memory of fusion plus detection on full-resolution frames.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::gates::Gate;
use super::report::{FrameRecord, Summary};
use super::runner::{ms_since, Flight};
use super::scenes::{extent_for_pass, plane_following_pass};
use crate::detector::{detect, LandingConfig, MapSnapshot};
use crate::elevmap::{MapConfig, PyramidMap};
use crate::simworld::{derive_seed, generate_terrain, CameraModel, RenderOptions, TerrainSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub seed: u64,
    pub frames: usize,
    pub altitude: f64,
    pub speed: f64,
    pub frame_rate: f64,
    pub rock_diameter: f64,
    pub rock_coverage: f64,
    pub slope_deg: f64,
    pub camera: CameraModel,
    pub map: MapConfig,
    pub landing: LandingConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 3,
            frames: 50,
            altitude: 20.0,
            speed: 2.0,
            frame_rate: 2.0,
            rock_diameter: 0.3,
            rock_coverage: 0.05,
            slope_deg: 5.0,
            camera: CameraModel {
                fov_x_deg: 90.0,
                ..CameraModel::default()
            },
            map: MapConfig::default(),
            landing: LandingConfig {
                keepout_radius: 0.8,
                safety_margin: 0.2,
                rock_area_radius: 0.5,
                max_slope_deg: 20.0,
                max_roughness_m: 0.1,
                ..LandingConfig::default()
            },
        }
    }
}

/// Reference payload: 0.4 MB for the 52,500-cell default map.
const REFERENCE_BYTES_PER_CELL: f64 = 0.4e6 / 52_500.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub frames: Vec<FrameRecord>,
    pub fuse_ms: Summary,
    /// Snapshot plus detection.
    pub detect_ms: Summary,
    /// Fusion plus detection per frame.
    pub total_ms: Summary,
    pub memory_bytes: usize,
    pub allocated_cells: usize,
    pub points_per_frame: usize,
    /// Distinct cells updated per frame, all layers.
    pub cell_updates: Summary,
}

/// Flies the configured pass and times the mapping pipeline on every frame.
/// Rendering is excluded from the timings.
pub fn benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.camera.validate()?;
    cfg.map.validate()?;
    cfg.landing.validate()?;
    if cfg.frames == 0 {
        return Err(Error::config("frames must be positive"));
    }
    let length = (cfg.frames - 1) as f64 * cfg.speed / cfg.frame_rate;
    let extent = extent_for_pass(&cfg.camera, cfg.altitude, length, 0.0, 2.0);
    let spec = TerrainSpec {
        seed: cfg.seed,
        extent,
        slope_deg: cfg.slope_deg,
        rock_diameter: cfg.rock_diameter,
        rock_coverage: cfg.rock_coverage,
        ..TerrainSpec::default()
    };
    let terrain = generate_terrain(&spec)?;
    let x0 = (extent[0] - length) / 2.0;
    let plan = plane_following_pass(&terrain, extent[1] / 2.0, x0, cfg.frames, cfg.altitude, cfg.speed, cfg.frame_rate);
    let mut maps = [PyramidMap::centered_at(cfg.map, [x0, extent[1] / 2.0])?];
    let flight = Flight {
        terrain: &terrain,
        plan: &plan,
        camera: &cfg.camera,
        render: RenderOptions::for_resolution(cfg.map.finest_resolution, cfg.map.disparity_error_px),
        seed: derive_seed(cfg.seed, 1),
        recenter: true,
        track_rmse: false,
    };
    let frames = flight.run(&mut maps, |_, maps, rec| {
        let t = Instant::now();
        let landing = detect(&MapSnapshot::new(&maps[0]), &cfg.landing)?;
        rec.detect_ms = ms_since(t);
        std::hint::black_box(landing);
        Ok(())
    })?;
    Ok(BenchReport {
        fuse_ms: Summary::of(frames.iter().map(|f| f.fuse_ms)),
        detect_ms: Summary::of(frames.iter().map(|f| f.detect_ms)),
        total_ms: Summary::of(frames.iter().map(|f| f.fuse_ms + f.detect_ms)),
        memory_bytes: maps[0].payload_bytes(),
        allocated_cells: maps[0].allocated_cells(),
        points_per_frame: cfg.camera.image_width as usize * cfg.camera.image_height as usize,
        cell_updates: Summary::of(frames.iter().map(|f| f.updated_cells as f64)),
        frames,
    })
}

impl BenchReport {
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("bench.fuse_ms.median".to_string(), self.fuse_ms.median),
            ("bench.fuse_ms.std".to_string(), self.fuse_ms.std),
            ("bench.detect_ms.median".to_string(), self.detect_ms.median),
            ("bench.detect_ms.std".to_string(), self.detect_ms.std),
            ("bench.total_ms.median".to_string(), self.total_ms.median),
            ("bench.cell_updates.median".to_string(), self.cell_updates.median),
            ("bench.memory_bytes".to_string(), self.memory_bytes as f64),
            (
                "bench.cell_updates.coverage".to_string(),
                self.cell_updates.median / self.allocated_cells as f64,
            ),
            (
                "bench.memory_ratio".to_string(),
                self.memory_bytes as f64 / (self.allocated_cells as f64 * REFERENCE_BYTES_PER_CELL),
            ),
        ])
    }

    /// Timing envelopes, a frame that covers the whole map, and memory within
    /// three times the reference footprint.
    pub fn default_gates(&self) -> Vec<Gate> {
        vec![
            Gate::at_most("fusion time", "bench.fuse_ms.median", 50.0),
            Gate::at_most("detection time", "bench.detect_ms.median", 60.0),
            Gate {
                name: "cell updates per frame".into(),
                metric: "bench.cell_updates.coverage".into(),
                min: Some(0.9),
                max: Some(1.1),
                ..Gate::default()
            },
            Gate::at_most("map memory", "bench.memory_ratio", 3.0),
        ]
    }

    /// Timing table with one row per stage.
    pub fn csv(&self) -> String {
        let mut s = String::from("stage,median_ms,std_ms,mean_ms,min_ms,max_ms,frames\n");
        for (name, t) in [("fuse", &self.fuse_ms), ("detect", &self.detect_ms), ("total", &self.total_ms)] {
            s.push_str(&format!(
                "{name},{:.4},{:.4},{:.4},{:.4},{:.4},{}\n",
                t.median, t.std, t.mean, t.min, t.max, t.n
            ));
        }
        s
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |s: &Summary| format!("median {:.2} ms, std {:.2}, max {:.2}", s.median, s.std, s.max);
        writeln!(f, "frames: {} of {} points", self.frames.len(), self.points_per_frame)?;
        writeln!(f, "fusion:    {}", line(&self.fuse_ms))?;
        writeln!(f, "detection: {}", line(&self.detect_ms))?;
        writeln!(f, "total:     {}", line(&self.total_ms))?;
        writeln!(f, "cell updates per frame: median {:.0}", self.cell_updates.median)?;
        write!(
            f,
            "map memory: {} cells, {:.3} MB",
            self.allocated_cells,
            self.memory_bytes as f64 / 1e6
        )
    }
}
