//! Flat per-subcommand configuration files. Every key is optional; unknown
//! keys are rejected so that typos never fall back to defaults silently.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::detector::LandingConfig;
use crate::elevmap::MapConfig;
use crate::simworld::{
    derive_seed, CameraAttitude, CameraModel, Cliff, FlightPlan, RenderOptions, TerrainModel, TerrainSpec,
};
use crate::{Error, Result};

/// Reads a TOML file into `T`, or returns `T::default()` without a path.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
}

/// Camera keys shared by several subcommands.
macro_rules! camera_from {
    ($c:expr) => {
        CameraModel {
            fov_x_deg: $c.fov_x_deg,
            image_width: $c.image_width,
            image_height: $c.image_height,
            disparity_noise_3sigma: $c.disparity_noise_3sigma,
            overlap_fraction: $c.overlap_fraction,
        }
    };
}

/// `simulate`: terrain, camera, straight flight and renderer settings.
///
/// The flight runs from `(start_x, start_y)` to `(end_x, end_y)` at
/// `altitude` above the mean ground plane at each end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub extent_x: f64,
    pub extent_y: f64,
    pub slope_deg: f64,
    pub slope_azimuth_deg: f64,
    pub fractal_amplitude: f64,
    pub fractal_hurst: f64,
    pub fractal_spacing: f64,
    pub rock_diameter: f64,
    pub rock_coverage: f64,
    pub cliff_edge_x: Option<f64>,
    pub cliff_drop: f64,
    pub cliff_band: f64,
    pub fov_x_deg: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub disparity_noise_3sigma: f64,
    pub overlap_fraction: f64,
    pub pitch_deg: f64,
    pub start_x: f64,
    pub start_y: f64,
    pub end_x: f64,
    pub end_y: f64,
    pub altitude: f64,
    pub speed: f64,
    pub frame_rate: f64,
    pub assumed_disparity_error_px: f64,
    pub march_step: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        let t = TerrainSpec::default();
        let c = CameraModel::default();
        let r = RenderOptions::default();
        SimulateConfig {
            seed: 1,
            out: None,
            extent_x: 20.0,
            extent_y: 20.0,
            slope_deg: t.slope_deg,
            slope_azimuth_deg: t.slope_azimuth_deg,
            fractal_amplitude: t.fractal_amplitude,
            fractal_hurst: t.fractal_hurst,
            fractal_spacing: t.fractal_spacing,
            rock_diameter: t.rock_diameter,
            rock_coverage: t.rock_coverage,
            cliff_edge_x: None,
            cliff_drop: 5.0,
            cliff_band: t.cliff_band,
            fov_x_deg: c.fov_x_deg,
            image_width: c.image_width,
            image_height: c.image_height,
            disparity_noise_3sigma: c.disparity_noise_3sigma,
            overlap_fraction: c.overlap_fraction,
            pitch_deg: 0.0,
            start_x: 5.0,
            start_y: 10.0,
            end_x: 15.0,
            end_y: 10.0,
            altitude: 5.0,
            speed: 1.0,
            frame_rate: 2.0,
            assumed_disparity_error_px: r.assumed_disparity_error_px,
            march_step: r.march_step,
        }
    }
}

impl SimulateConfig {
    /// Seed of the terrain generator; noise uses [`Self::noise_seed`].
    pub fn terrain_seed(&self) -> u64 {
        derive_seed(self.seed, 0)
    }

    pub fn noise_seed(&self) -> u64 {
        derive_seed(self.seed, 1)
    }

    pub fn terrain_spec(&self) -> TerrainSpec {
        TerrainSpec {
            seed: self.terrain_seed(),
            extent: [self.extent_x, self.extent_y],
            slope_deg: self.slope_deg,
            slope_azimuth_deg: self.slope_azimuth_deg,
            fractal_amplitude: self.fractal_amplitude,
            fractal_hurst: self.fractal_hurst,
            fractal_spacing: self.fractal_spacing,
            rock_diameter: self.rock_diameter,
            rock_coverage: self.rock_coverage,
            cliff: self.cliff_edge_x.map(|edge_x| Cliff {
                edge_x,
                drop: self.cliff_drop,
            }),
            cliff_band: self.cliff_band,
        }
    }

    pub fn camera(&self) -> CameraModel {
        camera_from!(self)
    }

    pub fn render_options(&self) -> RenderOptions {
        RenderOptions {
            assumed_disparity_error_px: self.assumed_disparity_error_px,
            march_step: self.march_step,
        }
    }

    pub fn plan(&self, terrain: &TerrainModel) -> FlightPlan {
        let z0 = terrain.plane_height(self.start_x, self.start_y) + self.altitude;
        let z1 = terrain.plane_height(self.end_x, self.end_y) + self.altitude;
        let mut plan = FlightPlan::straight(
            [self.start_x, self.start_y, z0],
            [self.end_x, self.end_y, z1],
            self.speed,
            self.frame_rate,
        );
        plan.attitude = CameraAttitude::from_pitch(self.pitch_deg);
        plan
    }
}

/// `fuse`: map geometry and the camera that produced the frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuseConfig {
    /// Directory with `frame_*.rimg` and `poses.txt`.
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub depth: usize,
    pub finest_resolution: f64,
    pub extent_cells: usize,
    pub disparity_error_px: f64,
    pub fov_x_deg: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub disparity_noise_3sigma: f64,
    pub overlap_fraction: f64,
    /// Roll the map under the camera; otherwise it stays where it started.
    pub recenter: bool,
    /// Initial map centre; defaults to the first camera position.
    pub center_x: Option<f64>,
    pub center_y: Option<f64>,
}

impl Default for FuseConfig {
    fn default() -> Self {
        let m = MapConfig::default();
        let c = CameraModel::default();
        FuseConfig {
            input: None,
            out: None,
            depth: m.depth,
            finest_resolution: m.finest_resolution,
            extent_cells: m.extent_cells,
            disparity_error_px: m.disparity_error_px,
            fov_x_deg: c.fov_x_deg,
            image_width: c.image_width,
            image_height: c.image_height,
            disparity_noise_3sigma: c.disparity_noise_3sigma,
            overlap_fraction: c.overlap_fraction,
            recenter: true,
            center_x: None,
            center_y: None,
        }
    }
}

impl FuseConfig {
    pub fn map(&self) -> MapConfig {
        MapConfig {
            depth: self.depth,
            finest_resolution: self.finest_resolution,
            extent_cells: self.extent_cells,
            disparity_error_px: self.disparity_error_px,
        }
    }

    pub fn camera(&self) -> CameraModel {
        camera_from!(self)
    }
}

/// `detect`: detector thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectConfig {
    /// Map dump directory written by `fuse`.
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub keepout_radius: f64,
    pub safety_margin: f64,
    pub rock_area_radius: f64,
    pub max_slope_deg: f64,
    pub max_roughness_m: f64,
    pub min_observations: u32,
    pub max_variance: Option<f64>,
    pub max_candidates: usize,
    /// Refuse maps whose finest cell differs from this, meters.
    pub expected_resolution: Option<f64>,
}

impl Default for DetectConfig {
    fn default() -> Self {
        let l = LandingConfig::default();
        DetectConfig {
            input: None,
            out: None,
            keepout_radius: l.keepout_radius,
            safety_margin: l.safety_margin,
            rock_area_radius: l.rock_area_radius,
            max_slope_deg: l.max_slope_deg,
            max_roughness_m: l.max_roughness_m,
            min_observations: l.min_observations,
            max_variance: l.max_variance,
            max_candidates: l.max_candidates,
            expected_resolution: None,
        }
    }
}

impl DetectConfig {
    pub fn landing(&self) -> LandingConfig {
        LandingConfig {
            keepout_radius: self.keepout_radius,
            safety_margin: self.safety_margin,
            rock_area_radius: self.rock_area_radius,
            max_slope_deg: self.max_slope_deg,
            max_roughness_m: self.max_roughness_m,
            min_observations: self.min_observations,
            max_variance: self.max_variance,
            max_candidates: self.max_candidates,
        }
    }
}

/// `eval`: which experiment to run plus the knobs most often changed. All
/// other parameters keep the experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// One of `rockfield`, `cellsize`, `altitude`, `cliff`.
    pub experiment: String,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub frames: Option<usize>,
    pub rock_diameters: Option<Vec<f64>>,
    pub cell_sizes: Option<Vec<f64>>,
    pub altitudes: Option<Vec<f64>>,
    /// Gate file for `--check`; the built-in gates apply without one.
    pub gates: Option<PathBuf>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            experiment: "rockfield".into(),
            out: None,
            seed: None,
            seeds: None,
            frames: None,
            rock_diameters: None,
            cell_sizes: None,
            altitudes: None,
            gates: None,
        }
    }
}

/// `bench`: flight and map of the timing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchCliConfig {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub frames: usize,
    pub altitude: f64,
    pub speed: f64,
    pub fov_x_deg: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub depth: usize,
    pub finest_resolution: f64,
    pub extent_cells: usize,
    pub gates: Option<PathBuf>,
}

impl Default for BenchCliConfig {
    fn default() -> Self {
        let b = crate::evalbench::BenchConfig::default();
        BenchCliConfig {
            out: None,
            seed: b.seed,
            frames: b.frames,
            altitude: b.altitude,
            speed: b.speed,
            fov_x_deg: b.camera.fov_x_deg,
            image_width: b.camera.image_width,
            image_height: b.camera.image_height,
            depth: b.map.depth,
            finest_resolution: b.map.finest_resolution,
            extent_cells: b.map.extent_cells,
            gates: None,
        }
    }
}

impl BenchCliConfig {
    pub fn bench(&self) -> crate::evalbench::BenchConfig {
        let d = crate::evalbench::BenchConfig::default();
        crate::evalbench::BenchConfig {
            seed: self.seed,
            frames: self.frames,
            altitude: self.altitude,
            speed: self.speed,
            camera: CameraModel {
                fov_x_deg: self.fov_x_deg,
                image_width: self.image_width,
                image_height: self.image_height,
                ..d.camera
            },
            map: MapConfig {
                depth: self.depth,
                finest_resolution: self.finest_resolution,
                extent_cells: self.extent_cells,
                ..d.map
            },
            ..d
        }
    }
}
