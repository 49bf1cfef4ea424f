//! Multi-resolution elevation mapping and safe landing-site detection for UAVs.
//!
//! The crate is organised around four subsystems:
//!
//! * [`simworld`] generates synthetic terrain (sloped fractal ground, half-sphere
//!   rocks, an optional cliff) and simulates a stereo range sensor flying over it.
//! * [`elevmap`] fuses pose-tagged range images into a rolling Laplacian-pyramid
//!   elevation map with per-cell Kalman updates and a dynamic level of detail.
//! * [`detector`] runs the coarse-to-fine slope / roughness / confidence analysis
//!   over a map snapshot and extracts ranked landing-site candidates.
//! * [`evalbench`] reproduces the quantitative experiments (map RMSE per terrain
//!   class, rock detection and false-positive rates, runtime and memory).
//!
//! [`io`] holds the on-disk formats and [`cli`] wires everything into the
//! `pyramid-landing` binary.
//!
//! ```no_run
//! use pyramid_landing::prelude::*;
//!
//! let terrain = generate_terrain(&TerrainSpec::flat([20.0, 20.0])).unwrap();
//! let camera = CameraModel::default();
//! let plan = FlightPlan::straight([2.0, 10.0, 5.0], [18.0, 10.0, 5.0], 1.0, 2.0);
//! let mut map = PyramidMap::new(MapConfig::default()).unwrap();
//! for frame in fly(&terrain, &plan, &camera, 7, &RenderOptions::default()) {
//!     let frame = frame.unwrap();
//!     fuse_frame(&mut map, &frame.image, &frame.pose, &camera);
//! }
//! let landing = detect(&MapSnapshot::new(&map), &LandingConfig::default()).unwrap();
//! println!("{} candidates", landing.candidates.len());
//! ```

pub mod cli;
pub mod detector;
pub mod elevmap;
mod error;
pub mod evalbench;
pub mod io;
pub mod simworld;

pub use error::{Error, Result};

/// Common imports for library users and the bundled examples.
pub mod prelude {
    pub use crate::detector::{
        detect, distance_transform, fit_plane, rank_candidates, roughness, Candidate,
        LandingClass, LandingConfig, LandingMap, MapSnapshot, PlaneFit,
    };
    pub use crate::elevmap::{
        cell_index, fuse_frame, fuse_range_image, kalman_update, measurement_variance,
        pixel_footprint, target_level, CellState, FusionStats, MapConfig, MapShift,
        PyramidMap,
    };
    pub use crate::evalbench::{landing_metrics, map_rmse, EvalReport, LandingMetrics, RockfieldExperiment};
    pub use crate::simworld::{
        fly, generate_terrain, render_range_image, CameraAttitude, CameraModel, CameraPose,
        Cliff, FlightPlan, Frame, RangeImage, RangePoint, RenderOptions, Rock, TerrainClass,
        TerrainModel, TerrainSpec,
    };
    pub use crate::{Error, Result};
}
