//! Rolling multi-resolution elevation map.
//!
//! Layer 1 stores absolute heights at the coarsest resolution. Each deeper
//! layer halves the cell size and stores the residual against the
//! reconstruction of the layers above it, so the height at layer `l` is the
//! sum of the values of layers `1..=l` at that location. Each point is fused
//! down to the layer that matches its pixel footprint.

mod config;
mod fusion;
mod kalman;
mod lod;
mod pyramid;

pub use config::{CellState, MapConfig};
pub use fusion::{fuse_frame, fuse_range_image, FusionStats};
pub use kalman::kalman_update;
pub use lod::{cell_index, measurement_variance, pixel_footprint, target_level};
pub use pyramid::{MapShift, PyramidMap, Reconstruction};
