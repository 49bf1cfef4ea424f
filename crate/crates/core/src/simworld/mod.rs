//! Synthetic terrain and a simulated stereo range sensor.
//!
//! A [`TerrainModel`] is an analytic surface. [`render_range_image`] ray-casts
//! a pinhole camera against it and perturbs each depth in disparity space.
//! [`fly`] strings renders together along a [`FlightPlan`].

mod camera;
mod flight;
mod fractal;
mod render;
mod terrain;

pub use camera::{CameraAttitude, CameraModel, CameraPose};
pub use flight::{fly, FlightPlan, Frame};
pub use render::{render_range_image, RangeImage, RangePoint, RenderOptions};
pub use terrain::{generate_terrain, Cliff, Rock, TerrainClass, TerrainModel, TerrainSpec};

/// Mixes a base seed with a stream id (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
