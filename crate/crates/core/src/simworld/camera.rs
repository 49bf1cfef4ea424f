//! Pinhole stereo camera model and poses.

use nalgebra::{Rotation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Intrinsics and stereo parameters of the simulated range sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraModel {
    pub fov_x_deg: f64,
    pub image_width: u32,
    pub image_height: u32,
    /// Three-sigma disparity error injected by the simulator, in pixels.
    pub disparity_noise_3sigma: f64,
    /// Overlap of consecutive nadir footprints that defines the stereo baseline.
    pub overlap_fraction: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel {
            fov_x_deg: 110.0,
            image_width: 640,
            image_height: 480,
            disparity_noise_3sigma: 0.25,
            overlap_fraction: 0.8,
        }
    }
}

impl CameraModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.fov_x_deg > 0.0 && self.fov_x_deg < 180.0) {
            return Err(Error::config("fov_x_deg must lie in (0, 180)"));
        }
        if self.image_width == 0 || self.image_height == 0 {
            return Err(Error::config("image dimensions must be positive"));
        }
        if !(self.disparity_noise_3sigma >= 0.0 && self.disparity_noise_3sigma.is_finite()) {
            return Err(Error::config("disparity_noise_3sigma must be non-negative"));
        }
        if !(self.overlap_fraction >= 0.0 && self.overlap_fraction < 1.0) {
            return Err(Error::config("overlap_fraction must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn tan_half_fov_x(&self) -> f64 {
        (self.fov_x_deg.to_radians() / 2.0).tan()
    }

    /// Focal length in pixels, square pixels.
    pub fn focal_px(&self) -> f64 {
        f64::from(self.image_width) / (2.0 * self.tan_half_fov_x())
    }

    /// Stereo baseline at the given altitude: the non-overlapping fraction of
    /// the nadir ground footprint width.
    pub fn baseline(&self, altitude: f64) -> f64 {
        (1.0 - self.overlap_fraction) * 2.0 * altitude * self.tan_half_fov_x()
    }

    pub fn disparity_sigma(&self) -> f64 {
        self.disparity_noise_3sigma / 3.0
    }

    /// Ray through pixel `(u, v)` in the camera frame, scaled to unit optical depth.
    #[inline]
    pub fn ray(&self, u: u32, v: u32) -> Vector3<f64> {
        let f = self.focal_px();
        Vector3::new(
            (f64::from(u) - f64::from(self.image_width) / 2.0) / f,
            (f64::from(v) - f64::from(self.image_height) / 2.0) / f,
            1.0,
        )
    }

    /// Nadir ground footprint half-widths `(x, y)` at the given altitude.
    pub fn footprint_half_extent(&self, altitude: f64) -> [f64; 2] {
        let f = self.focal_px();
        [
            altitude * f64::from(self.image_width) / (2.0 * f),
            altitude * f64::from(self.image_height) / (2.0 * f),
        ]
    }
}

/// Camera orientation along a flight. Yaw is fixed: image columns follow world x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CameraAttitude {
    Nadir,
    /// Optical axis tilted forward (towards +x) from nadir by the given angle.
    Oblique { pitch_deg: f64 },
}

impl CameraAttitude {
    pub fn from_pitch(pitch_deg: f64) -> Self {
        if pitch_deg == 0.0 {
            CameraAttitude::Nadir
        } else {
            CameraAttitude::Oblique { pitch_deg }
        }
    }

    /// Rotation taking camera-frame vectors to the world frame.
    pub fn rotation(&self) -> UnitQuaternion<f64> {
        let nadir = Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI);
        let r = match *self {
            CameraAttitude::Nadir => nadir,
            CameraAttitude::Oblique { pitch_deg } => {
                Rotation3::from_axis_angle(&Vector3::y_axis(), -pitch_deg.to_radians()) * nadir
            }
        };
        UnitQuaternion::from_rotation_matrix(&r)
    }
}

/// Time-stamped camera pose; `orientation` maps camera vectors into the world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub timestamp: f64,
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl CameraPose {
    pub fn new(timestamp: f64, position: [f64; 3], attitude: CameraAttitude) -> Self {
        CameraPose {
            timestamp,
            position: Vector3::from(position),
            orientation: attitude.rotation(),
        }
    }

    pub fn nadir(timestamp: f64, position: [f64; 3]) -> Self {
        Self::new(timestamp, position, CameraAttitude::Nadir)
    }

    pub fn altitude(&self) -> f64 {
        self.position.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nadir_looks_down() {
        let q = CameraAttitude::Nadir.rotation();
        let d = q * Vector3::new(0.0, 0.0, 1.0);
        assert_abs_diff_eq!(d, Vector3::new(0.0, 0.0, -1.0), epsilon = 1e-12);
        let xr = q * Vector3::new(1.0, 0.0, 0.0);
        assert_abs_diff_eq!(xr, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn oblique_tilts_forward() {
        let q = CameraAttitude::Oblique { pitch_deg: 30.0 }.rotation();
        let d = q * Vector3::new(0.0, 0.0, 1.0);
        assert!(d.x > 0.0 && d.z < 0.0);
        assert_abs_diff_eq!(d.x.atan2(-d.z).to_degrees(), 30.0, epsilon = 1e-9);
    }

    #[test]
    fn focal_and_baseline() {
        let cam = CameraModel {
            fov_x_deg: 90.0,
            image_width: 640,
            ..CameraModel::default()
        };
        assert_abs_diff_eq!(cam.focal_px(), 320.0, epsilon = 1e-9);
        assert_abs_diff_eq!(cam.baseline(5.0), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn invalid_models_rejected() {
        for cam in [
            CameraModel { fov_x_deg: 180.0, ..CameraModel::default() },
            CameraModel { image_width: 0, ..CameraModel::default() },
            CameraModel { disparity_noise_3sigma: -0.1, ..CameraModel::default() },
        ] {
            assert!(cam.validate().is_err());
        }
    }
}
