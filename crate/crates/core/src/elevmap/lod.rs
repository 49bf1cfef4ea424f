//! Pyramid indexing, pixel footprint and level-of-detail selection.

use super::config::MapConfig;
use crate::simworld::CameraModel;
use crate::{Error, Result};

/// Index at layer `level` of the cell containing finest-layer index `x_d`.
///
/// Uses floor division, so negative indices map consistently.
pub fn cell_index(x_d: i64, level: usize, depth: usize) -> Result<i64> {
    if level == 0 || level > depth {
        return Err(Error::LayerOutOfRange { layer: level, depth });
    }
    Ok(x_d >> (depth - level))
}

/// Ground footprint of one pixel for a camera at altitude `z_a` observing height `z_i`.
pub fn pixel_footprint(z_a: f64, z_i: f64, camera: &CameraModel) -> Result<f64> {
    let dz = z_a - z_i;
    if !(dz > 0.0) {
        return Err(Error::Footprint(dz));
    }
    Ok(2.0 * dz * camera.tan_half_fov_x() / f64::from(camera.image_width))
}

/// Deepest layer whose cell size is at least `footprint`.
pub fn target_level(footprint: f64, config: &MapConfig) -> usize {
    (1..=config.depth)
        .rev()
        .find(|&l| config.resolution(l) >= footprint)
        .unwrap_or(1)
}

/// Height variance of a stereo depth measurement at depth `depth` along the
/// optical axis, with `disparity_error_px` the three-sigma disparity error.
pub fn measurement_variance(depth: f64, baseline: f64, focal_px: f64, disparity_error_px: f64) -> Result<f64> {
    if !(baseline > 0.0) {
        return Err(Error::Variance("baseline must be positive"));
    }
    if !(depth > 0.0 && focal_px > 0.0 && disparity_error_px > 0.0) {
        return Err(Error::Variance("depth, focal length and disparity error must be positive"));
    }
    let sigma_z = depth * depth * (disparity_error_px / 3.0) / (baseline * focal_px);
    Ok(sigma_z * sigma_z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn index_examples() {
        assert_eq!(cell_index(7, 3, 3).unwrap(), 7);
        assert_eq!(cell_index(7, 1, 3).unwrap(), 1);
        assert_eq!(cell_index(7, 2, 3).unwrap(), 3);
        assert_eq!(cell_index(-1, 1, 3).unwrap(), -1);
        assert!(matches!(cell_index(7, 4, 3), Err(Error::LayerOutOfRange { .. })));
        assert!(cell_index(7, 0, 3).is_err());
    }

    #[test]
    fn footprint_examples() {
        let cam = CameraModel {
            fov_x_deg: 90.0,
            image_width: 640,
            ..CameraModel::default()
        };
        assert_relative_eq!(pixel_footprint(5.0, 0.0, &cam).unwrap(), 0.015625, epsilon = 1e-12);
        let wide = CameraModel {
            fov_x_deg: 110.0,
            ..cam
        };
        assert_relative_eq!(pixel_footprint(10.0, 0.0, &wide).unwrap(), 0.044629, epsilon = 1e-6);
        assert!(matches!(pixel_footprint(1.0, 1.0, &cam), Err(Error::Footprint(_))));
        let tiny = pixel_footprint(1.0 + 1e-9, 1.0, &cam).unwrap();
        assert_eq!(target_level(tiny, &MapConfig::default()), 3);
    }

    #[test]
    fn level_selection() {
        let cfg = MapConfig {
            depth: 3,
            finest_resolution: 0.08,
            ..MapConfig::default()
        };
        assert_eq!(target_level(0.05, &cfg), 3);
        assert_eq!(target_level(0.10, &cfg), 2);
        assert_eq!(target_level(1.0, &cfg), 1);
        assert_eq!(target_level(0.16, &cfg), 2);
    }

    #[test]
    fn variance_examples() {
        let s = measurement_variance(5.0, 1.0, 320.0, 0.25).unwrap().sqrt();
        assert_relative_eq!(s, 6.510e-3, max_relative = 1e-3);
        let s2 = measurement_variance(10.0, 1.0, 320.0, 0.25).unwrap().sqrt();
        assert_relative_eq!(s2, 4.0 * s, max_relative = 1e-12);
        assert!(matches!(measurement_variance(5.0, 0.0, 320.0, 0.25), Err(Error::Variance(_))));
    }
}
