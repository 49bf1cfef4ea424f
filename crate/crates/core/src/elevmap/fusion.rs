//! Per-image fusion driver with dynamic level of detail.

use super::pyramid::{MapShift, PyramidMap};
use crate::simworld::{CameraModel, CameraPose, RangeImage};

/// Counters collected while fusing one range image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FusionStats {
    /// Distinct cells updated per layer, index 0 is layer 1.
    pub updated_cells: Vec<usize>,
    /// Points fused into the map.
    pub fused_points: usize,
    /// Individual cell updates summed over all points and layers.
    pub cell_updates: usize,
    pub rejected_invalid: usize,
    /// Points at or above the camera altitude.
    pub rejected_footprint: usize,
    pub rejected_outside: usize,
    /// Points fused per target layer, index 0 is layer 1.
    pub points_per_level: Vec<usize>,
    pub shift: MapShift,
}

impl FusionStats {
    /// Distinct cells updated over all layers.
    pub fn total_updated_cells(&self) -> usize {
        self.updated_cells.iter().sum()
    }

    pub fn rejected(&self) -> usize {
        self.rejected_invalid + self.rejected_footprint + self.rejected_outside
    }
}

/// Fuses every valid point in pixel scan order. The map is not moved; points
/// outside the current window are rejected.
pub fn fuse_range_image(map: &mut PyramidMap, image: &RangeImage, pose: &CameraPose, camera: &CameraModel) -> FusionStats {
    let depth = map.depth();
    let config = *map.config();
    // Cell sizes from coarse to fine; the target layer is the deepest one
    // whose cells are at least as large as the pixel footprint.
    let resolutions: Vec<f64> = (1..=depth).map(|l| config.resolution(l)).collect();
    let footprint_per_meter = 2.0 * camera.tan_half_fov_x() / f64::from(camera.image_width);
    let z_a = pose.position.z;
    let t = pose.timestamp as f32;

    let mut stats = FusionStats {
        points_per_level: vec![0; depth],
        ..FusionStats::default()
    };
    map.clear_touched();
    for p in &image.points {
        if !p.is_valid() || !(p.variance > 0.0) {
            stats.rejected_invalid += 1;
            continue;
        }
        let dz = z_a - p.z;
        if !(dz > 0.0) {
            stats.rejected_footprint += 1;
            continue;
        }
        let g = map.global_index(p.x, p.y);
        if !map.contains_index(g) {
            stats.rejected_outside += 1;
            continue;
        }
        let footprint = dz * footprint_per_meter;
        let level = resolutions.iter().rposition(|&r| r >= footprint).map_or(1, |i| i + 1);
        map.fuse_index(g, p.z, p.variance, level, t);
        stats.fused_points += 1;
        stats.cell_updates += level;
        stats.points_per_level[level - 1] += 1;
    }
    stats.updated_cells = map.touched_counts();
    stats
}

/// Moves the map under the camera when its expected nadir footprint leaves
/// the window, then fuses the image.
pub fn fuse_frame(map: &mut PyramidMap, image: &RangeImage, pose: &CameraPose, camera: &CameraModel) -> FusionStats {
    let shift = match ground_estimate(image) {
        Some(ground) if pose.position.z > ground => {
            let half = camera.footprint_half_extent(pose.position.z - ground);
            map.recenter([pose.position.x, pose.position.y], half)
        }
        _ => MapShift::default(),
    };
    let mut stats = fuse_range_image(map, image, pose, camera);
    stats.shift = shift;
    stats
}

/// Median height of a sparse sample of valid points.
fn ground_estimate(image: &RangeImage) -> Option<f64> {
    let stride = (image.points.len() / 1024).max(1);
    let mut zs: Vec<f64> = image.points.iter().step_by(stride).filter(|p| p.is_valid()).map(|p| p.z).collect();
    if zs.is_empty() {
        zs = image.valid_points().map(|p| p.z).collect();
    }
    if zs.is_empty() {
        return None;
    }
    let mid = zs.len() / 2;
    let (_, m, _) = zs.select_nth_unstable_by(mid, f64::total_cmp);
    Some(*m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elevmap::MapConfig;
    use crate::simworld::RangePoint;

    #[test]
    fn rejections_are_counted() {
        let mut map = PyramidMap::new(MapConfig::default()).unwrap();
        let pose = CameraPose::nadir(0.0, [0.0, 0.0, 5.0]);
        let mut image = RangeImage::new_invalid(4, 1);
        image.points[1] = RangePoint { x: 0.1, y: 0.1, z: 6.0, variance: 0.01 };
        image.points[2] = RangePoint { x: 100.0, y: 0.1, z: 0.0, variance: 0.01 };
        image.points[3] = RangePoint { x: 0.1, y: 0.1, z: 0.0, variance: 0.01 };
        let s = fuse_range_image(&mut map, &image, &pose, &CameraModel::default());
        assert_eq!(s.rejected_invalid, 1);
        assert_eq!(s.rejected_footprint, 1);
        assert_eq!(s.rejected_outside, 1);
        assert_eq!(s.fused_points, 1);
        assert_eq!(s.updated_cells, vec![1, 1, 1]);
    }
}
