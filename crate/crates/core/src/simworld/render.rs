//! Ray-cast range image synthesis with a disparity-space stereo noise model.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::camera::{CameraModel, CameraPose};
use super::terrain::TerrainModel;
use crate::elevmap::measurement_variance;
use crate::{Error, Result};

/// One world-frame range measurement with its height variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub variance: f64,
}

impl RangePoint {
    pub const INVALID: RangePoint = RangePoint {
        x: f64::NAN,
        y: f64::NAN,
        z: f64::NAN,
        variance: f64::NAN,
    };

    #[inline]
    pub fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.variance.is_finite()
    }
}

/// Row-major grid of range points; invalid pixels hold [`RangePoint::INVALID`].
#[derive(Debug, Clone, PartialEq)]
pub struct RangeImage {
    pub width: u32,
    pub height: u32,
    pub points: Vec<RangePoint>,
}

impl RangeImage {
    pub fn new_invalid(width: u32, height: u32) -> Self {
        RangeImage {
            width,
            height,
            points: vec![RangePoint::INVALID; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> &RangePoint {
        &self.points[v as usize * self.width as usize + u as usize]
    }

    pub fn valid_points(&self) -> impl Iterator<Item = &RangePoint> {
        self.points.iter().filter(|p| p.is_valid())
    }

    pub fn valid_count(&self) -> usize {
        self.valid_points().count()
    }
}

/// Rendering knobs that do not belong to the physical camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderOptions {
    /// Disparity error (three sigma, pixels) assumed when attaching variances.
    /// Independent of the injected noise so that noiseless renders still carry
    /// a usable uncertainty.
    pub assumed_disparity_error_px: f64,
    /// Ray-marching step in meters before bisection refines a crossing.
    pub march_step: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            assumed_disparity_error_px: 0.25,
            march_step: 0.03,
        }
    }
}

impl RenderOptions {
    /// Marches at half the finest map cell.
    pub fn for_resolution(finest_resolution: f64, assumed_disparity_error_px: f64) -> Self {
        RenderOptions {
            assumed_disparity_error_px,
            march_step: finest_resolution / 2.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.assumed_disparity_error_px > 0.0 && self.assumed_disparity_error_px.is_finite()) {
            return Err(Error::config("assumed disparity error must be positive"));
        }
        if !(self.march_step > 0.0 && self.march_step.is_finite()) {
            return Err(Error::config("march_step must be positive"));
        }
        Ok(())
    }
}

const SURFACE_TOL: f64 = 1e-7;
const BAND_SLACK: f64 = 1e-9;

/// First intersection of the ray `o + t d` with the terrain, or `None` if the
/// ray leaves the extent first. `t` is in units of `d`.
pub(crate) fn cast_ray(terrain: &TerrainModel, o: &Vector3<f64>, d: &Vector3<f64>, step: f64) -> Option<f64> {
    let [gx, gy] = terrain.plane_gradient();
    // Height of the ray above the base plane is linear in t.
    let g0 = o.z - gx * o.x - gy * o.y;
    let g1 = d.z - gx * d.x - gy * d.y;
    if g1 >= 0.0 {
        return None;
    }
    let (_, hi_global) = terrain.residual_bounds();
    let cliff = terrain.cliff();
    let upper = |x: f64| match cliff {
        Some(c) if x > c.edge_x => hi_global - c.drop,
        _ => hi_global,
    };
    let f = |t: f64| {
        let x = o.x + t * d.x;
        let y = o.y + t * d.y;
        g0 + g1 * t - terrain.residual_unchecked(x, y)
    };
    let dt = step / d.norm();

    let mut t = 0.0f64;
    let mut last_above: Option<f64> = None;
    loop {
        let x = o.x + t * d.x;
        let y = o.y + t * d.y;
        if !terrain.contains(x, y) {
            return None;
        }
        let hi = upper(x);
        let g = g0 + g1 * t;
        if g > hi + BAND_SLACK {
            // Nothing on this side of the cliff reaches the ray before it
            // descends to the residual band or crosses the edge.
            let mut next = (hi - g0) / g1;
            if let Some(c) = cliff {
                if d.x != 0.0 {
                    let ts = (c.edge_x - o.x) / d.x + 1e-9;
                    if ts > t && ts < next {
                        next = ts;
                    }
                }
            }
            t = next.max(t + 1e-12);
            last_above = None;
            continue;
        }
        let fv = f(t);
        if fv <= 0.0 {
            return Some(match last_above {
                Some(ta) => bisect(&f, ta, t),
                None => t,
            });
        }
        last_above = Some(t);
        t += dt;
    }
}

/// Refines a bracketed crossing with the Illinois variant of false position,
/// falling back to halving whenever the secant step stalls.
fn bisect(f: &impl Fn(f64) -> f64, mut above: f64, mut below: f64) -> f64 {
    let mut fa = f(above);
    let mut fb = f(below);
    let mut side = 0i8;
    for _ in 0..100 {
        let mut mid = (above * fb - below * fa) / (fb - fa);
        if !(mid > above && mid < below) {
            mid = 0.5 * (above + below);
        }
        let fm = f(mid);
        if fm.abs() <= SURFACE_TOL {
            return mid;
        }
        if fm > 0.0 {
            above = mid;
            fa = fm;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            below = mid;
            fb = fm;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if below - above <= 1e-14 * below.max(1.0) {
            break;
        }
    }
    below
}

/// Renders one range image. Each image row draws its noise from an independent
/// ChaCha stream so the result does not depend on traversal order.
pub fn render_range_image(
    terrain: &TerrainModel,
    pose: &CameraPose,
    camera: &CameraModel,
    noise_seed: u64,
    options: &RenderOptions,
) -> Result<RangeImage> {
    camera.validate()?;
    options.validate()?;
    let o = pose.position;
    let ground = terrain.height_unchecked(o.x, o.y);
    if !(o.z > ground) {
        return Err(Error::CameraBelowSurface { x: o.x, y: o.y, z: o.z });
    }
    let baseline = camera.baseline(o.z - ground);
    let focal = camera.focal_px();
    let bf = baseline * focal;
    let sigma_d = camera.disparity_sigma();
    let rot = pose.orientation.to_rotation_matrix();

    let (w, h) = (camera.image_width, camera.image_height);
    let mut image = RangeImage::new_invalid(w, h);
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    for v in 0..h {
        rng.set_stream(u64::from(v));
        rng.set_word_pos(0);
        for u in 0..w {
            let noise: f64 = StandardNormal.sample(&mut rng);
            let d = rot * camera.ray(u, v);
            let Some(t) = cast_ray(terrain, &o, &d, options.march_step) else {
                continue;
            };
            let depth = if sigma_d > 0.0 {
                let disparity = bf / t + sigma_d * noise;
                if disparity <= 0.0 {
                    continue;
                }
                bf / disparity
            } else {
                t
            };
            let p = o + d * depth;
            // Depth error maps to height error through the vertical component
            // of the unit-depth ray.
            let var = measurement_variance(depth, baseline, focal, options.assumed_disparity_error_px)?;
            image.points[v as usize * w as usize + u as usize] = RangePoint {
                x: p.x,
                y: p.y,
                z: p.z,
                variance: var * d.z * d.z,
            };
        }
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simworld::{generate_terrain, Cliff, TerrainSpec};
    use approx::assert_abs_diff_eq;

    fn noiseless() -> CameraModel {
        CameraModel {
            image_width: 64,
            image_height: 48,
            disparity_noise_3sigma: 0.0,
            ..CameraModel::default()
        }
    }

    #[test]
    fn flat_center_pixel_is_below_camera() {
        let t = generate_terrain(&TerrainSpec::flat([20.0, 20.0])).unwrap();
        let pose = CameraPose::nadir(0.0, [10.0, 10.0, 5.0]);
        let img = render_range_image(&t, &pose, &noiseless(), 1, &RenderOptions::default()).unwrap();
        let p = img.get(32, 24);
        assert_abs_diff_eq!(p.x, 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.y, 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn camera_below_ground_is_rejected() {
        let spec = TerrainSpec {
            slope_deg: 20.0,
            ..TerrainSpec::flat([20.0, 20.0])
        };
        let t = generate_terrain(&spec).unwrap();
        let pose = CameraPose::nadir(0.0, [15.0, 10.0, 1.0]);
        assert!(matches!(
            render_range_image(&t, &pose, &noiseless(), 1, &RenderOptions::default()),
            Err(Error::CameraBelowSurface { .. })
        ));
    }

    #[test]
    fn rays_leaving_the_extent_are_invalid() {
        let t = generate_terrain(&TerrainSpec::flat([4.0, 4.0])).unwrap();
        let pose = CameraPose::nadir(0.0, [2.0, 2.0, 5.0]);
        let img = render_range_image(&t, &pose, &noiseless(), 1, &RenderOptions::default()).unwrap();
        assert!(!img.get(0, 0).is_valid());
        assert!(img.get(32, 24).is_valid());
    }

    #[test]
    fn cliff_produces_two_depth_populations() {
        let spec = TerrainSpec {
            cliff: Some(Cliff { edge_x: 10.0, drop: 5.0 }),
            ..TerrainSpec::flat([20.0, 20.0])
        };
        let t = generate_terrain(&spec).unwrap();
        let pose = CameraPose::nadir(0.0, [9.0, 10.0, 5.0]);
        let img = render_range_image(&t, &pose, &noiseless(), 1, &RenderOptions::default()).unwrap();
        let mut high = 0;
        let mut low = 0;
        for p in img.valid_points() {
            if p.z.abs() < 1e-6 {
                high += 1;
            } else if (p.z + 5.0).abs() < 1e-6 {
                low += 1;
            }
        }
        assert!(high > 100 && low > 100, "high {high} low {low}");
    }
}
