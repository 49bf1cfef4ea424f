//! Waypoint flight plans and the frame stream they produce.

use serde::{Deserialize, Serialize};

use super::camera::{CameraAttitude, CameraModel, CameraPose};
use super::derive_seed;
use super::render::{render_range_image, RangeImage, RenderOptions};
use super::terrain::TerrainModel;
use crate::{Error, Result};

/// Piecewise-linear trajectory flown at constant speed, sampled at `frame_rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub waypoints: Vec<[f64; 3]>,
    pub speed: f64,
    pub frame_rate: f64,
    pub attitude: CameraAttitude,
}

impl FlightPlan {
    pub fn straight(start: [f64; 3], end: [f64; 3], speed: f64, frame_rate: f64) -> Self {
        FlightPlan {
            waypoints: vec![start, end],
            speed,
            frame_rate,
            attitude: CameraAttitude::Nadir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::config("a flight plan needs at least two waypoints"));
        }
        if self.waypoints.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::config("waypoints must be finite"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::config("speed must be positive"));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(Error::config("frame_rate must be positive"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| dist(&w[0], &w[1])).sum()
    }

    /// Number of frames: one at t = 0 and one per frame period while airborne.
    pub fn frame_count(&self) -> usize {
        let duration = self.length() / self.speed;
        (duration * self.frame_rate + 1e-9).floor() as usize + 1
    }

    /// Camera poses at `t_i = i / frame_rate`.
    pub fn poses(&self) -> Vec<CameraPose> {
        (0..self.frame_count())
            .map(|i| {
                let t = i as f64 / self.frame_rate;
                CameraPose::new(t, self.position_at(t * self.speed), self.attitude)
            })
            .collect()
    }

    fn position_at(&self, mut s: f64) -> [f64; 3] {
        for w in self.waypoints.windows(2) {
            let len = dist(&w[0], &w[1]);
            if s <= len && len > 0.0 {
                let a = s / len;
                return [0, 1, 2].map(|k| w[0][k] + a * (w[1][k] - w[0][k]));
            }
            s -= len;
        }
        *self.waypoints.last().expect("validated plan")
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// One simulated sensor frame.
#[derive(Debug, Clone)]
pub struct Frame {
    pub index: usize,
    pub pose: CameraPose,
    pub image: RangeImage,
}

/// Lazily renders the frames of `plan` in timestamp order. Frame `i` uses
/// noise seed `derive_seed(seed, i)`, so any frame can be reproduced alone.
pub fn fly<'a>(
    terrain: &'a TerrainModel,
    plan: &FlightPlan,
    camera: &'a CameraModel,
    seed: u64,
    options: &'a RenderOptions,
) -> impl Iterator<Item = Result<Frame>> + 'a {
    let (poses, err) = match plan.validate() {
        Ok(()) => (plan.poses(), None),
        Err(e) => (Vec::new(), Some(e)),
    };
    err.map(Err).into_iter().chain(poses.into_iter().enumerate().map(move |(index, pose)| {
        let image = render_range_image(terrain, &pose, camera, derive_seed(seed, index as u64), options)?;
        Ok(Frame { index, pose, image })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_meters_at_two_hertz() {
        let plan = FlightPlan::straight([0.0, 0.0, 5.0], [10.0, 0.0, 5.0], 1.0, 2.0);
        let poses = plan.poses();
        assert_eq!(poses.len(), 21);
        assert_eq!(poses[20].position.x, 10.0);
        assert!(poses.windows(2).all(|w| w[1].timestamp > w[0].timestamp));
    }

    #[test]
    fn stationary_plan_gives_one_pose() {
        let plan = FlightPlan::straight([1.0, 2.0, 5.0], [1.0, 2.0, 5.0], 1.0, 2.0);
        let poses = plan.poses();
        assert_eq!(poses.len(), 1);
        assert_eq!(poses[0].position.x, 1.0);
    }

    #[test]
    fn polyline_is_followed() {
        let plan = FlightPlan {
            waypoints: vec![[0.0, 0.0, 5.0], [2.0, 0.0, 5.0], [2.0, 2.0, 5.0]],
            speed: 1.0,
            frame_rate: 1.0,
            attitude: CameraAttitude::Nadir,
        };
        let p = plan.poses();
        assert_eq!(p.len(), 5);
        assert_eq!([p[3].position.x, p[3].position.y], [2.0, 1.0]);
    }

    #[test]
    fn invalid_plans_rejected() {
        assert!(FlightPlan::straight([0.0; 3], [1.0, 0.0, 0.0], 0.0, 1.0).validate().is_err());
        let one = FlightPlan {
            waypoints: vec![[0.0; 3]],
            ..FlightPlan::straight([0.0; 3], [0.0; 3], 1.0, 1.0)
        };
        assert!(one.validate().is_err());
    }
}
