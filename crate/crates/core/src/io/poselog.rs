//! Plain-text pose log, one `timestamp tx ty tz qx qy qz qw` line per frame.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use crate::simworld::CameraPose;
use crate::{Error, Result};

pub fn format_pose_log(poses: &[CameraPose]) -> String {
    let mut s = String::new();
    for p in poses {
        let q = p.orientation.quaternion();
        writeln!(
            s,
            "{} {} {} {} {} {} {} {}",
            p.timestamp, p.position.x, p.position.y, p.position.z, q.i, q.j, q.k, q.w
        )
        .expect("writing to a String");
    }
    s
}

pub fn parse_pose_log(text: &str) -> Result<Vec<CameraPose>> {
    let mut poses = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format("pose log", format!("line {}: {e}", lineno + 1)))?;
        if vals.len() != 8 || vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::format(
                "pose log",
                format!("line {}: expected 8 finite numbers", lineno + 1),
            ));
        }
        let q = Quaternion::new(vals[7], vals[4], vals[5], vals[6]);
        if (q.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::format("pose log", format!("line {}: quaternion is not unit", lineno + 1)));
        }
        poses.push(CameraPose {
            timestamp: vals[0],
            position: Vector3::new(vals[1], vals[2], vals[3]),
            orientation: UnitQuaternion::from_quaternion(q),
        });
    }
    Ok(poses)
}

pub fn write_pose_log(path: &Path, poses: &[CameraPose]) -> Result<()> {
    std::fs::write(path, format_pose_log(poses)).map_err(|e| Error::io(path, e))
}

pub fn read_pose_log(path: &Path) -> Result<Vec<CameraPose>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pose_log(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let poses = vec![
            CameraPose::nadir(0.0, [1.0, 2.0, 5.0]),
            CameraPose::nadir(0.5, [1.1, 2.0, 5.000001]),
        ];
        let back = parse_pose_log(&format_pose_log(&poses)).unwrap();
        assert_eq!(back, poses);
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_pose_log("0 1 2 3 0 0 0").is_err());
        assert!(parse_pose_log("0 1 2 3 0 0 0 2").is_err());
        assert!(parse_pose_log("0 1 2 x 0 0 0 1").is_err());
    }
}
