//! File formats: range images, pose logs, map dumps and images.

mod mapdump;
mod pgm;
mod poselog;
mod rimg;

pub use mapdump::{load_map, save_map, write_layer_images};
pub use pgm::{decode_pgm8, encode_pgm16, encode_pgm8, read_landing_pgm, write_landing_pgm};
pub use poselog::{format_pose_log, parse_pose_log, read_pose_log, write_pose_log};
pub use rimg::{decode_rimg, encode_rimg, read_rimg, write_rimg};

use std::fmt::Write as _;
use std::path::Path;

use crate::detector::Candidate;
use crate::{Error, Result};

/// `rank,world_x,world_y,clearance_m`, rank starting at 1.
pub fn format_candidates_csv(candidates: &[Candidate]) -> String {
    let mut s = String::from("rank,world_x,world_y,clearance_m\n");
    for (i, c) in candidates.iter().enumerate() {
        writeln!(s, "{},{},{},{}", i + 1, c.x, c.y, c.clearance).expect("writing to a String");
    }
    s
}

pub fn write_candidates_csv(path: &Path, candidates: &[Candidate]) -> Result<()> {
    std::fs::write(path, format_candidates_csv(candidates)).map_err(|e| Error::io(path, e))
}
