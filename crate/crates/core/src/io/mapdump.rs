//! Map dumps: `header.json` plus one `layer_<l>.csv` per layer listing the
//! observed cells, and optional 16-bit height images.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pgm::{encode_pgm16, encode_pgm8, to_image_rows};
use crate::detector::MapSnapshot;
use crate::elevmap::{CellState, MapConfig, PyramidMap};
use crate::{Error, Result};

const FORMAT: &str = "pyramid-map/1";
const CSV_HEADER: &str = "row,col,value,variance,observation_count,last_update";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    config: MapConfig,
    /// Global finest-cell index of the map corner.
    origin_index: [i64; 2],
    /// World coordinates of the map corner, meters.
    origin: [f64; 2],
    roll_offset: [usize; 2],
}

/// Writes `header.json` and `layer_<l>.csv` into `dir`, creating it if needed.
pub fn save_map(dir: &Path, map: &PyramidMap) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = Header {
        format: FORMAT.into(),
        config: *map.config(),
        origin_index: map.origin_index(),
        origin: map.origin(),
        roll_offset: map.roll_offset(),
    };
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    let path = dir.join("header.json");
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    for level in 1..=map.depth() {
        let n = map.config().cells(level);
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for row in 0..n {
            for col in 0..n {
                if let Some(c) = map.cell(level, col, row)? {
                    writeln!(
                        csv,
                        "{row},{col},{},{},{},{}",
                        c.value, c.variance, c.observation_count, c.last_update
                    )
                    .expect("writing to a String");
                }
            }
        }
        let path = dir.join(format!("layer_{level}.csv"));
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Inverse of [`save_map`].
pub fn load_map(dir: &Path) -> Result<PyramidMap> {
    let path = dir.join("header.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let header: Header = serde_json::from_str(&text).map_err(|e| Error::format("map header", e.to_string()))?;
    if header.format != FORMAT {
        return Err(Error::format("map header", format!("unsupported format {:?}", header.format)));
    }
    let mut map = PyramidMap::with_origin(header.config, header.origin_index)?;
    for level in 1..=header.config.depth {
        let path = dir.join(format!("layer_{level}.csv"));
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(CSV_HEADER) {
            return Err(Error::format("map layer", format!("{}: unexpected header", path.display())));
        }
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |detail: String| Error::format("map layer", format!("{} line {}: {detail}", path.display(), i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields".into()));
            }
            let row: usize = f[0].parse().map_err(|e| bad(format!("{e}")))?;
            let col: usize = f[1].parse().map_err(|e| bad(format!("{e}")))?;
            let state = CellState {
                value: f[2].parse().map_err(|e| bad(format!("{e}")))?,
                variance: f[3].parse().map_err(|e| bad(format!("{e}")))?,
                observation_count: f[4].parse().map_err(|e| bad(format!("{e}")))?,
                last_update: f[5].parse().map_err(|e| bad(format!("{e}")))?,
            };
            map.set_cell(level, col, row, state).map_err(|e| bad(e.to_string()))?;
        }
    }
    Ok(map)
}

/// Writes `layer_<l>.pgm` (reconstructed height, 16 bit) and
/// `layer_<l>_mask.pgm` (255 where observed) for every level.
pub fn write_layer_images(dir: &Path, snap: &MapSnapshot) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for level in 1..=snap.depth() {
        let grid = snap.level(level);
        let (lo, hi) = grid
            .heights
            .iter()
            .filter(|h| !h.is_nan())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &h| (a.min(h), b.max(h)));
        let span = if hi > lo { hi - lo } else { 0.0 };
        let px: Vec<u16> = grid
            .heights
            .iter()
            .map(|&h| {
                if h.is_nan() {
                    0
                } else if span == 0.0 {
                    1
                } else {
                    1 + ((h - lo) / span * 65534.0).round() as u16
                }
            })
            .collect();
        let mask: Vec<u8> = grid.heights.iter().map(|h| if h.is_nan() { 0 } else { 255 }).collect();
        let comment = if lo.is_finite() {
            format!("height_m = {lo} + (pixel - 1) * {} ; pixel 0 = no data", span / 65534.0)
        } else {
            "empty layer; pixel 0 = no data".to_string()
        };
        let n = grid.cells;
        let path = dir.join(format!("layer_{level}.pgm"));
        std::fs::write(&path, encode_pgm16(n, n, &to_image_rows(n, &px), Some(&comment)))
            .map_err(|e| Error::io(&path, e))?;
        let path = dir.join(format!("layer_{level}_mask.pgm"));
        std::fs::write(&path, encode_pgm8(n, n, &to_image_rows(n, &mask), Some("255 = observed")))
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
