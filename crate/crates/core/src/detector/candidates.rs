use serde::Serialize;

use super::{LandingClass, LandingMap};

/// A ranked landing site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub col: usize,
    pub row: usize,
    pub x: f64,
    pub y: f64,
    /// Distance to the nearest non-safe cell, meters.
    pub clearance: f64,
}

/// Local maxima of the distance field with at least one safe-area radius of
/// clearance, thinned so no two candidates are within that radius of each
/// other. Sorted by clearance, ties by row then column.
pub fn rank_candidates(map: &LandingMap, max_count: usize) -> Vec<Candidate> {
    let n = map.cells;
    let r = map.safe_area_radius;
    let mut peaks: Vec<Candidate> = Vec::new();
    for row in 0..n {
        for col in 0..n {
            let i = row * n + col;
            let d = map.distance[i];
            if map.classes[i] != LandingClass::Safe || !(d >= r) {
                continue;
            }
            let mut is_max = true;
            'nb: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (rr, cc) = (row as i64 + dr, col as i64 + dc);
                    if (dr, dc) == (0, 0) || rr < 0 || cc < 0 || rr >= n as i64 || cc >= n as i64 {
                        continue;
                    }
                    if map.distance[rr as usize * n + cc as usize] > d {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                let [x, y] = map.cell_center(col, row);
                peaks.push(Candidate { col, row, x, y, clearance: d });
            }
        }
    }
    peaks.sort_by(|a, b| {
        b.clearance
            .total_cmp(&a.clearance)
            .then(a.row.cmp(&b.row))
            .then(a.col.cmp(&b.col))
    });
    let mut out: Vec<Candidate> = Vec::new();
    for p in peaks {
        if out.len() >= max_count {
            break;
        }
        let clear = out.iter().all(|q| ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt() > r);
        if clear {
            out.push(p);
        }
    }
    out
}
