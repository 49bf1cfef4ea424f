use super::candidates::rank_candidates;
use super::edt::squared_edt;
use super::plane::{axis_range, fit_plane, roughness, PlaneFit};
use super::snapshot::MapSnapshot;
use super::{LandingClass, LandingConfig, LandingMap};
use crate::Result;

/// Outcome of the evidence gate for one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    Confident,
    Uncertain,
}

/// Evidence gate: enough observations and a small enough variance.
pub fn confidence(snap: &MapSnapshot, col: usize, row: usize, config: &LandingConfig) -> Confidence {
    let max_var = max_variance(snap, config);
    let ok = snap.observation_count(col, row) >= config.min_observations.max(1) && snap.variance(col, row) <= max_var;
    if ok {
        Confidence::Confident
    } else {
        Confidence::Uncertain
    }
}

fn max_variance(snap: &MapSnapshot, config: &LandingConfig) -> f64 {
    config
        .max_variance
        .unwrap_or_else(|| (2.0 * snap.finest_resolution()).powi(2))
}

/// Metric distance from each cell to the nearest non-safe cell; zero on
/// non-safe cells and infinite when every cell is safe.
pub fn distance_transform(classes: &[LandingClass], width: usize, height: usize, cell_size: f64) -> Vec<f64> {
    squared_edt(width, height, |c, r| classes[r * width + c] != LandingClass::Safe)
        .into_iter()
        .map(|d2| d2.sqrt() * cell_size)
        .collect()
}

/// Classifies every cell, pruning cells from finer layers once they are hazardous.
pub fn detect(snap: &MapSnapshot, config: &LandingConfig) -> Result<LandingMap> {
    run(snap, config, false)
}

/// Reference implementation that evaluates every roughness check at every
/// layer for every cell. Classifies identically to [`detect`].
pub fn detect_exhaustive(snap: &MapSnapshot, config: &LandingConfig) -> Result<LandingMap> {
    run(snap, config, true)
}

fn run(snap: &MapSnapshot, config: &LandingConfig, exhaustive: bool) -> Result<LandingMap> {
    config.validate()?;
    let depth = snap.depth();
    let n = snap.cells();
    let res = snap.finest_resolution();
    let r_safe = config.safe_area_radius();
    let mut class = vec![LandingClass::Safe; n * n];

    // Evidence: unmapped cells, a border band around them, weak cells.
    for (c, h) in class.iter_mut().zip(&snap.finest().heights) {
        if h.is_nan() {
            *c = LandingClass::NoData;
        }
    }
    let pad = n + 2;
    let border_d2 = squared_edt(pad, pad, |c, r| {
        c == 0 || r == 0 || c == pad - 1 || r == pad - 1 || class[(r - 1) * n + c - 1] == LandingClass::NoData
    });
    for row in 0..n {
        for col in 0..n {
            let i = row * n + col;
            if class[i] == LandingClass::NoData {
                continue;
            }
            if border_d2[(row + 1) * pad + col + 1] * res * res <= r_safe * r_safe {
                class[i] = LandingClass::Border;
            } else if confidence(snap, col, row, config) == Confidence::Uncertain {
                class[i] = LandingClass::Unknown;
            }
        }
    }

    // Slope on the coarsest layer, one plane per coarse cell. The fit disc
    // must be wide enough that a single rock cannot tilt the plane towards
    // itself, but it never depends on the safety margin.
    let s = 1usize << (depth - 1);
    let n1 = n / s;
    let res1 = snap.level(1).resolution;
    let fit_radius = config
        .keepout_radius
        .max(config.rock_area_radius)
        .max(std::f64::consts::SQRT_2 * res1 * (1.0 + 1e-9));
    let mut planes: Vec<Option<PlaneFit>> = vec![None; n1 * n1];
    for r1 in 0..n1 {
        for c1 in 0..n1 {
            let block = block_cells(n, s, c1, r1);
            if !block.clone().any(|i| class[i] == LandingClass::Safe) {
                continue;
            }
            let center = [snap.center(1, 0, c1), snap.center(1, 1, r1)];
            let verdict = match fit_plane(snap, center, fit_radius, 1) {
                None => Some(LandingClass::Unknown),
                Some(p) if p.slope_deg > config.max_slope_deg => Some(LandingClass::Hazard),
                Some(p) => {
                    planes[r1 * n1 + c1] = Some(p);
                    None
                }
            };
            if let Some(v) = verdict {
                for i in block {
                    if class[i] == LandingClass::Safe {
                        class[i] = v;
                    }
                }
            }
        }
    }

    // Roughness on the finer layers around each remaining fine cell.
    let levels: Vec<usize> = if depth == 1 { vec![1] } else { (2..=depth).collect() };
    let thr = config.max_roughness_m;
    let r_rock = config.rock_area_radius;
    for r1 in 0..n1 {
        for c1 in 0..n1 {
            let Some(plane) = planes[r1 * n1 + c1] else {
                continue;
            };
            if exhaustive {
                for i in block_cells(n, s, c1, r1) {
                    if class[i] != LandingClass::Safe {
                        continue;
                    }
                    let f = [snap.center(depth, 0, i % n), snap.center(depth, 1, i / n)];
                    let mut hazard = false;
                    for &l in &levels {
                        hazard |= roughness(snap, f, r_rock, l, &plane).value > thr;
                        hazard |= roughness(snap, f, r_safe, l, &plane).value > thr;
                    }
                    if hazard {
                        class[i] = LandingClass::Hazard;
                    }
                }
            } else {
                for &l in &levels {
                    let alive: Vec<usize> = block_cells(n, s, c1, r1)
                        .filter(|&i| class[i] == LandingClass::Safe)
                        .collect();
                    if alive.is_empty() {
                        break;
                    }
                    let exceed = exceeding_cells(snap, l, &plane, thr, c1 * s, r1 * s, s, r_safe);
                    if exceed.is_empty() {
                        continue;
                    }
                    for i in alive {
                        let f = [snap.center(depth, 0, i % n), snap.center(depth, 1, i / n)];
                        if within(&exceed, f, r_rock) || within(&exceed, f, r_safe) {
                            class[i] = LandingClass::Hazard;
                        }
                    }
                }
            }
        }
    }

    let distance = distance_transform(&class, n, n, res);
    let mut map = LandingMap {
        cells: n,
        resolution: res,
        origin: snap.origin(),
        classes: class,
        distance,
        candidates: Vec::new(),
        safe_area_radius: r_safe,
    };
    map.candidates = rank_candidates(&map, config.max_candidates);
    Ok(map)
}

/// Flat indices of the finest cells inside coarse cell `(c1, r1)`.
fn block_cells(n: usize, s: usize, c1: usize, r1: usize) -> impl Iterator<Item = usize> + Clone {
    (r1 * s..(r1 + 1) * s).flat_map(move |row| (c1 * s..(c1 + 1) * s).map(move |col| row * n + col))
}

/// Centres of level-`level` cells deviating from `plane` by more than `thr`
/// that could lie within `radius` of any finest cell of the block.
#[allow(clippy::too_many_arguments)]
fn exceeding_cells(
    snap: &MapSnapshot,
    level: usize,
    plane: &PlaneFit,
    thr: f64,
    col0: usize,
    row0: usize,
    s: usize,
    radius: f64,
) -> Vec<[f64; 2]> {
    let depth = snap.depth();
    let grid = snap.level(level);
    let lo = [snap.center(depth, 0, col0), snap.center(depth, 1, row0)];
    let hi = [snap.center(depth, 0, col0 + s - 1), snap.center(depth, 1, row0 + s - 1)];
    let (c0, c1) = axis_range(snap.origin[0], grid.resolution, grid.cells, 0.5 * (lo[0] + hi[0]), 0.5 * (hi[0] - lo[0]) + radius);
    let (r0, r1) = axis_range(snap.origin[1], grid.resolution, grid.cells, 0.5 * (lo[1] + hi[1]), 0.5 * (hi[1] - lo[1]) + radius);
    let mut out = Vec::new();
    for row in r0..r1 {
        let y = snap.center(level, 1, row);
        for col in c0..c1 {
            let h = grid.heights[row * grid.cells + col];
            if h.is_nan() {
                continue;
            }
            let x = snap.center(level, 0, col);
            if (h - plane.height_at(x, y)).abs() > thr {
                out.push([x, y]);
            }
        }
    }
    out
}

/// Same disc membership test as the roughness operator.
#[inline]
fn within(points: &[[f64; 2]], center: [f64; 2], radius: f64) -> bool {
    let r2 = radius * radius;
    points.iter().any(|p| {
        let dx = p[0] - center[0];
        let dy = p[1] - center[1];
        dx * dx + dy * dy <= r2
    })
}
