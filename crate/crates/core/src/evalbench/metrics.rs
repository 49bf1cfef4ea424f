//! Map accuracy and landing-classification metrics against ground truth.

use serde::{Deserialize, Serialize};

use crate::detector::{LandingClass, LandingMap, MapSnapshot};
use crate::simworld::{Rock, TerrainClass, TerrainModel};

/// Ground-truth labelling rules used for scoring a landing map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalCriteria {
    /// A cell is truly hazardous when its centre is this close to a rock disc
    /// or the cliff edge.
    pub keepout_radius: f64,
    /// Plane inclination above which every cell is truly hazardous.
    pub max_slope_deg: f64,
    /// Only cells centred in `[xmin, ymin, xmax, ymax]` are scored when set.
    pub region: Option<[f64; 4]>,
}

impl Default for EvalCriteria {
    fn default() -> Self {
        EvalCriteria {
            keepout_radius: 0.3,
            max_slope_deg: 10.0,
            region: None,
        }
    }
}

/// Cell and rock counts from which the landing rates derive. Counts from
/// several maps can be pooled with [`LandingMetrics::merge`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LandingMetrics {
    /// Cells that are observed, not in the border band and inside the terrain.
    pub evaluated_cells: usize,
    pub correct_cells: usize,
    pub true_hazard_cells: usize,
    /// Truly hazardous cells classified safe.
    pub false_safe_cells: usize,
    pub rocks_visible: usize,
    pub rocks_detected: usize,
}

impl LandingMetrics {
    /// Correctly segmented cells over evaluated cells.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.correct_cells, self.evaluated_cells)
    }

    /// Rocks whose evaluated covering cells are all non-safe, over visible rocks.
    pub fn detection_rate(&self) -> Option<f64> {
        ratio(self.rocks_detected, self.rocks_visible)
    }

    /// Truly hazardous cells marked safe, over truly hazardous cells.
    pub fn false_positive_rate(&self) -> Option<f64> {
        ratio(self.false_safe_cells, self.true_hazard_cells)
    }

    pub fn merge(&mut self, other: &LandingMetrics) {
        self.evaluated_cells += other.evaluated_cells;
        self.correct_cells += other.correct_cells;
        self.true_hazard_cells += other.true_hazard_cells;
        self.false_safe_cells += other.false_safe_cells;
        self.rocks_visible += other.rocks_visible;
        self.rocks_detected += other.rocks_detected;
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Whether a cell takes part in the evaluation at all.
fn evaluated(class: LandingClass) -> bool {
    !matches!(class, LandingClass::Border | LandingClass::NoData)
}

/// True label of the cell centred at `(x, y)`.
pub fn true_hazard(terrain: &TerrainModel, x: f64, y: f64, criteria: &EvalCriteria) -> bool {
    if terrain.spec().slope_deg > criteria.max_slope_deg {
        return true;
    }
    if let Some(c) = terrain.cliff() {
        if (x - c.edge_x).abs() <= criteria.keepout_radius {
            return true;
        }
    }
    terrain.distance_to_rock(x, y, criteria.keepout_radius).is_some()
}

/// Detection outcome for one rock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RockOutcome {
    pub rock: Rock,
    pub visible: bool,
    pub detected: bool,
}

/// Visibility and detection of every rock that touches the map. A rock is
/// visible when at least one evaluated cell overlaps its disc, and detected
/// when none of those cells is safe.
pub fn rock_outcomes(map: &LandingMap, terrain: &TerrainModel) -> Vec<RockOutcome> {
    let n = map.cells;
    let res = map.resolution;
    let lo = map.origin;
    let hi = [lo[0] + n as f64 * res, lo[1] + n as f64 * res];
    let mut out = Vec::new();
    for rock in terrain.rocks_in_rect(lo, hi) {
        let mut visible = false;
        let mut detected = true;
        let c0 = (((rock.x - rock.radius - lo[0]) / res).floor().max(0.0) as usize).min(n);
        let c1 = (((rock.x + rock.radius - lo[0]) / res).floor() as i64 + 1).clamp(0, n as i64) as usize;
        let r0 = (((rock.y - rock.radius - lo[1]) / res).floor().max(0.0) as usize).min(n);
        let r1 = (((rock.y + rock.radius - lo[1]) / res).floor() as i64 + 1).clamp(0, n as i64) as usize;
        for row in r0..r1 {
            for col in c0..c1 {
                // Nearest point of the cell square to the rock centre.
                let x0 = lo[0] + col as f64 * res;
                let y0 = lo[1] + row as f64 * res;
                let nx = rock.x.clamp(x0, x0 + res);
                let ny = rock.y.clamp(y0, y0 + res);
                if (nx - rock.x).powi(2) + (ny - rock.y).powi(2) >= rock.radius * rock.radius {
                    continue;
                }
                let class = map.class(col, row);
                if !evaluated(class) {
                    continue;
                }
                visible = true;
                if class == LandingClass::Safe {
                    detected = false;
                }
            }
        }
        out.push(RockOutcome {
            rock: *rock,
            visible,
            detected: visible && detected,
        });
    }
    out
}

/// Scores a landing map. Unknown cells count as hazard predictions; border
/// and unobserved cells are ignored.
pub fn landing_metrics(map: &LandingMap, terrain: &TerrainModel, criteria: &EvalCriteria) -> LandingMetrics {
    let mut m = LandingMetrics::default();
    for row in 0..map.cells {
        for col in 0..map.cells {
            let class = map.class(col, row);
            if !evaluated(class) {
                continue;
            }
            let [x, y] = map.cell_center(col, row);
            if !terrain.contains(x, y) {
                continue;
            }
            if let Some([x0, y0, x1, y1]) = criteria.region {
                if !(x >= x0 && x <= x1 && y >= y0 && y <= y1) {
                    continue;
                }
            }
            let truth = true_hazard(terrain, x, y, criteria);
            let predicted = class != LandingClass::Safe;
            m.evaluated_cells += 1;
            if truth == predicted {
                m.correct_cells += 1;
            }
            if truth {
                m.true_hazard_cells += 1;
                if !predicted {
                    m.false_safe_cells += 1;
                }
            }
        }
    }
    for r in rock_outcomes(map, terrain) {
        if r.visible {
            m.rocks_visible += 1;
            if r.detected {
                m.rocks_detected += 1;
            }
        }
    }
    m
}

/// Per-class RMSE of the finest reconstruction; `None` where a class has no cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassRmse {
    pub flat: Option<f64>,
    pub rock: Option<f64>,
    pub cliff: Option<f64>,
    pub total: Option<f64>,
}

impl ClassRmse {
    pub fn get(&self, class: TerrainClass) -> Option<f64> {
        match class {
            TerrainClass::Flat => self.flat,
            TerrainClass::Rock => self.rock,
            TerrainClass::Cliff => self.cliff,
        }
    }
}

/// RMSE over observed finest cells of `class`, comparing the deepest resolved
/// reconstruction with the true height at the cell centre.
pub fn map_rmse(snap: &MapSnapshot, terrain: &TerrainModel, class: TerrainClass) -> Option<f64> {
    rmse_by_class(snap, terrain).get(class)
}

/// All class RMSEs in one pass.
pub fn rmse_by_class(snap: &MapSnapshot, terrain: &TerrainModel) -> ClassRmse {
    let grid = snap.finest();
    let n = grid.cells;
    let depth = snap.depth();
    let mut sum = [0.0f64; 3];
    let mut cnt = [0usize; 3];
    for row in 0..n {
        let y = snap.center(depth, 1, row);
        for col in 0..n {
            let h = grid.heights[row * n + col];
            if h.is_nan() {
                continue;
            }
            let x = snap.center(depth, 0, col);
            let (Ok(truth), Ok(class)) = (terrain.sample_height(x, y), terrain.classify_point(x, y)) else {
                continue;
            };
            let k = class as usize;
            sum[k] += (h - truth).powi(2);
            cnt[k] += 1;
        }
    }
    let rmse = |s: f64, c: usize| (c > 0).then(|| (s / c as f64).sqrt());
    ClassRmse {
        flat: rmse(sum[0], cnt[0]),
        rock: rmse(sum[1], cnt[1]),
        cliff: rmse(sum[2], cnt[2]),
        total: rmse(sum.iter().sum(), cnt.iter().sum()),
    }
}
