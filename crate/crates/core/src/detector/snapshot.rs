use crate::elevmap::PyramidMap;

/// Dense reconstruction of one pyramid level in local map coordinates.
/// Row 0 is the minimum-y edge; unobserved cells are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGrid {
    pub cells: usize,
    pub resolution: f64,
    pub heights: Vec<f64>,
}

impl LevelGrid {
    #[inline]
    pub fn height(&self, col: usize, row: usize) -> f64 {
        self.heights[row * self.cells + col]
    }
}

/// Immutable, dense view of a [`PyramidMap`] for the detector.
///
/// Level `l` holds the reconstructed height at that level; residual layers
/// that were never observed inherit the coarser height. At finest resolution
/// the snapshot also keeps the observation count and variance of the deepest
/// observed layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSnapshot {
    pub(crate) origin: [f64; 2],
    pub(crate) levels: Vec<LevelGrid>,
    pub(crate) count: Vec<u32>,
    pub(crate) variance: Vec<f64>,
}

impl MapSnapshot {
    pub fn new(map: &PyramidMap) -> Self {
        let cfg = *map.config();
        let mut levels: Vec<LevelGrid> = Vec::with_capacity(cfg.depth);
        let mut count: Vec<u32> = Vec::new();
        let mut variance: Vec<f64> = Vec::new();
        for level in 1..=cfg.depth {
            let n = cfg.cells(level);
            let mut heights = vec![f64::NAN; n * n];
            let mut cnt = vec![0u32; n * n];
            let mut var = vec![f64::NAN; n * n];
            for row in 0..n {
                for col in 0..n {
                    let i = row * n + col;
                    let own = map.cell(level, col, row).ok().flatten();
                    if level == 1 {
                        if let Some(c) = own {
                            heights[i] = c.value;
                            cnt[i] = c.observation_count;
                            var[i] = c.variance;
                        }
                        continue;
                    }
                    let parent = &levels[level - 2];
                    let p = (row / 2) * parent.cells + col / 2;
                    let base = parent.heights[p];
                    if base.is_nan() {
                        continue;
                    }
                    match own {
                        Some(c) => {
                            heights[i] = base + c.value;
                            cnt[i] = c.observation_count;
                            var[i] = c.variance;
                        }
                        None => {
                            heights[i] = base;
                            cnt[i] = count[p];
                            var[i] = variance[p];
                        }
                    }
                }
            }
            levels.push(LevelGrid {
                cells: n,
                resolution: cfg.resolution(level),
                heights,
            });
            count = cnt;
            variance = var;
        }
        MapSnapshot {
            origin: map.origin(),
            levels,
            count,
            variance,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Cells per side of the finest level.
    pub fn cells(&self) -> usize {
        self.finest().cells
    }

    pub fn finest_resolution(&self) -> f64 {
        self.finest().resolution
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    /// Level `l`, 1-based.
    pub fn level(&self, level: usize) -> &LevelGrid {
        &self.levels[level - 1]
    }

    pub fn finest(&self) -> &LevelGrid {
        self.levels.last().expect("at least one level")
    }

    /// Observation count of the deepest observed layer at a finest cell.
    pub fn observation_count(&self, col: usize, row: usize) -> u32 {
        self.count[row * self.cells() + col]
    }

    /// Variance of the deepest observed layer at a finest cell, NaN if unobserved.
    pub fn variance(&self, col: usize, row: usize) -> f64 {
        self.variance[row * self.cells() + col]
    }

    /// World coordinate of the centre of cell `i` along one axis of `level`.
    #[inline]
    pub fn center(&self, level: usize, axis: usize, i: usize) -> f64 {
        self.origin[axis] + (i as f64 + 0.5) * self.levels[level - 1].resolution
    }
}
