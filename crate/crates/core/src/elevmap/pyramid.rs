//! Rolling Laplacian-pyramid storage.
//!
//! Every layer is a ring buffer addressed by global cell index modulo the
//! layer size, so moving the map only changes `origin` and clears the cells
//! that enter the window. Cell fields are kept in separate arrays per layer.

use super::config::{CellState, MapConfig};
use super::kalman::fuse;
use crate::{Error, Result};

/// Map translation in finest cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MapShift {
    pub dx: i64,
    pub dy: i64,
}

impl MapShift {
    pub fn is_zero(&self) -> bool {
        self.dx == 0 && self.dy == 0
    }

    pub fn inverse(&self) -> MapShift {
        MapShift {
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Layer {
    pub(crate) n: usize,
    pub(crate) value: Vec<f64>,
    pub(crate) variance: Vec<f64>,
    pub(crate) count: Vec<u16>,
    pub(crate) last_update: Vec<f32>,
    touched: Vec<u64>,
    touched_count: usize,
}

impl Layer {
    fn new(n: usize) -> Self {
        let cells = n * n;
        Layer {
            n,
            value: vec![0.0; cells],
            variance: vec![0.0; cells],
            count: vec![0; cells],
            last_update: vec![0.0; cells],
            touched: vec![0; cells.div_ceil(64)],
            touched_count: 0,
        }
    }

    fn reset(&mut self, slot: usize) {
        self.value[slot] = 0.0;
        self.variance[slot] = 0.0;
        self.count[slot] = 0;
        self.last_update[slot] = 0.0;
    }

    #[inline]
    fn mark(&mut self, slot: usize) {
        let (w, b) = (slot / 64, 1u64 << (slot % 64));
        if self.touched[w] & b == 0 {
            self.touched[w] |= b;
            self.touched_count += 1;
        }
    }

    #[inline]
    fn update(&mut self, slot: usize, z: f64, var: f64, t: f32) {
        if self.count[slot] == 0 {
            self.value[slot] = z;
            self.variance[slot] = var;
        } else {
            let (h, v) = fuse(self.value[slot], self.variance[slot], z, var);
            self.value[slot] = h;
            self.variance[slot] = v;
        }
        self.count[slot] = self.count[slot].saturating_add(1);
        self.last_update[slot] = t;
        self.mark(slot);
    }

    fn state(&self, slot: usize) -> Option<CellState> {
        (self.count[slot] > 0).then(|| CellState {
            value: self.value[slot],
            variance: self.variance[slot],
            observation_count: u32::from(self.count[slot]),
            last_update: f64::from(self.last_update[slot]),
        })
    }
}

/// Height reconstructed from the pyramid, with the deepest layer that contributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub height: f64,
    pub resolved_level: usize,
}

/// Robot-centric multi-resolution elevation map.
#[derive(Debug, Clone)]
pub struct PyramidMap {
    config: MapConfig,
    layers: Vec<Layer>,
    /// Global finest index of the lower-left cell; a multiple of `2^(depth-1)`.
    origin: [i64; 2],
}

impl PyramidMap {
    /// Empty map centred on the world origin.
    pub fn new(config: MapConfig) -> Result<Self> {
        Self::centered_at(config, [0.0, 0.0])
    }

    pub fn centered_at(config: MapConfig, center: [f64; 2]) -> Result<Self> {
        config.validate()?;
        let layers = (1..=config.depth).map(|l| Layer::new(config.cells(l))).collect();
        let mut map = PyramidMap {
            config,
            layers,
            origin: [0, 0],
        };
        map.origin = map.aligned_origin_for(center);
        Ok(map)
    }

    /// Empty map with an explicit (aligned) origin, used when loading dumps.
    pub fn with_origin(config: MapConfig, origin: [i64; 2]) -> Result<Self> {
        config.validate()?;
        let s = config.coarse_factor() as i64;
        if origin[0].rem_euclid(s) != 0 || origin[1].rem_euclid(s) != 0 {
            return Err(Error::config(format!("map origin must be a multiple of {s} finest cells")));
        }
        let layers = (1..=config.depth).map(|l| Layer::new(config.cells(l))).collect();
        Ok(PyramidMap { config, layers, origin })
    }

    pub fn config(&self) -> &MapConfig {
        &self.config
    }

    pub fn depth(&self) -> usize {
        self.config.depth
    }

    /// Global finest-cell index of the map corner.
    pub fn origin_index(&self) -> [i64; 2] {
        self.origin
    }

    /// World coordinates of the map corner.
    pub fn origin(&self) -> [f64; 2] {
        self.origin.map(|o| o as f64 * self.config.finest_resolution)
    }

    /// Ring-buffer offset of the corner cell in the finest layer.
    pub fn roll_offset(&self) -> [usize; 2] {
        let n = self.config.extent_cells as i64;
        self.origin.map(|o| o.rem_euclid(n) as usize)
    }

    /// World bounds `(min, max)` of the map window.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let lo = self.origin();
        let e = self.config.extent_m();
        (lo, [lo[0] + e, lo[1] + e])
    }

    fn aligned_origin_for(&self, center: [f64; 2]) -> [i64; 2] {
        let s = self.config.coarse_factor() as i64;
        let half = self.config.extent_cells as i64 / 2;
        center.map(|c| {
            let raw = (c / self.config.finest_resolution).floor() as i64 - half;
            (raw + s / 2).div_euclid(s) * s
        })
    }

    /// Global finest index of the cell containing world point `(x, y)`.
    #[inline]
    pub fn global_index(&self, x: f64, y: f64) -> [i64; 2] {
        let r = self.config.finest_resolution;
        [(x / r).floor() as i64, (y / r).floor() as i64]
    }

    #[inline]
    pub fn contains_index(&self, g: [i64; 2]) -> bool {
        let n = self.config.extent_cells as i64;
        g[0] >= self.origin[0] && g[0] < self.origin[0] + n && g[1] >= self.origin[1] && g[1] < self.origin[1] + n
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.is_finite() && y.is_finite() && self.contains_index(self.global_index(x, y))
    }

    /// Storage slot at `level` of the finest-layer global index `g`.
    #[inline]
    fn slot(&self, level: usize, g: [i64; 2]) -> usize {
        let layer = &self.layers[level - 1];
        let shift = self.config.depth - level;
        let n = layer.n as i64;
        let sx = (g[0] >> shift).rem_euclid(n) as usize;
        let sy = (g[1] >> shift).rem_euclid(n) as usize;
        sy * layer.n + sx
    }

    /// Storage slot for local indices `(col, row)` of `level`.
    #[inline]
    fn local_slot(&self, level: usize, col: usize, row: usize) -> usize {
        let layer = &self.layers[level - 1];
        let shift = self.config.depth - level;
        let n = layer.n as i64;
        let sx = ((self.origin[0] >> shift) + col as i64).rem_euclid(n) as usize;
        let sy = ((self.origin[1] >> shift) + row as i64).rem_euclid(n) as usize;
        sy * layer.n + sx
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.config.depth {
            return Err(Error::LayerOutOfRange {
                layer: level,
                depth: self.config.depth,
            });
        }
        Ok(())
    }

    /// Cell at local column/row of `level` (row 0 is the minimum-y edge).
    pub fn cell(&self, level: usize, col: usize, row: usize) -> Result<Option<CellState>> {
        self.check_level(level)?;
        let n = self.config.cells(level);
        if col >= n || row >= n {
            return Err(Error::config(format!("cell ({col}, {row}) outside {n}x{n} layer")));
        }
        Ok(self.layers[level - 1].state(self.local_slot(level, col, row)))
    }

    pub(crate) fn set_cell(&mut self, level: usize, col: usize, row: usize, state: CellState) -> Result<()> {
        self.check_level(level)?;
        let n = self.config.cells(level);
        if col >= n || row >= n {
            return Err(Error::config(format!("cell ({col}, {row}) outside {n}x{n} layer")));
        }
        if !(state.variance > 0.0) || state.observation_count == 0 || !state.value.is_finite() {
            return Err(Error::config("stored cells need a finite value, positive variance and count"));
        }
        let slot = self.local_slot(level, col, row);
        let layer = &mut self.layers[level - 1];
        layer.value[slot] = state.value;
        layer.variance[slot] = state.variance;
        layer.count[slot] = state.observation_count.min(u32::from(u16::MAX)) as u16;
        layer.last_update[slot] = state.last_update as f32;
        Ok(())
    }

    /// Cell of `level` containing world point `(x, y)`.
    pub fn cell_at(&self, x: f64, y: f64, level: usize) -> Result<Option<CellState>> {
        self.check_level(level)?;
        let g = self.index_checked(x, y)?;
        Ok(self.layers[level - 1].state(self.slot(level, g)))
    }

    fn index_checked(&self, x: f64, y: f64) -> Result<[i64; 2]> {
        if !self.contains(x, y) {
            return Err(Error::OutsideMap { x, y });
        }
        Ok(self.global_index(x, y))
    }

    /// Height at `level`: layer-1 value plus the residuals of layers 2..=level.
    /// Unobserved residual layers contribute nothing; `None` if layer 1 is unobserved.
    pub fn reconstruct_height(&self, x: f64, y: f64, level: usize) -> Result<Option<Reconstruction>> {
        self.check_level(level)?;
        let g = self.index_checked(x, y)?;
        Ok(self.reconstruct_index(g, level))
    }

    pub(crate) fn reconstruct_index(&self, g: [i64; 2], level: usize) -> Option<Reconstruction> {
        let first = self.slot(1, g);
        if self.layers[0].count[first] == 0 {
            return None;
        }
        let mut h = self.layers[0].value[first];
        let mut resolved = 1;
        for k in 2..=level {
            let s = self.slot(k, g);
            let layer = &self.layers[k - 1];
            if layer.count[s] > 0 {
                h += layer.value[s];
                resolved = k;
            }
        }
        Some(Reconstruction {
            height: h,
            resolved_level: resolved,
        })
    }

    /// Variance of the deepest observed layer up to `level`.
    pub fn reconstruct_variance(&self, x: f64, y: f64, level: usize) -> Result<Option<f64>> {
        self.check_level(level)?;
        let g = self.index_checked(x, y)?;
        let mut var = None;
        for k in 1..=level {
            let s = self.slot(k, g);
            let layer = &self.layers[k - 1];
            if layer.count[s] > 0 {
                var = Some(layer.variance[s]);
            } else if k == 1 {
                return Ok(None);
            }
        }
        Ok(var)
    }

    /// Fuses one measurement coarse to fine down to `level`.
    pub fn fuse_point(&mut self, x: f64, y: f64, z: f64, variance: f64, level: usize, timestamp: f64) -> Result<()> {
        self.check_level(level)?;
        if !(variance > 0.0 && variance.is_finite()) || !z.is_finite() {
            return Err(Error::NonPositiveVariance {
                prior: f64::NAN,
                measurement: variance,
            });
        }
        let g = self.index_checked(x, y)?;
        self.fuse_index(g, z, variance, level, timestamp as f32);
        Ok(())
    }

    /// Layer 1 receives the absolute height; each deeper layer receives the
    /// residual against the reconstruction through the layer above, taken
    /// after that layer has absorbed the same measurement.
    #[inline]
    pub(crate) fn fuse_index(&mut self, g: [i64; 2], z: f64, variance: f64, level: usize, t: f32) {
        let mut h = 0.0;
        for k in 1..=level {
            let s = self.slot(k, g);
            let layer = &mut self.layers[k - 1];
            layer.update(s, z - h, variance, t);
            h += layer.value[s];
        }
    }

    pub(crate) fn clear_touched(&mut self) {
        for layer in &mut self.layers {
            layer.touched.fill(0);
            layer.touched_count = 0;
        }
    }

    pub(crate) fn touched_counts(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.touched_count).collect()
    }

    /// Moves the map so that it is centred on `center` if the rectangle
    /// `center ± half_extent`, padded by one coarse cell, leaves the window.
    pub fn recenter(&mut self, center: [f64; 2], half_extent: [f64; 2]) -> MapShift {
        if !(center[0].is_finite() && center[1].is_finite()) {
            return MapShift::default();
        }
        let margin = self.config.resolution(1);
        let (lo, hi) = self.bounds();
        let inside = (0..2).all(|k| {
            center[k] - half_extent[k] - margin >= lo[k] && center[k] + half_extent[k] + margin <= hi[k]
        });
        if inside {
            return MapShift::default();
        }
        let target = self.aligned_origin_for(center);
        let shift = MapShift {
            dx: target[0] - self.origin[0],
            dy: target[1] - self.origin[1],
        };
        self.shift(shift).expect("aligned shift");
        shift
    }

    /// Translates the window by `shift` finest cells. Cells that stay inside
    /// keep their state untouched; cells entering the window start empty.
    pub fn shift(&mut self, shift: MapShift) -> Result<()> {
        let s = self.config.coarse_factor() as i64;
        if shift.dx.rem_euclid(s) != 0 || shift.dy.rem_euclid(s) != 0 {
            return Err(Error::config(format!("map shifts must be multiples of {s} finest cells")));
        }
        if shift.is_zero() {
            return Ok(());
        }
        let depth = self.config.depth;
        for level in 1..=depth {
            let k = depth - level;
            let layer = &mut self.layers[level - 1];
            let n = layer.n as i64;
            let o = [self.origin[0] >> k, self.origin[1] >> k];
            let d = [shift.dx >> k, shift.dy >> k];
            for axis in 0..2 {
                for g in entering(o[axis], d[axis], n) {
                    let line = g.rem_euclid(n) as usize;
                    for other in 0..layer.n {
                        let slot = if axis == 0 {
                            other * layer.n + line
                        } else {
                            line * layer.n + other
                        };
                        layer.reset(slot);
                    }
                }
            }
        }
        self.origin[0] += shift.dx;
        self.origin[1] += shift.dy;
        Ok(())
    }

    /// Cells allocated over all layers.
    pub fn allocated_cells(&self) -> usize {
        self.layers.iter().map(|l| l.value.len()).sum()
    }

    /// Bytes of per-cell state (height, variance, count, timestamp).
    pub fn payload_bytes(&self) -> usize {
        self.layers
            .iter()
            .map(|l| {
                l.value.len() * size_of::<f64>()
                    + l.variance.len() * size_of::<f64>()
                    + l.count.len() * size_of::<u16>()
                    + l.last_update.len() * size_of::<f32>()
            })
            .sum()
    }

    /// Observed cells in `level`.
    pub fn observed_cells(&self, level: usize) -> usize {
        self.layers[level - 1].count.iter().filter(|&&c| c > 0).count()
    }
}

/// Global indices entering a window `[o, o + n)` moved by `d`.
fn entering(o: i64, d: i64, n: i64) -> std::ops::Range<i64> {
    if d >= n || d <= -n {
        // Everything is new; any n consecutive indices cover every slot.
        return o + d..o + d + n;
    }
    if d > 0 {
        o + n..o + n + d
    } else {
        o + d..o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small() -> PyramidMap {
        PyramidMap::centered_at(
            MapConfig {
                depth: 3,
                finest_resolution: 0.1,
                extent_cells: 16,
                disparity_error_px: 0.25,
            },
            [0.8, 0.8],
        )
        .unwrap()
    }

    #[test]
    fn reconstruction_sums_layers() {
        let mut m = small();
        let (x, y) = (0.35, 0.45);
        m.fuse_point(x, y, 10.0, 1e-12, 1, 0.0).unwrap();
        let g = m.global_index(x, y);
        let s2 = m.slot(2, g);
        let s3 = m.slot(3, g);
        m.layers[1].update(s2, 0.5, 1.0, 0.0);
        m.layers[2].update(s3, -0.2, 1.0, 0.0);
        assert_eq!(m.reconstruct_height(x, y, 1).unwrap().unwrap().height, 10.0);
        let r = m.reconstruct_height(x, y, 3).unwrap().unwrap();
        assert_abs_diff_eq!(r.height, 10.3, epsilon = 1e-12);
        assert_eq!(r.resolved_level, 3);
        assert!(m.reconstruct_height(1.5, 1.5, 3).unwrap().is_none());
        assert!(matches!(m.reconstruct_height(-5.0, 0.0, 1), Err(Error::OutsideMap { .. })));
    }

    #[test]
    fn residual_against_updated_base() {
        let mut m = small();
        m.fuse_point(0.35, 0.45, 10.0, 1e-12, 1, 0.0).unwrap();
        m.fuse_point(0.35, 0.45, 10.3, 0.01, 2, 1.0).unwrap();
        let r2 = m.cell_at(0.35, 0.45, 2).unwrap().unwrap();
        assert_abs_diff_eq!(r2.value, 0.3, epsilon = 1e-9);
        assert_eq!(r2.observation_count, 1);
        assert!(m.cell_at(0.35, 0.45, 3).unwrap().is_none());
    }

    #[test]
    fn variance_after_repeated_updates() {
        let mut m = small();
        m.fuse_point(0.35, 0.45, 1.0, 0.01, 1, 0.0).unwrap();
        assert_eq!(m.reconstruct_variance(0.35, 0.45, 1).unwrap(), Some(0.01));
        for _ in 1..8 {
            m.fuse_point(0.35, 0.45, 1.0, 0.01, 1, 0.0).unwrap();
        }
        assert_abs_diff_eq!(m.reconstruct_variance(0.35, 0.45, 1).unwrap().unwrap(), 0.01 / 8.0, epsilon = 1e-15);
        assert_eq!(m.reconstruct_variance(1.5, 1.5, 2).unwrap(), None);
    }

    #[test]
    fn recenter_within_bounds_is_noop() {
        let mut m = small();
        assert_eq!(m.recenter([0.8, 0.8], [0.2, 0.2]), MapShift::default());
    }

    #[test]
    fn full_shift_clears_everything() {
        let mut m = small();
        m.fuse_point(0.35, 0.45, 1.0, 0.01, 3, 0.0).unwrap();
        m.shift(MapShift { dx: 16, dy: 0 }).unwrap();
        m.shift(MapShift { dx: -16, dy: 0 }).unwrap();
        for l in 1..=3 {
            assert_eq!(m.observed_cells(l), 0);
        }
        assert!(m.shift(MapShift { dx: 2, dy: 0 }).is_err());
    }

    #[test]
    fn memory_is_four_thirds() {
        let m = PyramidMap::new(MapConfig {
            extent_cells: 256,
            ..MapConfig::default()
        })
        .unwrap();
        let ratio = m.allocated_cells() as f64 / (256.0 * 256.0);
        assert!(ratio <= 4.0 / 3.0 + 0.01);
    }
}
