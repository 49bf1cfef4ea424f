//! Analytic ground-truth terrain: inclined plane, fractal roughness,
//! half-sphere rocks and an optional cliff step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use super::fractal::FractalField;
use crate::{Error, Result};

/// Half-sphere rock resting on the underlying surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rock {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl Rock {
    /// Height of the spherical cap above the ground at `(x, y)`, zero outside the disc.
    #[inline]
    pub fn cap_height(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.x;
        let dy = y - self.y;
        let s = self.radius * self.radius - dx * dx - dy * dy;
        if s > 0.0 {
            s.sqrt()
        } else {
            0.0
        }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.x;
        let dy = y - self.y;
        dx * dx + dy * dy <= self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Vertical step in the terrain: every point with `x > edge_x` is lowered by `drop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cliff {
    pub edge_x: f64,
    pub drop: f64,
}

/// Ground-truth segmentation used for per-class error statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerrainClass {
    Flat,
    Rock,
    Cliff,
}

/// Parameters of a synthetic terrain. The extent spans `[0, extent[0]] x [0, extent[1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TerrainSpec {
    pub seed: u64,
    pub extent: [f64; 2],
    pub slope_deg: f64,
    /// Direction of steepest ascent, degrees counter-clockwise from +x.
    pub slope_azimuth_deg: f64,
    /// RMS of the fractal component in meters.
    pub fractal_amplitude: f64,
    pub fractal_hurst: f64,
    /// Upper bound on the fractal lattice spacing in meters.
    pub fractal_spacing: f64,
    pub rock_diameter: f64,
    pub rock_coverage: f64,
    pub cliff: Option<Cliff>,
    /// Half-width of the band around the cliff edge classified as cliff.
    pub cliff_band: f64,
}

impl Default for TerrainSpec {
    fn default() -> Self {
        TerrainSpec {
            seed: 0,
            extent: [20.0, 20.0],
            slope_deg: 0.0,
            slope_azimuth_deg: 0.0,
            fractal_amplitude: 0.05,
            fractal_hurst: 0.8,
            fractal_spacing: 0.1,
            rock_diameter: 0.3,
            rock_coverage: 0.0,
            cliff: None,
            cliff_band: 0.6,
        }
    }
}

impl TerrainSpec {
    /// Perfectly flat, rock-free ground at height zero.
    pub fn flat(extent: [f64; 2]) -> Self {
        TerrainSpec {
            extent,
            fractal_amplitude: 0.0,
            ..TerrainSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        if !(self.extent[0] > 0.0 && self.extent[1] > 0.0 && finite(self.extent[0]) && finite(self.extent[1])) {
            return Err(Error::config("terrain extent must be positive and finite"));
        }
        if !(0.0..90.0).contains(&self.slope_deg) {
            return Err(Error::config("slope_deg must lie in [0, 90)"));
        }
        if !finite(self.slope_azimuth_deg) {
            return Err(Error::config("slope_azimuth_deg must be finite"));
        }
        if !(self.fractal_amplitude >= 0.0 && finite(self.fractal_amplitude)) {
            return Err(Error::config("fractal_amplitude must be non-negative"));
        }
        if !(self.fractal_hurst > 0.0 && self.fractal_hurst <= 1.0) {
            return Err(Error::config("fractal_hurst must lie in (0, 1]"));
        }
        if !(self.fractal_spacing > 0.0) {
            return Err(Error::config("fractal_spacing must be positive"));
        }
        if !(0.0..0.5).contains(&self.rock_coverage) {
            return Err(Error::config("rock_coverage must lie in [0, 0.5)"));
        }
        if self.rock_coverage > 0.0 && !(self.rock_diameter > 0.0 && finite(self.rock_diameter)) {
            return Err(Error::config("rock_diameter must be positive"));
        }
        if let Some(c) = self.cliff {
            if !(c.drop >= 0.0 && finite(c.drop) && finite(c.edge_x)) {
                return Err(Error::config("cliff drop must be non-negative and finite"));
            }
        }
        if !(self.cliff_band >= 0.0) {
            return Err(Error::config("cliff_band must be non-negative"));
        }
        Ok(())
    }
}

/// Bucketed spatial hash over rock centres. The bucket edge is at least one
/// rock diameter, so a point can only touch rocks in its own or adjacent buckets.
#[derive(Debug, Clone)]
struct RockIndex {
    bucket: f64,
    dims: [usize; 2],
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl RockIndex {
    fn build(rocks: &[Rock], extent: [f64; 2]) -> Self {
        let max_r = rocks.iter().fold(0.0f64, |m, r| m.max(r.radius));
        let bucket = (2.0 * max_r).max(0.25);
        let dims = [
            ((extent[0] / bucket).ceil() as usize).max(1),
            ((extent[1] / bucket).ceil() as usize).max(1),
        ];
        let mut counts = vec![0u32; dims[0] * dims[1] + 1];
        let keys: Vec<usize> = rocks
            .iter()
            .map(|r| {
                let (i, j) = Self::cell_of(bucket, dims, r.x, r.y);
                j * dims[0] + i
            })
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; rocks.len()];
        for (idx, &k) in keys.iter().enumerate() {
            items[fill[k] as usize] = idx as u32;
            fill[k] += 1;
        }
        RockIndex {
            bucket,
            dims,
            starts: counts,
            items,
        }
    }

    #[inline]
    fn cell_of(bucket: f64, dims: [usize; 2], x: f64, y: f64) -> (usize, usize) {
        let i = (x / bucket).floor().clamp(0.0, (dims[0] - 1) as f64) as usize;
        let j = (y / bucket).floor().clamp(0.0, (dims[1] - 1) as f64) as usize;
        (i, j)
    }

    /// Calls `f` with every rock index whose bucket lies within `reach` of `(x, y)`.
    #[inline]
    fn visit(&self, x: f64, y: f64, reach: f64, mut f: impl FnMut(usize)) {
        let span = (reach / self.bucket).ceil().max(1.0) as isize;
        let (ci, cj) = Self::cell_of(self.bucket, self.dims, x, y);
        let (ci, cj) = (ci as isize, cj as isize);
        for j in (cj - span).max(0)..=(cj + span).min(self.dims[1] as isize - 1) {
            for i in (ci - span).max(0)..=(ci + span).min(self.dims[0] as isize - 1) {
                let k = j as usize * self.dims[0] + i as usize;
                for &idx in &self.items[self.starts[k] as usize..self.starts[k + 1] as usize] {
                    f(idx as usize);
                }
            }
        }
    }
}

/// Deterministic analytic terrain queryable at any point of its extent.
#[derive(Debug, Clone)]
pub struct TerrainModel {
    spec: TerrainSpec,
    gradient: [f64; 2],
    fractal: FractalField,
    rocks: Vec<Rock>,
    index: RockIndex,
    max_radius: f64,
}

/// Builds a terrain with randomly placed, non-overlapping rocks.
pub fn generate_terrain(spec: &TerrainSpec) -> Result<TerrainModel> {
    spec.validate()?;
    let rocks = if spec.rock_coverage > 0.0 {
        place_rocks(spec)?
    } else {
        Vec::new()
    };
    Ok(TerrainModel::assemble(spec.clone(), rocks))
}

fn place_rocks(spec: &TerrainSpec) -> Result<Vec<Rock>> {
    let r = spec.rock_diameter / 2.0;
    let area = spec.extent[0] * spec.extent[1];
    let rock_area = std::f64::consts::PI * r * r;
    let target = (spec.rock_coverage * area / rock_area).round() as usize;
    let budget = 10 * target;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0x524f_434b));

    // Occupancy grid with cell edge 2r: any overlapping neighbour is within one cell.
    let cell = 2.0 * r;
    let nx = ((spec.extent[0] / cell).ceil() as usize).max(1);
    let ny = ((spec.extent[1] / cell).ceil() as usize).max(1);
    let mut grid: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
    let mut rocks = Vec::with_capacity(target);
    let min_d2 = (2.0 * r) * (2.0 * r);
    let mut attempts = 0;
    while rocks.len() < target && attempts < budget {
        attempts += 1;
        let x = rng.random::<f64>() * spec.extent[0];
        let y = rng.random::<f64>() * spec.extent[1];
        let ci = ((x / cell) as usize).min(nx - 1);
        let cj = ((y / cell) as usize).min(ny - 1);
        let mut free = true;
        'scan: for j in cj.saturating_sub(1)..=(cj + 1).min(ny - 1) {
            for i in ci.saturating_sub(1)..=(ci + 1).min(nx - 1) {
                for &k in &grid[j * nx + i] {
                    let o: &Rock = &rocks[k as usize];
                    let dx = o.x - x;
                    let dy = o.y - y;
                    if dx * dx + dy * dy < min_d2 {
                        free = false;
                        break 'scan;
                    }
                }
            }
        }
        if free {
            grid[cj * nx + ci].push(rocks.len() as u32);
            rocks.push(Rock { x, y, radius: r });
        }
    }
    if rocks.len() < target {
        return Err(Error::Placement {
            achieved: rocks.len() as f64 * rock_area / area,
            requested: spec.rock_coverage,
            attempts,
        });
    }
    Ok(rocks)
}

impl TerrainModel {
    /// Builds a terrain with an explicit rock list; `rock_coverage` and
    /// `rock_diameter` of the spec are ignored.
    pub fn with_rocks(spec: &TerrainSpec, rocks: Vec<Rock>) -> Result<TerrainModel> {
        spec.validate()?;
        if rocks.iter().any(|r| !(r.radius > 0.0 && r.x.is_finite() && r.y.is_finite())) {
            return Err(Error::config("rocks need positive radius and finite centres"));
        }
        Ok(Self::assemble(spec.clone(), rocks))
    }

    fn assemble(spec: TerrainSpec, rocks: Vec<Rock>) -> TerrainModel {
        let tan = spec.slope_deg.to_radians().tan();
        let az = spec.slope_azimuth_deg.to_radians();
        let fractal = FractalField::generate(
            spec.extent,
            spec.fractal_amplitude,
            spec.fractal_hurst,
            spec.fractal_spacing,
            derive_seed(spec.seed, 0x4652_4143),
        );
        let index = RockIndex::build(&rocks, spec.extent);
        let max_radius = rocks.iter().fold(0.0f64, |m, r| m.max(r.radius));
        TerrainModel {
            gradient: [tan * az.cos(), tan * az.sin()],
            spec,
            fractal,
            rocks,
            index,
            max_radius,
        }
    }

    pub fn spec(&self) -> &TerrainSpec {
        &self.spec
    }

    pub fn extent(&self) -> [f64; 2] {
        self.spec.extent
    }

    pub fn rocks(&self) -> &[Rock] {
        &self.rocks
    }

    pub fn cliff(&self) -> Option<Cliff> {
        self.spec.cliff
    }

    /// Fraction of the extent covered by rock discs.
    pub fn rock_coverage(&self) -> f64 {
        self.rocks.iter().map(Rock::area).sum::<f64>() / (self.spec.extent[0] * self.spec.extent[1])
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= self.spec.extent[0] && y <= self.spec.extent[1]
    }

    /// Height of the inclined base plane, which passes through the origin.
    #[inline]
    pub fn plane_height(&self, x: f64, y: f64) -> f64 {
        self.gradient[0] * x + self.gradient[1] * y
    }

    pub fn plane_gradient(&self) -> [f64; 2] {
        self.gradient
    }

    /// Everything except the base plane. Defined (by clamping) outside the extent.
    #[inline]
    pub(crate) fn residual_unchecked(&self, x: f64, y: f64) -> f64 {
        let mut h = self.fractal.sample(x, y);
        if !self.rocks.is_empty() {
            let mut cap = 0.0f64;
            self.index.visit(x, y, self.max_radius, |i| {
                cap = cap.max(self.rocks[i].cap_height(x, y));
            });
            h += cap;
        }
        if let Some(c) = self.spec.cliff {
            if x > c.edge_x {
                h -= c.drop;
            }
        }
        h
    }

    /// Bounds of [`Self::residual_unchecked`] over the whole plane.
    pub(crate) fn residual_bounds(&self) -> (f64, f64) {
        let (fmin, fmax) = self.fractal.bounds();
        let drop = self.spec.cliff.map_or(0.0, |c| c.drop);
        (fmin - drop, fmax + self.max_radius)
    }

    #[inline]
    pub(crate) fn height_unchecked(&self, x: f64, y: f64) -> f64 {
        self.plane_height(x, y) + self.residual_unchecked(x, y)
    }

    /// Ground-truth elevation at `(x, y)`.
    pub fn sample_height(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::OutOfExtent { x, y });
        }
        Ok(self.height_unchecked(x, y))
    }

    /// Terrain class with the configured cliff band.
    pub fn classify_point(&self, x: f64, y: f64) -> Result<TerrainClass> {
        self.classify_point_with_band(x, y, self.spec.cliff_band)
    }

    pub fn classify_point_with_band(&self, x: f64, y: f64, band: f64) -> Result<TerrainClass> {
        if !self.contains(x, y) {
            return Err(Error::OutOfExtent { x, y });
        }
        let mut in_rock = false;
        if !self.rocks.is_empty() {
            self.index.visit(x, y, self.max_radius, |i| {
                in_rock |= self.rocks[i].contains(x, y);
            });
        }
        if in_rock {
            return Ok(TerrainClass::Rock);
        }
        if let Some(c) = self.spec.cliff {
            if (x - c.edge_x).abs() <= band {
                return Ok(TerrainClass::Cliff);
            }
        }
        Ok(TerrainClass::Flat)
    }

    /// Smallest distance from `(x, y)` to any rock disc (zero inside a disc),
    /// considering only rocks within `reach`. Returns `None` if none is that close.
    pub fn distance_to_rock(&self, x: f64, y: f64, reach: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.index.visit(x, y, reach + self.max_radius, |i| {
            let r = &self.rocks[i];
            let d = ((x - r.x).powi(2) + (y - r.y).powi(2)).sqrt() - r.radius;
            let d = d.max(0.0);
            if d <= reach && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        });
        best
    }

    /// Rocks whose disc intersects the axis-aligned rectangle `[lo, hi]`.
    pub fn rocks_in_rect(&self, lo: [f64; 2], hi: [f64; 2]) -> Vec<&Rock> {
        self.rocks
            .iter()
            .filter(|r| {
                r.x + r.radius >= lo[0] && r.x - r.radius <= hi[0] && r.y + r.radius >= lo[1] && r.y - r.radius <= hi[1]
            })
            .collect()
    }
}
