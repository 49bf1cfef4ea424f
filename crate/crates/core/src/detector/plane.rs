//! Local plane fitting and roughness over disc neighbourhoods.

use nalgebra::{Matrix2, Vector2};

use super::snapshot::MapSnapshot;

/// Least-squares plane `z = c + a (x - cx) + b (y - cy)` around `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFit {
    pub center: [f64; 2],
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub slope_deg: f64,
    /// Root mean square residual of the fitted cells.
    pub rms: f64,
    pub support: usize,
}

impl PlaneFit {
    #[inline]
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        self.c + self.a * (x - self.center[0]) + self.b * (y - self.center[1])
    }
}

/// Maximum absolute deviation from a plane, with the number of cells seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roughness {
    pub value: f64,
    pub support: usize,
}

impl Roughness {
    /// True when no observed cell fell inside the disc.
    pub fn is_unknown(&self) -> bool {
        self.support == 0
    }
}

/// Index range along one axis whose cell centres may lie within `r` of `c`.
/// Deliberately generous; callers apply the exact distance test.
#[inline]
pub(crate) fn axis_range(origin: f64, res: f64, n: usize, c: f64, r: f64) -> (usize, usize) {
    let lo = ((c - r - origin) / res - 0.5).floor() as i64 - 1;
    let hi = ((c + r - origin) / res - 0.5).ceil() as i64 + 1;
    (lo.clamp(0, n as i64) as usize, (hi + 1).clamp(0, n as i64) as usize)
}

/// Visits observed cells of `level` whose centres lie within `radius` of `center`.
#[inline]
pub(crate) fn for_each_in_disc(
    snap: &MapSnapshot,
    level: usize,
    center: [f64; 2],
    radius: f64,
    mut f: impl FnMut(f64, f64, f64),
) {
    let grid = snap.level(level);
    let n = grid.cells;
    let (c0, c1) = axis_range(snap.origin[0], grid.resolution, n, center[0], radius);
    let (r0, r1) = axis_range(snap.origin[1], grid.resolution, n, center[1], radius);
    let r2 = radius * radius;
    for row in r0..r1 {
        let y = snap.center(level, 1, row);
        let dy = y - center[1];
        for col in c0..c1 {
            let x = snap.center(level, 0, col);
            let dx = x - center[0];
            if dx * dx + dy * dy <= r2 {
                let h = grid.heights[row * n + col];
                if !h.is_nan() {
                    f(x, y, h);
                }
            }
        }
    }
}

/// Fits a plane to the observed cells of `level` within `radius` of `center`.
/// Returns `None` with fewer than three cells or collinear support.
pub fn fit_plane(snap: &MapSnapshot, center: [f64; 2], radius: f64, level: usize) -> Option<PlaneFit> {
    let mut n = 0usize;
    let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
    for_each_in_disc(snap, level, center, radius, |x, y, h| {
        n += 1;
        sx += x - center[0];
        sy += y - center[1];
        sz += h;
    });
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let (mx, my, mz) = (sx / nf, sy / nf, sz / nf);
    let (mut cxx, mut cxy, mut cyy, mut cxz, mut cyz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for_each_in_disc(snap, level, center, radius, |x, y, h| {
        let dx = x - center[0] - mx;
        let dy = y - center[1] - my;
        let dz = h - mz;
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
        cxz += dx * dz;
        cyz += dy * dz;
    });
    let m = Matrix2::new(cxx, cxy, cxy, cyy);
    if m.determinant() <= 1e-9 * (cxx + cyy).powi(2) {
        return None;
    }
    let ab = m.lu().solve(&Vector2::new(cxz, cyz))?;
    let (a, b) = (ab[0], ab[1]);
    let mut plane = PlaneFit {
        center,
        a,
        b,
        c: mz - a * mx - b * my,
        slope_deg: (a * a + b * b).sqrt().atan().to_degrees(),
        rms: 0.0,
        support: n,
    };
    let mut ss = 0.0;
    for_each_in_disc(snap, level, center, radius, |x, y, h| {
        ss += (h - plane.height_at(x, y)).powi(2);
    });
    plane.rms = (ss / nf).sqrt();
    Some(plane)
}

/// Largest deviation of the level-`level` heights from `plane` over the disc.
pub fn roughness(snap: &MapSnapshot, center: [f64; 2], radius: f64, level: usize, plane: &PlaneFit) -> Roughness {
    let mut r = Roughness { value: 0.0, support: 0 };
    for_each_in_disc(snap, level, center, radius, |x, y, h| {
        r.support += 1;
        r.value = r.value.max((h - plane.height_at(x, y)).abs());
    });
    r
}
