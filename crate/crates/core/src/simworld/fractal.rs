//! Seeded diamond-square fractal height field with bilinear sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Largest grid exponent; a 2049 x 2049 lattice.
const MAX_LEVELS: u32 = 11;

/// Fractal height component sampled on a square `(2^k + 1)^2` lattice.
///
/// The field is shifted to zero area-mean over the lattice and scaled so its
/// area-weighted RMS equals the requested amplitude.
#[derive(Debug, Clone)]
pub struct FractalField {
    origin: [f64; 2],
    spacing: f64,
    n: usize,
    data: Vec<f32>,
    min: f64,
    max: f64,
}

impl FractalField {
    pub fn zero() -> Self {
        FractalField {
            origin: [0.0, 0.0],
            spacing: 1.0,
            n: 2,
            data: vec![0.0; 4],
            min: 0.0,
            max: 0.0,
        }
    }

    /// Builds a field covering `[0, extent[0]] x [0, extent[1]]`.
    ///
    /// `hurst` in (0, 1] controls roughness: each halving of the displacement
    /// scale multiplies the perturbation by `2^-hurst`.
    pub fn generate(extent: [f64; 2], amplitude: f64, hurst: f64, max_spacing: f64, seed: u64) -> Self {
        if amplitude == 0.0 {
            return Self::zero();
        }
        let size = extent[0].max(extent[1]);
        let mut levels = 1;
        while levels < MAX_LEVELS && size / f64::from(1u32 << levels) > max_spacing {
            levels += 1;
        }
        let n = (1usize << levels) + 1;
        let spacing = size / (n - 1) as f64;
        let mut grid = diamond_square(levels, hurst, seed);

        let weights = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut wsum = 0.0;
        let mut mean = 0.0;
        for r in 0..n {
            for c in 0..n {
                let w = weights(r) * weights(c);
                wsum += w;
                mean += w * grid[r * n + c];
            }
        }
        mean /= wsum;
        let mut ms = 0.0;
        for r in 0..n {
            for c in 0..n {
                let v = grid[r * n + c] - mean;
                grid[r * n + c] = v;
                ms += weights(r) * weights(c) * v * v;
            }
        }
        let rms = (ms / wsum).sqrt();
        let scale = if rms > 0.0 { amplitude / rms } else { 0.0 };

        let data: Vec<f32> = grid.iter().map(|v| (v * scale) as f32).collect();
        let (min, max) = data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(f64::from(v)), hi.max(f64::from(v)))
        });
        FractalField {
            origin: [0.0, 0.0],
            spacing,
            n,
            data,
            min,
            max,
        }
    }

    /// Lower and upper bound of every sampled value.
    pub fn bounds(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    #[inline]
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let last = (self.n - 1) as f64;
        let u = ((x - self.origin[0]) / self.spacing).clamp(0.0, last);
        let v = ((y - self.origin[1]) / self.spacing).clamp(0.0, last);
        let i = (u as usize).min(self.n - 2);
        let j = (v as usize).min(self.n - 2);
        let fu = u - i as f64;
        let fv = v - j as f64;
        let at = |r: usize, c: usize| f64::from(self.data[r * self.n + c]);
        let h00 = at(j, i);
        let h10 = at(j, i + 1);
        let h01 = at(j + 1, i);
        let h11 = at(j + 1, i + 1);
        let h0 = h00 + (h10 - h00) * fu;
        let h1 = h01 + (h11 - h01) * fu;
        h0 + (h1 - h0) * fv
    }
}

/// Raw diamond-square lattice of size `(2^levels + 1)^2` with unit initial scale.
fn diamond_square(levels: u32, hurst: f64, seed: u64) -> Vec<f64> {
    let n = (1usize << levels) + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || -> f64 { StandardNormal.sample(&mut rng) };
    let mut g = vec![0.0f64; n * n];
    for &(r, c) in &[(0, 0), (0, n - 1), (n - 1, 0), (n - 1, n - 1)] {
        g[r * n + c] = gauss();
    }
    let decay = 2f64.powf(-hurst);
    let mut scale = decay;
    let mut step = n - 1;
    while step > 1 {
        let half = step / 2;
        // Diamond step: square centres.
        for r in (half..n).step_by(step) {
            for c in (half..n).step_by(step) {
                let avg = (g[(r - half) * n + c - half]
                    + g[(r - half) * n + c + half]
                    + g[(r + half) * n + c - half]
                    + g[(r + half) * n + c + half])
                    * 0.25;
                g[r * n + c] = avg + scale * gauss();
            }
        }
        // Square step: edge midpoints.
        for r in (0..n).step_by(half) {
            let start = if (r / half) % 2 == 0 { half } else { 0 };
            for c in (start..n).step_by(step) {
                let mut sum = 0.0;
                let mut cnt = 0.0;
                if r >= half {
                    sum += g[(r - half) * n + c];
                    cnt += 1.0;
                }
                if r + half < n {
                    sum += g[(r + half) * n + c];
                    cnt += 1.0;
                }
                if c >= half {
                    sum += g[r * n + c - half];
                    cnt += 1.0;
                }
                if c + half < n {
                    sum += g[r * n + c + half];
                    cnt += 1.0;
                }
                g[r * n + c] = sum / cnt + scale * gauss();
            }
        }
        scale *= decay;
        step = half;
    }
    g
}
