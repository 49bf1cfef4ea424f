use approx::assert_relative_eq;
use proptest::prelude::*;
use pyramid_landing::elevmap::MapShift;
use pyramid_landing::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn map(depth: usize, res: f64, cells: usize) -> PyramidMap {
    PyramidMap::new(MapConfig {
        depth,
        finest_resolution: res,
        extent_cells: cells,
        disparity_error_px: 0.25,
    })
    .unwrap()
}

fn batch(measurements: &[(f64, f64)]) -> (f64, f64) {
    let info: f64 = measurements.iter().map(|(_, v)| 1.0 / v).sum();
    let mean = measurements.iter().map(|(h, v)| h / v).sum::<f64>() / info;
    (mean, 1.0 / info)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kalman_fusion_matches_batch_in_any_order(
        ms in prop::collection::vec((-50.0f64..50.0, 1e-4f64..10.0), 1..40),
        seed in any::<u64>(),
    ) {
        let (mean, var) = batch(&ms);
        let mut order = ms.clone();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

        let (mut h, mut v) = order[0];
        for &(hi, vi) in &order[1..] {
            (h, v) = kalman_update(h, v, hi, vi).unwrap();
        }
        prop_assert!((h - mean).abs() <= 1e-9 * mean.abs().max(1.0));
        prop_assert!((v - var).abs() <= 1e-9 * var);

        // Same oracle through the map's own cell storage.
        let mut m = map(1, 0.5, 4);
        for (i, &(hi, vi)) in order.iter().enumerate() {
            m.fuse_point(0.1, 0.1, hi, vi, 1, i as f64).unwrap();
        }
        let cell = m.cell_at(0.1, 0.1, 1).unwrap().unwrap();
        prop_assert!((cell.value - mean).abs() <= 1e-9 * mean.abs().max(1.0));
        prop_assert!((cell.variance - var).abs() <= 1e-9 * var);
        prop_assert_eq!(cell.observation_count as usize, ms.len());
    }

    #[test]
    fn variance_never_grows(
        prior in 1e-6f64..10.0,
        ms in prop::collection::vec((-5.0f64..5.0, 1e-6f64..10.0), 1..30),
    ) {
        let (mut h, mut v) = (0.0, prior);
        for (hi, vi) in ms {
            let (h2, v2) = kalman_update(h, v, hi, vi).unwrap();
            prop_assert!(v2 < v);
            prop_assert!(v2 <= v.min(vi));
            prop_assert!(h2 >= h.min(hi) - 1e-12 && h2 <= h.max(hi) + 1e-12);
            (h, v) = (h2, v2);
        }
    }

    #[test]
    fn rolling_keeps_overlap_bit_exact(
        seed in any::<u64>(),
        dx in -6i64..=6,
        dy in -6i64..=6,
    ) {
        // depth 3: shifts come in multiples of 4 finest cells.
        let mut m = map(3, 0.1, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = m.bounds();
        for _ in 0..300 {
            let x = rng.random_range(lo[0]..hi[0]);
            let y = rng.random_range(lo[1]..hi[1]);
            let level = rng.random_range(1..=3);
            m.fuse_point(x, y, rng.random_range(-1.0..1.0), rng.random_range(1e-4..1e-2), level, 1.0).unwrap();
        }
        let before = m.clone();
        let shift = MapShift { dx: dx * 4, dy: dy * 4 };
        m.shift(shift).unwrap();
        let (nlo, nhi) = m.bounds();
        for level in 1..=3 {
            let res = m.config().resolution(level);
            let n = m.config().cells(level);
            for row in 0..n {
                for col in 0..n {
                    let x = lo[0] + (col as f64 + 0.5) * res;
                    let y = lo[1] + (row as f64 + 0.5) * res;
                    let kept = x > nlo[0] && x < nhi[0] && y > nlo[1] && y < nhi[1];
                    if kept {
                        prop_assert_eq!(m.cell_at(x, y, level).unwrap(), before.cell_at(x, y, level).unwrap());
                    }
                }
            }
        }
        // Shifting back restores the overlap and leaves the rest empty.
        m.shift(shift.inverse()).unwrap();
        for level in 1..=3 {
            let res = m.config().resolution(level);
            let n = m.config().cells(level);
            for row in 0..n {
                for col in 0..n {
                    let x = lo[0] + (col as f64 + 0.5) * res;
                    let y = lo[1] + (row as f64 + 0.5) * res;
                    let inside_shifted = x > nlo[0] && x < nhi[0] && y > nlo[1] && y < nhi[1];
                    let got = m.cell(level, col, row).unwrap();
                    if inside_shifted {
                        prop_assert_eq!(got, before.cell(level, col, row).unwrap());
                    } else {
                        prop_assert_eq!(got, None);
                    }
                }
            }
        }
    }
}

#[test]
fn cell_index_matches_brute_force() {
    for depth in 1..=5usize {
        for level in 1..=depth {
            let s = 1i64 << (depth - level);
            for x in -(1i64 << 12)..(1i64 << 12) {
                // Smallest multiple of s not above x, found by walking.
                let mut k = x / s;
                while k * s > x {
                    k -= 1;
                }
                while (k + 1) * s <= x {
                    k += 1;
                }
                assert_eq!(cell_index(x, level, depth).unwrap(), k, "x={x} level={level} depth={depth}");
            }
        }
    }
}

/// Noiseless samples of a surface that is constant on every finest cell are
/// fused round-robin; once converged, every layer reconstructs the surface.
#[test]
fn pyramid_reconstructs_representable_surface() {
    for (seed, depth) in [(1u64, 2usize), (2, 2), (3, 3)] {
        let cells = 1usize << (depth - 1);
        let mut m = map(depth, 0.25, cells);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let heights: Vec<f64> = (0..cells * cells).map(|_| 3.0 + rng.random_range(-0.1..0.1)).collect();
        let (lo, _) = m.bounds();
        let centre = |i: usize| {
            let (c, r) = (i % cells, i / cells);
            (lo[0] + (c as f64 + 0.5) * 0.25, lo[1] + (r as f64 + 0.5) * 0.25)
        };
        let sweeps = 4_000_000;
        for _ in 0..sweeps {
            for (i, &h) in heights.iter().enumerate() {
                let (x, y) = centre(i);
                m.fuse_point(x, y, h, 1e-4, depth, 0.0).unwrap();
            }
        }
        for (i, &h) in heights.iter().enumerate() {
            let (x, y) = centre(i);
            let r = m.reconstruct_height(x, y, depth).unwrap().unwrap();
            assert_eq!(r.resolved_level, depth);
            assert!((r.height - h).abs() <= 1e-6, "seed {seed}: {} vs {h}", r.height);
        }
        let mean = heights.iter().sum::<f64>() / heights.len() as f64;
        let coarse = m.reconstruct_height(centre(0).0, centre(0).1, 1).unwrap().unwrap();
        assert!((coarse.height - mean).abs() <= 1e-6);
    }
}

#[test]
fn surface_constant_per_coarse_cell_is_exact_immediately() {
    let mut m = map(3, 0.1, 16);
    let (lo, hi) = m.bounds();
    let truth = |x: f64, y: f64| ((x - lo[0]) / 0.4).floor() * 0.3 - ((y - lo[1]) / 0.4).floor() * 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..2000 {
        let x = rng.random_range(lo[0]..hi[0]);
        let y = rng.random_range(lo[1]..hi[1]);
        m.fuse_point(x, y, truth(x, y), 1e-3, 3, 0.0).unwrap();
    }
    for _ in 0..200 {
        let x = rng.random_range(lo[0]..hi[0]);
        let y = rng.random_range(lo[1]..hi[1]);
        if let Some(r) = m.reconstruct_height(x, y, 3).unwrap() {
            assert_relative_eq!(r.height, truth(x, y), epsilon = 1e-9);
        }
    }
}

#[test]
fn memory_overhead_is_four_thirds() {
    for cells in [16usize, 64, 200, 256, 512] {
        let m = map(3, 0.08, cells);
        let ratio = m.allocated_cells() as f64 / (cells * cells) as f64;
        assert!(ratio <= 4.0 / 3.0 * 1.01, "{cells}: {ratio}");
    }
}

#[test]
fn recenter_keeps_target_inside() {
    let mut m = map(3, 0.1, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut c = [0.0, 0.0];
    for _ in 0..200 {
        c[0] += rng.random_range(-0.5..0.5);
        c[1] += rng.random_range(-0.5..0.5);
        m.recenter(c, [0.8, 0.6]);
        let (lo, hi) = m.bounds();
        assert!(c[0] - 0.8 >= lo[0] && c[0] + 0.8 <= hi[0]);
        assert!(c[1] - 0.6 >= lo[1] && c[1] + 0.6 <= hi[1]);
        assert_eq!(m.origin_index()[0] % 4, 0);
    }
}
