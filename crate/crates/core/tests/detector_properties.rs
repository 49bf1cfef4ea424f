use pyramid_landing::detector::{detect_exhaustive, squared_edt};
use pyramid_landing::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_force_edt(width: usize, height: usize, feature: &[bool]) -> Vec<f64> {
    let features: Vec<(i64, i64)> = (0..width * height)
        .filter(|&i| feature[i])
        .map(|i| ((i % width) as i64, (i / width) as i64))
        .collect();
    (0..width * height)
        .map(|i| {
            let (c, r) = ((i % width) as i64, (i / width) as i64);
            features
                .iter()
                .map(|&(fc, fr)| ((fc - c).pow(2) + (fr - r).pow(2)) as f64)
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

#[test]
fn distance_transform_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..200 {
        let (w, h) = if trial < 20 {
            (rng.random_range(1..=64), rng.random_range(1..=64))
        } else {
            (64, 64)
        };
        // Densities from empty to full, with sparse grids over-represented.
        let p = match trial % 5 {
            0 => 0.0,
            1 => 0.001,
            2 => 0.02,
            3 => 0.3,
            _ => rng.random_range(0.0..1.0),
        };
        let feature: Vec<bool> = (0..w * h).map(|_| rng.random_bool(p)).collect();
        let fast = squared_edt(w, h, |c, r| feature[r * w + c]);
        assert_eq!(fast, brute_force_edt(w, h, &feature), "trial {trial} ({w}x{h}, p={p})");
    }
}

/// A random landing scene: sloped fractal ground with rocks, observed by
/// scattered noisy height samples with unobserved holes.
fn scene(seed: u64) -> MapSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = TerrainSpec {
        seed,
        extent: [8.0, 8.0],
        slope_deg: rng.random_range(0.0..14.0),
        slope_azimuth_deg: rng.random_range(0.0..360.0),
        fractal_amplitude: rng.random_range(0.0..0.06),
        rock_diameter: rng.random_range(0.15..0.6),
        rock_coverage: rng.random_range(0.0..0.15),
        ..TerrainSpec::default()
    };
    let terrain = generate_terrain(&spec).unwrap();
    let config = MapConfig {
        depth: 3,
        finest_resolution: 0.1,
        extent_cells: 64,
        disparity_error_px: 0.25,
    };
    let mut map = PyramidMap::centered_at(config, [4.0, 4.0]).unwrap();
    let holes: Vec<([f64; 2], f64)> = (0..rng.random_range(0..4))
        .map(|_| ([rng.random_range(1.0..7.0), rng.random_range(1.0..7.0)], rng.random_range(0.2..1.2)))
        .collect();
    let noise = rng.random_range(0.0..0.03);
    let (lo, hi) = map.bounds();
    for _ in 0..40_000 {
        let x = rng.random_range(lo[0]..hi[0]);
        let y = rng.random_range(lo[1]..hi[1]);
        if holes.iter().any(|(c, r)| (x - c[0]).hypot(y - c[1]) < *r) {
            continue;
        }
        let z = terrain.sample_height(x, y).unwrap() + rng.random_range(-noise..=noise);
        let level = if rng.random_bool(0.9) { 3 } else { 2 };
        map.fuse_point(x, y, z, 4e-4, level, 0.0).unwrap();
    }
    MapSnapshot::new(&map)
}

fn base_config(rng: &mut ChaCha8Rng) -> LandingConfig {
    LandingConfig {
        keepout_radius: rng.random_range(0.2..0.6),
        safety_margin: 0.0,
        rock_area_radius: 0.2,
        max_slope_deg: rng.random_range(5.0..15.0),
        max_roughness_m: rng.random_range(0.03..0.15),
        min_observations: 2,
        ..LandingConfig::default()
    }
}

fn non_safe(map: &LandingMap) -> Vec<bool> {
    map.classes.iter().map(|&c| c != LandingClass::Safe).collect()
}

fn is_subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

#[test]
fn pruned_detection_equals_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in 0..50 {
        let snap = scene(1000 + s);
        let mut cfg = base_config(&mut rng);
        cfg.safety_margin = rng.random_range(0.0..0.3);
        let fast = detect(&snap, &cfg).unwrap();
        let slow = detect_exhaustive(&snap, &cfg).unwrap();
        assert_eq!(fast.classes, slow.classes, "scene {s}");
        assert_eq!(fast.candidates, slow.candidates, "scene {s}");
    }
}

#[test]
fn larger_margin_never_adds_safe_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for s in 0..20 {
        let snap = scene(2000 + s);
        let cfg = base_config(&mut rng);
        let mut previous: Option<Vec<bool>> = None;
        for margin in [0.0, 0.05, 0.1, 0.2, 0.4] {
            let hazard = non_safe(&detect(&snap, &LandingConfig { safety_margin: margin, ..cfg }).unwrap());
            if let Some(p) = &previous {
                assert!(is_subset(p, &hazard), "scene {s}, margin {margin}");
            }
            previous = Some(hazard);
        }
    }
}

#[test]
fn stricter_thresholds_never_add_safe_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in 0..20 {
        let snap = scene(3000 + s);
        let cfg = LandingConfig {
            safety_margin: 0.1,
            ..base_config(&mut rng)
        };
        let loose = non_safe(&detect(&snap, &cfg).unwrap());
        let tighter = [
            LandingConfig { max_roughness_m: cfg.max_roughness_m * 0.5, ..cfg },
            LandingConfig { max_slope_deg: cfg.max_slope_deg * 0.5, ..cfg },
            LandingConfig { min_observations: 6, ..cfg },
            LandingConfig { max_variance: Some(1e-4), ..cfg },
        ];
        for (k, t) in tighter.iter().enumerate() {
            let strict = non_safe(&detect(&snap, t).unwrap());
            assert!(is_subset(&loose, &strict), "scene {s}, variant {k}");
        }
    }
}

#[test]
fn candidates_respect_the_safe_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in 0..10 {
        let snap = scene(4000 + s);
        let cfg = LandingConfig {
            safety_margin: 0.1,
            ..base_config(&mut rng)
        };
        let map = detect(&snap, &cfg).unwrap();
        for c in &map.candidates {
            let col = ((c.x - map.origin[0]) / map.resolution) as usize;
            let row = ((c.y - map.origin[1]) / map.resolution) as usize;
            assert_eq!(map.class(col, row), LandingClass::Safe);
            assert!(map.distance[row * map.cells + col] >= cfg.safe_area_radius() - 1e-9);
        }
    }
}

#[test]
fn flat_fully_observed_ground_is_safe() {
    let terrain = generate_terrain(&TerrainSpec::flat([8.0, 8.0])).unwrap();
    let config = MapConfig {
        depth: 3,
        finest_resolution: 0.1,
        extent_cells: 64,
        disparity_error_px: 0.25,
    };
    let mut map = PyramidMap::centered_at(config, [4.0, 4.0]).unwrap();
    let (lo, _) = map.bounds();
    for row in 0..64 {
        for col in 0..64 {
            for k in 0..4 {
                let x = lo[0] + (col as f64 + 0.25 + 0.5 * (k % 2) as f64) * 0.1;
                let y = lo[1] + (row as f64 + 0.25 + 0.5 * (k / 2) as f64) * 0.1;
                map.fuse_point(x, y, terrain.sample_height(x, y).unwrap(), 1e-4, 3, 0.0).unwrap();
            }
        }
    }
    let landing = detect(&MapSnapshot::new(&map), &LandingConfig::default()).unwrap();
    // Only the band along the map edge, where the surroundings are unknown,
    // is withheld.
    let [safe, hazard, unknown, border, nodata] = landing.class_counts();
    assert_eq!((hazard, unknown, nodata), (0, 0, 0));
    assert_eq!(safe + border, 64 * 64);
    assert!(safe > border);
    assert!(!landing.candidates.is_empty());
}
