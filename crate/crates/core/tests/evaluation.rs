use pyramid_landing::evalbench::{rmse_by_class, EvalCriteria};
use pyramid_landing::prelude::*;

fn noiseless(width: u32, height: u32) -> CameraModel {
    CameraModel {
        image_width: width,
        image_height: height,
        disparity_noise_3sigma: 0.0,
        ..CameraModel::default()
    }
}

/// On a surface that the finest layer can represent exactly, every extra
/// sweep of noiseless samples moves each cell closer to the truth.
#[test]
fn noiseless_sweeps_never_raise_the_error() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let cells = 16;
    let mut map = PyramidMap::new(MapConfig {
        depth: 3,
        finest_resolution: 0.1,
        extent_cells: cells,
        disparity_error_px: 0.25,
    })
    .unwrap();
    let (lo, _) = map.bounds();
    let truth: Vec<f64> = (0..cells * cells).map(|_| rng.random_range(-0.2..0.2)).collect();
    let centre = |i: usize| (lo[0] + ((i % cells) as f64 + 0.5) * 0.1, lo[1] + ((i / cells) as f64 + 0.5) * 0.1);
    let rmse = |map: &PyramidMap| {
        let s: f64 = truth
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let (x, y) = centre(i);
                (map.reconstruct_height(x, y, 3).unwrap().unwrap().height - h).powi(2)
            })
            .sum();
        (s / truth.len() as f64).sqrt()
    };
    let mut last = f64::INFINITY;
    let mut first = None;
    for sweep in 0..200 {
        for (i, &h) in truth.iter().enumerate() {
            let (x, y) = centre(i);
            map.fuse_point(x, y, h, 1e-4, 3, sweep as f64).unwrap();
        }
        let e = rmse(&map);
        assert!(e <= last, "sweep {sweep}: {e} after {last}");
        last = e;
        first.get_or_insert(e);
    }
    assert!(last < 0.05 * first.unwrap(), "{last} vs {first:?}");
}

/// Hovering over continuous terrain: the error settles at the discretisation
/// floor of the finest cells and stays far below the first-frame error.
#[test]
fn repeated_noiseless_frames_settle() {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 21,
        extent: [12.0, 12.0],
        slope_deg: 5.0,
        fractal_amplitude: 0.04,
        rock_coverage: 0.1,
        rock_diameter: 0.4,
        ..TerrainSpec::default()
    })
    .unwrap();
    let camera = noiseless(160, 120);
    let ground = terrain.sample_height(6.0, 6.0).unwrap();
    let pose = CameraPose::nadir(0.0, [6.0, 6.0, ground + 4.0]);
    let image = render_range_image(&terrain, &pose, &camera, 0, &RenderOptions::default()).unwrap();
    let mut map = PyramidMap::centered_at(
        MapConfig {
            extent_cells: 96,
            ..MapConfig::default()
        },
        [6.0, 6.0],
    )
    .unwrap();
    let mut per_frame = Vec::new();
    for _ in 0..32 {
        fuse_range_image(&mut map, &image, &pose, &camera);
        per_frame.push(rmse_by_class(&MapSnapshot::new(&map), &terrain).total.unwrap());
    }
    for k in [1usize, 2, 4, 8, 16] {
        assert!(per_frame[2 * k - 1] <= per_frame[0], "{per_frame:?}");
    }
    let tail = (per_frame[31] - per_frame[30]).abs();
    let early = (per_frame[2] - per_frame[1]).abs();
    assert!(tail < early / 100.0, "{per_frame:?}");
    assert!(per_frame[31] <= 0.6 * per_frame[0]);
}

#[test]
fn noiseless_flat_ground_is_mapped_within_a_quarter_cell() {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 4,
        extent: [20.0, 20.0],
        slope_deg: 5.0,
        slope_azimuth_deg: 90.0,
        fractal_amplitude: 0.05,
        ..TerrainSpec::default()
    })
    .unwrap();
    let camera = noiseless(320, 240);
    let plan = FlightPlan::straight([6.0, 10.0, 5.0], [14.0, 10.0, 5.0], 1.0, 2.0);
    let config = MapConfig::default();
    let mut map = PyramidMap::centered_at(config, [10.0, 10.0]).unwrap();
    for frame in fly(&terrain, &plan, &camera, 0, &RenderOptions::default()) {
        let frame = frame.unwrap();
        fuse_range_image(&mut map, &frame.image, &frame.pose, &camera);
    }
    let rmse = map_rmse(&MapSnapshot::new(&map), &terrain, TerrainClass::Flat).unwrap();
    assert!(rmse <= config.finest_resolution / 4.0, "flat RMSE {rmse}");
}

fn fully_observed(terrain: &TerrainModel, center: [f64; 2], cells: usize) -> PyramidMap {
    let config = MapConfig {
        depth: 3,
        finest_resolution: 0.05,
        extent_cells: cells,
        disparity_error_px: 0.25,
    };
    let mut map = PyramidMap::centered_at(config, center).unwrap();
    let (lo, _) = map.bounds();
    for row in 0..cells {
        for col in 0..cells {
            for k in 0..4 {
                let x = lo[0] + (col as f64 + 0.25 + 0.5 * (k % 2) as f64) * 0.05;
                let y = lo[1] + (row as f64 + 0.25 + 0.5 * (k / 2) as f64) * 0.05;
                map.fuse_point(x, y, terrain.sample_height(x, y).unwrap(), 1e-5, 3, 0.0).unwrap();
            }
        }
    }
    map
}

#[test]
fn rock_free_ground_scores_perfect_recall() {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 2,
        extent: [10.0, 10.0],
        slope_deg: 3.0,
        fractal_amplitude: 0.01,
        ..TerrainSpec::default()
    })
    .unwrap();
    let map = fully_observed(&terrain, [5.0, 5.0], 128);
    let landing = detect(&MapSnapshot::new(&map), &LandingConfig::default()).unwrap();
    let m = landing_metrics(&landing, &terrain, &EvalCriteria::default());
    assert!(m.evaluated_cells > 0);
    assert_eq!(m.recall(), Some(1.0));
    assert_eq!(m.true_hazard_cells, 0);
    assert_eq!(m.false_positive_rate(), None);
    assert_eq!(m.detection_rate(), None);
}

#[test]
fn border_and_unobserved_cells_are_not_scored() {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 3,
        extent: [10.0, 10.0],
        rock_coverage: 0.05,
        rock_diameter: 0.4,
        fractal_amplitude: 0.01,
        ..TerrainSpec::default()
    })
    .unwrap();
    let map = fully_observed(&terrain, [5.0, 5.0], 128);
    let landing = detect(&MapSnapshot::new(&map), &LandingConfig::default()).unwrap();
    let [safe, hazard, unknown, border, nodata] = landing.class_counts();
    assert!(border > 0);
    let m = landing_metrics(&landing, &terrain, &EvalCriteria::default());
    assert_eq!(m.evaluated_cells, safe + hazard + unknown);
    assert_eq!(nodata, 0);

    // Restricting the region only drops cells.
    let region = EvalCriteria {
        region: Some([4.0, 4.0, 6.0, 6.0]),
        ..EvalCriteria::default()
    };
    let r = landing_metrics(&landing, &terrain, &region);
    assert!(r.evaluated_cells <= 41 * 41 && r.evaluated_cells > 0);
    assert!(r.true_hazard_cells <= m.true_hazard_cells);
    // Rocks well inside the map are all visible; rocks off the map are not.
    let (lo, hi) = map.bounds();
    let inner = terrain.rocks_in_rect([lo[0] + 1.0, lo[1] + 1.0], [hi[0] - 1.0, hi[1] - 1.0]).len();
    let touching = terrain.rocks_in_rect(lo, hi).len();
    assert!(inner > 0 && m.rocks_visible >= inner && m.rocks_visible <= touching);
    assert_eq!(m.detection_rate(), Some(1.0));
    assert_eq!(m.false_positive_rate(), Some(0.0));
}
