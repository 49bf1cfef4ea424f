use proptest::prelude::*;
use pyramid_landing::prelude::*;
use pyramid_landing::simworld::derive_seed;

fn small_camera(noise: f64) -> CameraModel {
    CameraModel {
        image_width: 80,
        image_height: 60,
        disparity_noise_3sigma: noise,
        ..CameraModel::default()
    }
}

fn rocky(seed: u64) -> TerrainModel {
    generate_terrain(&TerrainSpec {
        seed,
        extent: [16.0, 16.0],
        slope_deg: 6.0,
        slope_azimuth_deg: 30.0,
        fractal_amplitude: 0.05,
        rock_diameter: 0.4,
        rock_coverage: 0.1,
        cliff: Some(Cliff { edge_x: 10.0, drop: 2.0 }),
        ..TerrainSpec::default()
    })
    .unwrap()
}

#[test]
fn noiseless_points_lie_on_the_surface() {
    let terrain = rocky(3);
    let camera = small_camera(0.0);
    for (i, pos) in [[6.0, 8.0, 5.0], [9.5, 7.0, 4.0], [8.0, 8.0, 12.0]].into_iter().enumerate() {
        let ground = terrain.sample_height(pos[0], pos[1]).unwrap();
        let pose = CameraPose::nadir(0.0, [pos[0], pos[1], ground + pos[2]]);
        let image = render_range_image(&terrain, &pose, &camera, 1, &RenderOptions::default()).unwrap();
        assert!(image.valid_count() > 0);
        for p in image.valid_points() {
            let truth = terrain.sample_height(p.x, p.y).unwrap();
            assert!((p.z - truth).abs() <= 1e-4, "pose {i}: {} vs {truth} at ({}, {})", p.z, p.x, p.y);
        }
    }
}

#[test]
fn injected_noise_matches_the_stereo_model() {
    // Flat ground keeps the true depth of every pixel known exactly.
    let terrain = generate_terrain(&TerrainSpec::flat([40.0, 40.0])).unwrap();
    let camera = CameraModel {
        image_width: 32,
        image_height: 24,
        ..CameraModel::default()
    };
    let pose = CameraPose::nadir(0.0, [20.0, 20.0, 10.0]);
    let pixels = [(16u32, 12u32), (4, 4), (28, 20), (10, 18)];
    let trials = 600;
    let mut sq = vec![0.0; pixels.len()];
    let mut mean = vec![0.0; pixels.len()];
    let mut predicted = vec![0.0; pixels.len()];
    for t in 0..trials {
        let image = render_range_image(&terrain, &pose, &camera, derive_seed(99, t), &RenderOptions::default()).unwrap();
        for (k, &(u, v)) in pixels.iter().enumerate() {
            let p = image.get(u, v);
            // Height error on flat ground is zero-mean only to first order,
            // so compare spread against the predicted variance.
            mean[k] += p.z;
            sq[k] += p.z * p.z;
            predicted[k] = p.variance;
        }
    }
    for k in 0..pixels.len() {
        let m = mean[k] / trials as f64;
        let var = sq[k] / trials as f64 - m * m;
        let ratio = var / predicted[k];
        assert!((0.8..1.25).contains(&ratio), "pixel {:?}: empirical/predicted = {ratio}", pixels[k]);
        assert!(m.abs() < 4.0 * (predicted[k] / trials as f64).sqrt() + 1e-3, "pixel {:?}: bias {m}", pixels[k]);
    }
}

#[test]
fn rendering_is_deterministic() {
    let terrain = rocky(8);
    let plan = FlightPlan::straight([5.0, 8.0, 5.0], [8.0, 8.0, 5.0], 1.0, 2.0);
    let camera = small_camera(0.25);
    let run = || -> Vec<RangeImage> {
        fly(&terrain, &plan, &camera, 42, &RenderOptions::default())
            .map(|f| f.unwrap().image)
            .collect()
    };
    let a = run();
    let b = run();
    assert_eq!(a.len(), plan.frame_count());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.points.len(), y.points.len());
        for (p, q) in x.points.iter().zip(&y.points) {
            assert!(p.x.to_bits() == q.x.to_bits() && p.z.to_bits() == q.z.to_bits());
        }
    }
    let again = rocky(8);
    assert_eq!(again.rocks(), terrain.rocks());
    assert_ne!(rocky(9).rocks(), terrain.rocks());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rocks_keep_apart_and_stay_inside(seed in any::<u64>(), coverage in 0.0f64..0.2, d in 0.1f64..1.0) {
        let spec = TerrainSpec {
            seed,
            extent: [10.0, 10.0],
            rock_diameter: d,
            rock_coverage: coverage,
            ..TerrainSpec::default()
        };
        let t = generate_terrain(&spec).unwrap();
        let rocks = t.rocks();
        for (i, a) in rocks.iter().enumerate() {
            // Centres lie inside the extent; discs may be clipped by its edge.
            prop_assert!((0.0..=10.0).contains(&a.x) && (0.0..=10.0).contains(&a.y));
            for b in &rocks[i + 1..] {
                prop_assert!((a.x - b.x).hypot(a.y - b.y) >= a.radius + b.radius - 1e-12);
            }
        }
        prop_assert!((t.rock_coverage() - coverage).abs() <= 0.01 + coverage * 0.05);
    }

    #[test]
    fn surface_is_never_below_the_ground_plane_under_a_rock(seed in any::<u64>(), fx in 0.0f64..1.0, fy in 0.0f64..1.0) {
        let t = rocky(seed);
        let x = 0.5 + fx * 15.0;
        let y = 0.5 + fy * 15.0;
        let h = t.sample_height(x, y).unwrap();
        let class = t.classify_point(x, y).unwrap();
        if class == TerrainClass::Rock {
            let r = t.rocks().iter().find(|r| r.contains(x, y)).unwrap();
            prop_assert!(r.cap_height(x, y) > 0.0);
        }
        prop_assert!(h.is_finite());
    }
}

#[test]
fn pixel_footprint_sets_the_level() {
    let camera = CameraModel::default();
    let map = MapConfig::default();
    // 640 px over 110 deg at 5 m: about 2.2 cm per pixel, finest layer.
    let f5 = pixel_footprint(5.0, 0.0, &camera).unwrap();
    assert!((f5 - 2.0 * 5.0 * 55f64.to_radians().tan() / 640.0).abs() < 1e-12);
    assert_eq!(target_level(f5, &map), 3);
    let f30 = pixel_footprint(30.0, 0.0, &camera).unwrap();
    assert_eq!(target_level(f30, &map), 2);
    assert_eq!(target_level(1.0, &map), 1);
    assert!(pixel_footprint(1.0, 1.0, &camera).is_err());
}
