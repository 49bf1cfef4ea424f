//! Maps a rocky slope, runs the landing detector and lists the best sites.
//!
//! ```text
//! cargo run --release --example detect_landing -- [out_dir]
//! ```

use pyramid_landing::evalbench::{landing_metrics, EvalCriteria};
use pyramid_landing::io::{write_candidates_csv, write_landing_pgm};
use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 21,
        extent: [24.0, 24.0],
        slope_deg: 4.0,
        rock_diameter: 0.4,
        rock_coverage: 0.03,
        ..TerrainSpec::default()
    })?;
    let camera = CameraModel {
        image_width: 320,
        image_height: 240,
        ..CameraModel::default()
    };
    let z = |x: f64| terrain.plane_height(x, 12.0) + 5.0;
    let plan = FlightPlan::straight([9.0, 12.0, z(9.0)], [15.0, 12.0, z(15.0)], 1.0, 2.0);
    let cfg = MapConfig {
        finest_resolution: 0.06,
        extent_cells: 256,
        ..MapConfig::default()
    };
    let mut map = PyramidMap::centered_at(cfg, [12.0, 12.0])?;
    for frame in fly(&terrain, &plan, &camera, 5, &RenderOptions::for_resolution(0.06, 0.25)) {
        let frame = frame?;
        fuse_range_image(&mut map, &frame.image, &frame.pose, &camera);
    }

    let landing_cfg = LandingConfig {
        keepout_radius: 0.5,
        safety_margin: 0.2,
        max_roughness_m: 0.05,
        ..LandingConfig::default()
    };
    let landing = detect(&MapSnapshot::new(&map), &landing_cfg)?;
    let [safe, hazard, unknown, border, nodata] = landing.class_counts();
    println!("safe {safe}  hazard {hazard}  unknown {unknown}  border {border}  no data {nodata}");
    for (i, c) in landing.candidates.iter().take(5).enumerate() {
        println!("#{} at ({:.2}, {:.2}), clearance {:.2} m", i + 1, c.x, c.y, c.clearance);
    }
    let m = landing_metrics(&landing, &terrain, &EvalCriteria::default());
    println!(
        "recall {:.3}, rocks detected {}/{}, false positives {:.4}",
        m.recall().unwrap_or(f64::NAN),
        m.rocks_detected,
        m.rocks_visible,
        m.false_positive_rate().unwrap_or(f64::NAN)
    );
    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        std::fs::create_dir_all(dir).map_err(|e| Error::Config(e.to_string()))?;
        write_landing_pgm(&dir.join("landing.pgm"), &landing)?;
        write_candidates_csv(&dir.join("candidates.csv"), &landing.candidates)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
