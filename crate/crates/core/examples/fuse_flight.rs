//! Flies over rocky terrain, fuses every frame and writes the map dump and
//! layer images.
//!
//! ```text
//! cargo run --release --example fuse_flight -- [out_dir]
//! ```

use pyramid_landing::io::{save_map, write_layer_images};
use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 3,
        extent: [40.0, 20.0],
        slope_deg: 5.0,
        rock_coverage: 0.1,
        ..TerrainSpec::default()
    })?;
    let camera = CameraModel {
        image_width: 320,
        image_height: 240,
        ..CameraModel::default()
    };
    let z = |x: f64| terrain.plane_height(x, 10.0) + 5.0;
    let plan = FlightPlan::straight([8.0, 10.0, z(8.0)], [32.0, 10.0, z(32.0)], 1.0, 2.0);
    let mut map = PyramidMap::centered_at(MapConfig::default(), [8.0, 10.0])?;
    let options = RenderOptions::for_resolution(0.08, 0.25);

    for frame in fly(&terrain, &plan, &camera, 11, &options) {
        let frame = frame?;
        let stats = fuse_frame(&mut map, &frame.image, &frame.pose, &camera);
        if frame.index % 10 == 0 || !stats.shift.is_zero() {
            println!(
                "t={:5.1}s fused {:6} points into {:6} cells, per level {:?}, shift ({}, {})",
                frame.pose.timestamp,
                stats.fused_points,
                stats.total_updated_cells(),
                stats.points_per_level,
                stats.shift.dx,
                stats.shift.dy
            );
        }
    }
    let (lo, hi) = map.bounds();
    println!("map window [{:.2}, {:.2}] x [{:.2}, {:.2}]", lo[0], hi[0], lo[1], hi[1]);
    for level in 1..=map.depth() {
        println!("layer {level}: {} observed cells", map.observed_cells(level));
    }
    let probe = [map.origin()[0] + 8.0, 10.0];
    if let Some(r) = map.reconstruct_height(probe[0], probe[1], map.depth())? {
        println!(
            "height at ({:.1}, {:.1}): {:.3} m from layer {} (truth {:.3} m)",
            probe[0],
            probe[1],
            r.height,
            r.resolved_level,
            terrain.sample_height(probe[0], probe[1])?
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        save_map(&dir.join("map"), &map)?;
        write_layer_images(dir, &MapSnapshot::new(&map))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
