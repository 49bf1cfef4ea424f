//! The per-point building blocks of fusion: pixel footprint, level choice,
//! measurement variance and the scalar Kalman update.
//!
//! ```text
//! cargo run --example lod_and_kalman
//! ```

use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let camera = CameraModel {
        image_width: 320,
        image_height: 240,
        ..CameraModel::default()
    };
    let map = MapConfig::default();
    println!("map: {} layers, finest {} m", map.depth, map.finest_resolution);
    for distance in [2.5, 5.0, 10.0, 20.0, 40.0] {
        let fp = pixel_footprint(distance, 0.0, &camera)?;
        let baseline = camera.baseline(distance);
        let var = measurement_variance(distance, baseline, camera.focal_px(), 0.25)?;
        println!(
            "{distance:5.1} m: footprint {:6.3} m -> layer {}, sigma_z {:.2} mm",
            fp,
            target_level(fp, &map),
            var.sqrt() * 1e3
        );
    }

    // Repeated measurements of the same height shrink the variance as 1/n.
    let (mut h, mut v) = (0.0, 0.0);
    for (i, z) in [1.02, 0.98, 1.01, 0.99].into_iter().enumerate() {
        (h, v) = if i == 0 { (z, 1e-4) } else { kalman_update(h, v, z, 1e-4)? };
        println!("after {} updates: h = {h:.4} m, variance = {v:.2e}", i + 1);
    }

    for level in 1..=3 {
        println!("finest index 13 lies in layer-{level} cell {}", cell_index(13, level, 3)?);
    }
    Ok(())
}
