//! Renders one noisy stereo range image from 5 m and writes it as RIMG1.
//!
//! ```text
//! cargo run --example render -- [out.rimg]
//! ```

use pyramid_landing::io::write_rimg;
use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let terrain = generate_terrain(&TerrainSpec {
        seed: 7,
        extent: [20.0, 20.0],
        rock_coverage: 0.05,
        ..TerrainSpec::default()
    })?;
    let camera = CameraModel::default();
    let pose = CameraPose::nadir(0.0, [10.0, 10.0, terrain.plane_height(10.0, 10.0) + 5.0]);
    let image = render_range_image(&terrain, &pose, &camera, 1, &RenderOptions::default())?;

    let heights: Vec<f64> = image.valid_points().map(|p| p.z).collect();
    let mean = heights.iter().sum::<f64>() / heights.len() as f64;
    let sigma = image.valid_points().map(|p| p.variance.sqrt()).sum::<f64>() / heights.len() as f64;
    println!("{}x{} pixels, {} valid", image.width, image.height, image.valid_count());
    println!("mean point height {mean:.3} m, mean height sigma {:.2} mm", sigma * 1e3);
    println!(
        "baseline {:.2} m, focal {:.1} px, disparity sigma {:.4} px",
        camera.baseline(5.0),
        camera.focal_px(),
        camera.disparity_sigma()
    );
    if let Some(path) = std::env::args().nth(1) {
        write_rimg(path.as_ref(), &image)?;
        println!("wrote {path}");
    }
    Ok(())
}
