//! Writes and reads back every file format in a temporary directory.
//!
//! ```text
//! cargo run --example file_formats
//! ```

use pyramid_landing::io;
use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("pyramid-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Config(e.to_string()))?;

    let terrain = generate_terrain(&TerrainSpec::flat([10.0, 10.0]))?;
    let camera = CameraModel {
        image_width: 64,
        image_height: 48,
        ..CameraModel::default()
    };
    let pose = CameraPose::nadir(0.0, [5.0, 5.0, 3.0]);
    let image = render_range_image(&terrain, &pose, &camera, 9, &RenderOptions::default())?;
    io::write_rimg(&dir.join("f.rimg"), &image)?;
    let back = io::read_rimg(&dir.join("f.rimg"))?;
    println!("RIMG1: {} valid of {} pixels read back", back.valid_count(), back.points.len());

    io::write_pose_log(&dir.join("poses.txt"), &[pose])?;
    println!("pose log: {:?}", io::read_pose_log(&dir.join("poses.txt"))?[0].position);

    let mut map = PyramidMap::centered_at(MapConfig::default(), [5.0, 5.0])?;
    fuse_range_image(&mut map, &image, &pose, &camera);
    io::save_map(&dir.join("map"), &map)?;
    let loaded = io::load_map(&dir.join("map"))?;
    let mut same = loaded.origin_index() == map.origin_index();
    for level in 1..=map.depth() {
        let n = map.config().cells(level);
        for row in 0..n {
            for col in 0..n {
                same &= loaded.cell(level, col, row)? == map.cell(level, col, row)?;
            }
        }
    }
    println!("map dump round trip equal: {same}");

    let snap = MapSnapshot::new(&map);
    io::write_layer_images(&dir, &snap)?;
    let landing = detect(&snap, &LandingConfig::default())?;
    io::write_landing_pgm(&dir.join("landing.pgm"), &landing)?;
    let (cells, classes) = io::read_landing_pgm(&dir.join("landing.pgm"))?;
    println!("landing PGM: {cells}x{cells}, classes equal: {}", classes == landing.classes);
    println!("candidates CSV:\n{}", io::format_candidates_csv(&landing.candidates[..landing.candidates.len().min(3)]));

    std::fs::remove_dir_all(&dir).map_err(|e| Error::Config(e.to_string()))?;
    Ok(())
}
