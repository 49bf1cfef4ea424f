//! Shows that moving the rolling map keeps every cell that stays inside the
//! window and forgets the rest.
//!
//! ```text
//! cargo run --example rolling_map
//! ```

use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let cfg = MapConfig {
        depth: 3,
        finest_resolution: 0.5,
        extent_cells: 16,
        ..MapConfig::default()
    };
    let mut map = PyramidMap::new(cfg)?;
    let (lo, hi) = map.bounds();
    println!("window [{}, {}] x [{}, {}]", lo[0], hi[0], lo[1], hi[1]);
    // Three observations of a feature at (1.25, 1.25).
    for t in 0..3 {
        map.fuse_point(1.25, 1.25, 2.0, 0.01, 3, f64::from(t))?;
    }
    let before = map.reconstruct_height(1.25, 1.25, 3)?.map(|r| r.height);
    println!("before shift: {before:?}, roll offset {:?}", map.roll_offset());

    // Shift by one coarse cell (4 finest cells) along x, then back.
    let s = cfg.coarse_factor() as i64;
    map.shift(MapShift { dx: s, dy: 0 })?;
    let (lo, hi) = map.bounds();
    println!(
        "after shift: window [{}, {}] x [{}, {}], roll offset {:?}",
        lo[0],
        hi[0],
        lo[1],
        hi[1],
        map.roll_offset()
    );
    println!("feature still present: {:?}", map.reconstruct_height(1.25, 1.25, 3)?.map(|r| r.height));

    // Far enough that the feature leaves the window.
    map.shift(MapShift { dx: 4 * s, dy: 0 })?;
    println!("after a long move it is outside: contains = {}", map.contains(1.25, 1.25));
    map.shift(MapShift { dx: -5 * s, dy: 0 })?;
    println!(
        "back at the start the cell is empty again: {:?}",
        map.reconstruct_height(1.25, 1.25, 3)?.map(|r| r.height)
    );
    println!("payload {} bytes for {} cells", map.payload_bytes(), map.allocated_cells());
    Ok(())
}
