//! Generates a sloped, rocky terrain with a cliff and probes it.
//!
//! ```text
//! cargo run --example terrain
//! ```

use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let spec = TerrainSpec {
        seed: 42,
        extent: [30.0, 20.0],
        slope_deg: 5.0,
        rock_diameter: 0.3,
        rock_coverage: 0.1,
        cliff: Some(Cliff { edge_x: 20.0, drop: 5.0 }),
        ..TerrainSpec::default()
    };
    let terrain = generate_terrain(&spec)?;
    println!(
        "{} rocks of {} m, coverage {:.3}",
        terrain.rocks().len(),
        spec.rock_diameter,
        terrain.rock_coverage()
    );

    let rock = terrain.rocks()[0];
    for (label, x, y) in [
        ("rock centre", rock.x, rock.y),
        ("cliff edge", 20.0, 10.0),
        ("below cliff", 25.0, 10.0),
        ("upper ground", 5.0, 10.0),
    ] {
        println!(
            "{label:>12}: h = {:7.3} m  plane = {:7.3} m  class = {:?}",
            terrain.sample_height(x, y)?,
            terrain.plane_height(x, y),
            terrain.classify_point(x, y)?
        );
    }
    match terrain.sample_height(-1.0, 0.0) {
        Err(e) => println!("outside the extent: {e}"),
        Ok(h) => println!("unexpected height {h}"),
    }
    Ok(())
}
