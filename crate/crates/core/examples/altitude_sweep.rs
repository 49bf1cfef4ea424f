//! Landing-site recall at two altitudes, with the configured stereo noise and
//! with a perfect sensor.
//!
//! ```text
//! cargo run --release --example altitude_sweep -- [seeds]
//! ```

use pyramid_landing::evalbench::AltitudeSweep;
use pyramid_landing::{Error, Result};

fn main() -> Result<()> {
    let mut sweep = AltitudeSweep::default();
    if let Some(s) = std::env::args().nth(1) {
        sweep.scene.seeds = s.parse().map_err(|_| Error::Config("seeds must be an integer".into()))?;
    }
    let start = std::time::Instant::now();
    let report = sweep.run()?;
    print!("{report}");
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
