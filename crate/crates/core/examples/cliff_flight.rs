//! Flies over a five-meter cliff and prints the map error per terrain class.
//! Pass a path to also write the per-frame log as CSV.
//!
//! ```text
//! cargo run --release --example cliff_flight -- [frames.csv]
//! ```

use pyramid_landing::evalbench::CliffExperiment;
use pyramid_landing::{Error, Result};

fn main() -> Result<()> {
    let report = CliffExperiment::default().run()?;
    println!("{report}");
    println!("  t(s)   agl   flat(cm)  rock(cm)  cliff(cm)  points/level");
    let cm = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{:.2}", x * 100.0));
    for f in report.frames.iter().step_by(4) {
        println!(
            "{:6.1} {:5.1} {:>9} {:>9} {:>10}  {:?}",
            f.timestamp,
            f.altitude_agl,
            cm(f.rmse.flat),
            cm(f.rmse.rock),
            cm(f.rmse.cliff),
            f.points_per_level
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, report.csv()).map_err(|e| Error::Config(format!("{path}: {e}")))?;
    }
    Ok(())
}
