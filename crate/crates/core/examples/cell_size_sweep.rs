//! Detection rate of graded rocks on a 7x7 grid for several map cell sizes.
//!
//! ```text
//! cargo run --release --example cell_size_sweep -- [seeds]
//! ```

use pyramid_landing::evalbench::CellSizeSweep;
use pyramid_landing::{Error, Result};

fn main() -> Result<()> {
    let mut sweep = CellSizeSweep::default();
    if let Some(s) = std::env::args().nth(1) {
        sweep.scene.seeds = s.parse().map_err(|_| Error::Config("seeds must be an integer".into()))?;
    }
    let start = std::time::Instant::now();
    let report = sweep.run()?;
    print!("{report}");
    for row in &report.rows {
        let m = &row.metrics;
        println!(
            "{:.2} m cells: {} rocks visible, recall {:.1}%",
            row.cell_size,
            m.rocks_visible,
            100.0 * m.recall().unwrap_or(f64::NAN)
        );
    }
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
